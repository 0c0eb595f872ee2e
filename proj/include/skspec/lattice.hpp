#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace skspec {

/// Japanese bracket <n> = sqrt(1 + n1^2 + n2^2). Always >= 1.
inline double bracket(int n1, int n2) {
    return std::sqrt(1.0 + double(n1) * n1 + double(n2) * n2);
}

inline double bracket_sq(int n1, int n2) {
    return 1.0 + double(n1) * n1 + double(n2) * n2;
}

/// Square frequency lattice on the 2-torus of side 2*pi.
///
/// Retained frequencies per axis are -M/2 <= n < M/2, stored in DFT order
/// (index i maps to frequency i for i < M/2, i - M otherwise). The Nyquist
/// rows n_j = -M/2 have no conjugate partner and are forced to zero for
/// real-valued fields.
class FrequencyLattice {
public:
    explicit FrequencyLattice(int grid_size) : m_(grid_size) {
        if (m_ < 8 || m_ % 2 != 0)
            throw std::invalid_argument("lattice: grid size must be even and >= 8");
    }

    int size() const { return m_; }
    std::size_t point_count() const { return std::size_t(m_) * m_; }

    int freq(int index) const { return index < m_ / 2 ? index : index - m_; }
    int index_of(int n) const {
        if (n < -m_ / 2 || n >= m_ / 2) throw std::out_of_range("lattice: frequency outside lattice");
        return n >= 0 ? n : n + m_;
    }
    std::size_t flat(int n1, int n2) const {
        return std::size_t(index_of(n1)) * m_ + index_of(n2);
    }

    bool is_nyquist(int n1, int n2) const { return n1 == -m_ / 2 || n2 == -m_ / 2; }

    /// Largest bracket representable on the lattice (at the corner).
    double max_bracket() const {
        double h = m_ / 2.0;
        return std::sqrt(1.0 + 2.0 * h * h);
    }

    bool operator==(const FrequencyLattice& o) const { return m_ == o.m_; }
    bool operator!=(const FrequencyLattice& o) const { return m_ != o.m_; }

private:
    int m_;
};

/// One retained mode: integer frequency pair plus its flat storage index.
struct Mode {
    int n1, n2;
    std::size_t idx;
};

/// Canonical representative of the conjugate pair {n, -n}: the member with
/// n2 > 0, or n2 == 0 and n1 >= 0. Noise is drawn at the canonical mode and
/// mirrored by conjugation, which makes Hermitian symmetry exact.
inline bool is_canonical(int n1, int n2) {
    return n2 > 0 || (n2 == 0 && n1 >= 0);
}

/// All modes with bracket <= limit (skipping Nyquist rows), in deterministic
/// row-major order.
inline std::vector<Mode> modes_within(const FrequencyLattice& lat, double limit) {
    std::vector<Mode> out;
    const int m = lat.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = lat.freq(i);
        if (n1 == -m / 2) continue;
        for (int j = 0; j < m; ++j) {
            const int n2 = lat.freq(j);
            if (n2 == -m / 2) continue;
            if (bracket(n1, n2) <= limit)
                out.push_back({n1, n2, std::size_t(i) * m + j});
        }
    }
    return out;
}

}  // namespace skspec
