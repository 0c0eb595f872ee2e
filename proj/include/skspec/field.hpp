#pragma once

#include <complex>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace skspec {

using cplx = std::complex<double>;

/// Fourier coefficients of a field on the torus, in the orthonormal basis
/// e_n(x) = (2*pi)^{-1} exp(i n.x), so f(x) = sum_n fhat(n) e_n(x) and
/// the L^2 norm of f equals the l^2 norm of the coefficients.
///
/// Real-tagged fields keep fhat(-n) = conj(fhat(n)) with fhat(0) real and
/// zeroed Nyquist rows; every operation in this module preserves that.
class SpectralField {
public:
    SpectralField(const FrequencyLattice& lat, bool real_valued = true)
        : lat_(lat), coef_(lat.point_count(), cplx{0.0, 0.0}), real_(real_valued) {}

    const FrequencyLattice& lattice() const { return lat_; }
    bool real_valued() const { return real_; }
    int size() const { return lat_.size(); }

    cplx at(int n1, int n2) const { return coef_[lat_.flat(n1, n2)]; }

    /// Sets fhat(n); for real-tagged fields the conjugate mode follows.
    void set(int n1, int n2, cplx v) {
        if (real_) {
            if (lat_.is_nyquist(n1, n2))
                throw std::invalid_argument("field: Nyquist rows are zero for real fields");
            coef_[lat_.flat(n1, n2)] = v;
            coef_[lat_.flat(-n1, -n2)] = std::conj(v);
            if (n1 == 0 && n2 == 0) coef_[lat_.flat(0, 0)] = cplx{v.real(), 0.0};
        } else {
            coef_[lat_.flat(n1, n2)] = v;
        }
    }

    std::vector<cplx>& raw() { return coef_; }
    const std::vector<cplx>& raw() const { return coef_; }

    /// Largest Hermitian-symmetry violation, 0 for well-formed real fields.
    double hermitian_defect() const {
        double worst = 0.0;
        const int m = lat_.size();
        for (int i = 0; i < m; ++i) {
            const int n1 = lat_.freq(i);
            for (int j = 0; j < m; ++j) {
                const int n2 = lat_.freq(j);
                if (lat_.is_nyquist(n1, n2)) {
                    worst = std::max(worst, std::abs(coef_[std::size_t(i) * m + j]));
                    continue;
                }
                const cplx a = coef_[std::size_t(i) * m + j];
                const cplx b = coef_[lat_.flat(-n1, -n2)];
                worst = std::max(worst, std::abs(a - std::conj(b)));
            }
        }
        return worst;
    }

    void check_same_lattice(const SpectralField& other, const char* what) const {
        if (lat_ != other.lat_)
            throw std::invalid_argument(std::string(what) + ": lattice mismatch");
    }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_lattice(o, "field add");
        for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] += o.coef_[k];
        real_ = real_ && o.real_;
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_lattice(o, "field sub");
        for (std::size_t k = 0; k < coef_.size(); ++k) coef_[k] -= o.coef_[k];
        real_ = real_ && o.real_;
        return *this;
    }
    SpectralField& operator*=(double a) {
        for (auto& c : coef_) c *= a;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }

private:
    FrequencyLattice lat_;
    std::vector<cplx> coef_;
    bool real_;
};

// ---------------------------------------------------------------------------
// Serialization. Binary layout (little-endian):
//   magic "SKSF" | u32 M | u8 real flag | u64 record count |
//   records (i32 n1, i32 n2, f64 re, f64 im), zero coefficients omitted.
// The JSON form mirrors it: {"M":..,"real":..,"coeffs":[[n1,n2,re,im],...]}.
// ---------------------------------------------------------------------------

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("field: truncated stream");
    return v;
}
}  // namespace detail

inline void write_field_binary(std::ostream& os, const SpectralField& f) {
    os.write("SKSF", 4);
    detail::put<std::uint32_t>(os, std::uint32_t(f.size()));
    detail::put<std::uint8_t>(os, f.real_valued() ? 1 : 0);
    std::uint64_t count = 0;
    for (const auto& c : f.raw())
        if (c != cplx{0.0, 0.0}) ++count;
    detail::put<std::uint64_t>(os, count);
    const int m = f.size();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const cplx c = f.raw()[std::size_t(i) * m + j];
            if (c == cplx{0.0, 0.0}) continue;
            detail::put<std::int32_t>(os, f.lattice().freq(i));
            detail::put<std::int32_t>(os, f.lattice().freq(j));
            detail::put<double>(os, c.real());
            detail::put<double>(os, c.imag());
        }
}

inline SpectralField read_field_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "SKSF", 4) != 0)
        throw std::runtime_error("field: bad magic");
    const auto m = detail::get<std::uint32_t>(is);
    const auto real = detail::get<std::uint8_t>(is);
    const auto count = detail::get<std::uint64_t>(is);
    SpectralField f(FrequencyLattice(int(m)), real != 0);
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto n1 = detail::get<std::int32_t>(is);
        const auto n2 = detail::get<std::int32_t>(is);
        const double re = detail::get<double>(is);
        const double im = detail::get<double>(is);
        f.raw()[f.lattice().flat(n1, n2)] = cplx{re, im};
    }
    return f;
}

/// JSON record form: {"M":..,"real":..,"coeffs":[[n1,n2,re,im],...]}.
inline std::string field_to_json(const SpectralField& f) {
    std::ostringstream out;
    out << "{\"M\":" << f.size() << ",\"real\":" << (f.real_valued() ? "true" : "false")
        << ",\"coeffs\":[";
    const int m = f.size();
    bool first = true;
    char buf[64];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const cplx c = f.raw()[std::size_t(i) * m + j];
            if (c == cplx{0.0, 0.0}) continue;
            if (!first) out << ',';
            first = false;
            std::snprintf(buf, sizeof buf, "[%d,%d,%.17g,%.17g]", f.lattice().freq(i),
                          f.lattice().freq(j), c.real(), c.imag());
            out << buf;
        }
    out << "]}";
    return out.str();
}

}  // namespace skspec
