#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cutoff.hpp"
#include "field.hpp"
#include "transform.hpp"

namespace skspec {

/// Smooth projection P_N: multiplies fhat(n) by chi(<n>/N).
inline SpectralField project_smooth(const SpectralField& f, double N) {
    if (!(N > 0.0)) throw std::invalid_argument("project_smooth: N must be positive");
    SpectralField out = f;
    const int m = f.size();
    const SmoothCutoff cut;
    for (int i = 0; i < m; ++i) {
        const int n1 = f.lattice().freq(i);
        for (int j = 0; j < m; ++j) {
            const double w = cut.at_scale(bracket(n1, f.lattice().freq(j)), N);
            out.raw()[std::size_t(i) * m + j] *= w;
        }
    }
    return out;
}

enum class SharpSide { low, high };

/// Sharp projections onto <n> <= (1+theta)/(2 eps) and the complement.
/// low + high = identity, and each is idempotent, exactly.
inline SpectralField project_sharp(const SpectralField& f, double eps, SharpSide side,
                                   double theta = 0.0) {
    if (!(eps > 0.0)) throw std::invalid_argument("project_sharp: eps must be positive");
    if (theta < 0.0) throw std::invalid_argument("project_sharp: theta must be >= 0");
    const double split = (1.0 + theta) / (2.0 * eps);
    SpectralField out = f;
    const int m = f.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = f.lattice().freq(i);
        for (int j = 0; j < m; ++j) {
            const bool low = bracket(n1, f.lattice().freq(j)) <= split;
            if ((side == SharpSide::low) != low) out.raw()[std::size_t(i) * m + j] = cplx{0.0, 0.0};
        }
    }
    return out;
}

/// Sharp projection onto <n> <= limit (used for Galerkin truncation).
inline SpectralField truncate_bracket(const SpectralField& f, double limit) {
    SpectralField out = f;
    const int m = f.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = f.lattice().freq(i);
        for (int j = 0; j < m; ++j)
            if (bracket(n1, f.lattice().freq(j)) > limit)
                out.raw()[std::size_t(i) * m + j] = cplx{0.0, 0.0};
    }
    return out;
}

/// H^s norm: (sum <n>^{2s} |fhat(n)|^2)^{1/2}.
inline double sobolev_norm(const SpectralField& f, double s) {
    const int m = f.size();
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        const int n1 = f.lattice().freq(i);
        for (int j = 0; j < m; ++j) {
            const cplx c = f.raw()[std::size_t(i) * m + j];
            if (c == cplx{0.0, 0.0}) continue;
            acc += std::pow(bracket_sq(n1, f.lattice().freq(j)), s) * std::norm(c);
        }
    }
    return std::sqrt(acc);
}

/// Grid quadrature of the squared field: sqrt((2pi/M)^2 sum f(x_j)^2).
/// Agrees with sobolev_norm(f, 0) by Parseval.
inline double physical_l2_norm(const SpectralField& f) {
    auto phys = to_physical_complex(f);
    double acc = 0.0;
    for (const auto& v : phys) acc += std::norm(v);
    const double cell = 2.0 * M_PI / f.size();
    return std::sqrt(acc) * cell;
}

/// Per-axis spectral bandwidth: max |n_j| over nonzero coefficients.
inline int bandwidth_inf(const SpectralField& f) {
    const int m = f.size();
    int bw = 0;
    for (int i = 0; i < m; ++i) {
        const int n1 = f.lattice().freq(i);
        for (int j = 0; j < m; ++j)
            if (f.raw()[std::size_t(i) * m + j] != cplx{0.0, 0.0})
                bw = std::max({bw, std::abs(n1), std::abs(f.lattice().freq(j))});
    }
    return bw;
}

/// Pointwise product of the physical fields, computed on the shared grid.
/// Coefficients are exact (alias-free) for |m|_inf < M - sum of factor
/// bandwidths; `exact_through` (a bracket value) asserts the caller's needs
/// against that budget.
inline SpectralField dealiased_product(const std::vector<SpectralField>& fields,
                                       double exact_through = 0.0) {
    if (fields.empty()) throw std::invalid_argument("dealiased_product: no factors");
    const FrequencyLattice lat = fields.front().lattice();
    int total_bw = 0;
    bool real_tag = true;
    for (const auto& f : fields) {
        fields.front().check_same_lattice(f, "dealiased_product");
        total_bw += bandwidth_inf(f);
        real_tag = real_tag && f.real_valued();
    }
    if (exact_through > 0.0) {
        // <n> <= exact_through implies |n|_inf <= sqrt(exact_through^2 - 1)
        const double need = std::sqrt(std::max(exact_through * exact_through - 1.0, 0.0));
        if (need >= double(lat.size()) - total_bw)
            throw std::invalid_argument("dealiased_product: degree exceeds dealiasing capacity");
    }
    std::vector<cplx> acc = to_physical_complex(fields.front());
    std::vector<cplx> tmp;
    for (std::size_t k = 1; k < fields.size(); ++k) {
        Transform::for_size(lat.size()).inverse(fields[k].raw(), tmp);
        for (std::size_t p = 0; p < acc.size(); ++p) acc[p] *= tmp[p];
    }
    SpectralField out(lat, false);
    Transform::for_size(lat.size()).forward(acc, out.raw());
    if (real_tag) {
        SpectralField fixed(lat, true);
        const int m = lat.size();
        for (int i = 0; i < m; ++i) {
            const int n1 = lat.freq(i);
            for (int j = 0; j < m; ++j) {
                const int n2 = lat.freq(j);
                if (lat.is_nyquist(n1, n2)) continue;
                fixed.raw()[std::size_t(i) * m + j] = out.raw()[std::size_t(i) * m + j];
            }
        }
        fixed.raw()[lat.flat(0, 0)] = cplx{fixed.raw()[lat.flat(0, 0)].real(), 0.0};
        return fixed;
    }
    return out;
}

}  // namespace skspec
