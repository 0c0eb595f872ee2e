#pragma once

#include <cmath>

namespace skspec {

/// Smooth frequency cutoff profile chi: equal to 1 on [0,1], 0 on [2,inf),
/// and exp(1 - 1/(1-(r-1)^2)) on (1,2). Monotone non-increasing on [1,2].
/// The PDE only pins the support and smoothness; this exact ramp is the
/// published profile so every constant in the test suite is reproducible.
struct SmoothCutoff {
    double operator()(double r) const {
        if (r <= 1.0) return 1.0;
        if (r >= 2.0) return 0.0;
        const double s = r - 1.0;
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }

    /// chi_N(n) = chi(<n>/N).
    double at_scale(double bracket_value, double N) const {
        return (*this)(bracket_value / N);
    }
};

inline double chi(double r) { return SmoothCutoff{}(r); }
inline double chi_N(double bracket_value, double N) { return SmoothCutoff{}.at_scale(bracket_value, N); }

/// chi_N vanishes for <n> >= 2N; modes beyond this never feel the noise.
inline double cutoff_support(double N) { return 2.0 * N; }

}  // namespace skspec
