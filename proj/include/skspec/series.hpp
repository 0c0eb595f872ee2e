#pragma once

#include <cmath>

namespace skspec {

/// phi(x) = sum_{j>=0} x^j / (2j+1)!  -- equals sinh(sqrt x)/sqrt x for x > 0
/// and sin(sqrt -x)/sqrt -x for x < 0, with phi(0) = 1.
///
/// Hybrid evaluation: the power series for |x| <= 1 (where the closed forms
/// divide two near-zero quantities), closed forms otherwise. Series terms are
/// added until below 1e-18.
inline double phi_series(double x) {
    if (std::abs(x) <= 1.0) {
        double term = 1.0, acc = 1.0;
        for (int j = 1; j < 40; ++j) {
            term *= x / (double(2 * j) * (2 * j + 1));
            acc += term;
            if (std::abs(term) < 1e-18) break;
        }
        return acc;
    }
    if (x > 0.0) {
        const double r = std::sqrt(x);
        return std::sinh(r) / r;
    }
    const double r = std::sqrt(-x);
    return std::sin(r) / r;
}

/// psi(x) = sum_{j>=0} x^j / (2j)! -- cosh(sqrt x) for x > 0, cos(sqrt -x)
/// for x < 0. Same hybrid switch as phi_series.
inline double psi_series(double x) {
    if (std::abs(x) <= 1.0) {
        double term = 1.0, acc = 1.0;
        for (int j = 1; j < 40; ++j) {
            term *= x / (double(2 * j - 1) * (2 * j));
            acc += term;
            if (std::abs(term) < 1e-18) break;
        }
        return acc;
    }
    return x > 0.0 ? std::cosh(std::sqrt(x)) : std::cos(std::sqrt(-x));
}

}  // namespace skspec
