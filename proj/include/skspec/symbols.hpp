#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "field.hpp"
#include "quadrature.hpp"
#include "series.hpp"

namespace skspec {

/// Point at which the propagator symbols are evaluated. eps = 0 selects the
/// heat symbols.
struct ModeSymbolQuery {
    double eps;
    int n1, n2;
    double t;
};

/// lambda^2 = 1/(4 eps^4) - <n>^2/eps^2. Positive below the crossover
/// <n> = 1/(2 eps) (overdamped), negative above it (oscillatory).
inline double lambda_sq(double eps, double nsq) {
    const double e2 = eps * eps;
    return 1.0 / (4.0 * e2 * e2) - nsq / e2;
}

namespace detail {

/// e^{-t/(2 eps^2)} * t * phi(t^2 lambda^2), split to avoid overflow:
/// for large positive t^2 lambda^2, sinh is folded into exponentials whose
/// combined exponent lambda t - t/(2 eps^2) <= -<n>^2 t stays bounded.
inline double damped_phi(double eps, double nsq, double t) {
    const double half = t / (2.0 * eps * eps);
    const double l2 = lambda_sq(eps, nsq);
    const double x = t * t * l2;
    if (std::abs(x) <= 1.0) return std::exp(-half) * t * phi_series(x);
    if (x > 0.0) {
        const double lam = std::sqrt(l2);
        return std::exp(lam * t - half) * (1.0 - std::exp(-2.0 * lam * t)) / (2.0 * lam);
    }
    const double zeta = std::sqrt(-l2);
    return std::exp(-half) * std::sin(zeta * t) / zeta;
}

/// e^{-t/(2 eps^2)} * psi(t^2 lambda^2), same overflow fold.
inline double damped_psi(double eps, double nsq, double t) {
    const double half = t / (2.0 * eps * eps);
    const double l2 = lambda_sq(eps, nsq);
    const double x = t * t * l2;
    if (std::abs(x) <= 1.0) return std::exp(-half) * psi_series(x);
    if (x > 0.0) {
        const double lam = std::sqrt(l2);
        return 0.5 * std::exp(lam * t - half) * (1.0 + std::exp(-2.0 * lam * t));
    }
    return std::exp(-half) * std::cos(std::sqrt(-l2) * t);
}

}  // namespace detail

/// Damped-wave symbol Dhat_eps(n, t) (zero initial position, unit velocity).
inline double dhat(double eps, double nsq, double t) {
    if (!(eps > 0.0)) throw std::invalid_argument("dhat: requires eps > 0 (heat has no Dhat)");
    return detail::damped_phi(eps, nsq, t);
}
inline double dhat(const ModeSymbolQuery& q) { return dhat(q.eps, bracket_sq(q.n1, q.n2), q.t); }

/// d/dt Dhat = -(2 eps^2)^{-1} Dhat + e^{-t/(2 eps^2)} psi(t^2 lambda^2);
/// equals 1 at t = 0.
inline double dhat_dt(double eps, double nsq, double t) {
    if (!(eps > 0.0)) throw std::invalid_argument("dhat_dt: requires eps > 0");
    return -detail::damped_phi(eps, nsq, t) / (2.0 * eps * eps) + detail::damped_psi(eps, nsq, t);
}
inline double dhat_dt(const ModeSymbolQuery& q) { return dhat_dt(q.eps, bracket_sq(q.n1, q.n2), q.t); }

/// Heat propagator symbol e^{-t <n>^2} (mass-one heat semigroup).
inline double heat_symbol(double nsq, double t) { return std::exp(-t * nsq); }
inline double heat_symbol(int n1, int n2, double t) { return heat_symbol(bracket_sq(n1, n2), t); }

/// (eps^{-2} + d/dt) Dhat for eps > 0, the heat symbol at eps = 0. Converges
/// to e^{-t <n>^2} as eps -> 0 for fixed n. The two Dhat terms combine into
/// (2 eps^2)^{-1} Dhat + e^{-t/(2e^2)} psi, both non-negative below the
/// crossover, so there is no cancellation.
inline double combined_symbol(double eps, double nsq, double t) {
    if (eps == 0.0) return heat_symbol(nsq, t);
    return detail::damped_phi(eps, nsq, t) / (2.0 * eps * eps) + detail::damped_psi(eps, nsq, t);
}
inline double combined_symbol(const ModeSymbolQuery& q) {
    return combined_symbol(q.eps, bracket_sq(q.n1, q.n2), q.t);
}

/// 2x2 transition matrix of one mode of the damped wave equation acting on
/// (u, du/dt) over a step h:
///   M11 = combined(h), M12 = Dhat(h), M21 = -<n>^2 Dhat(h)/eps^2, M22 = Dhat'(h);
/// M(0) = I and det M(h) = e^{-h/eps^2} (the damped-oscillator Wronskian).
struct ModeTransition {
    double m11, m12, m21, m22;
    double eps, nsq, h;

    std::array<double, 2> apply(double u, double udot) const {
        return {m11 * u + m12 * udot, m21 * u + m22 * udot};
    }
    double det() const { return m11 * m22 - m12 * m21; }
};

inline ModeTransition mode_transition(double eps, double nsq, double h) {
    if (!(eps > 0.0)) throw std::invalid_argument("mode_transition: requires eps > 0");
    const double d = dhat(eps, nsq, h);
    const double dt = dhat_dt(eps, nsq, h);
    return {dt + d / (eps * eps), d, -nsq * d / (eps * eps), dt, eps, nsq, h};
}
inline ModeTransition mode_transition(double eps, int n1, int n2, double h) {
    return mode_transition(eps, bracket_sq(n1, n2), h);
}

/// Duhamel position weight int_0^h eps^{-2} Dhat(n, s) ds, by adaptive
/// Gauss-Legendre (abs tol 1e-12); the eps = 0 branch is the exponential
/// Euler weight (1 - e^{-h <n>^2})/<n>^2 in closed form.
inline double duhamel_weight(double eps, double nsq, double h, double abs_tol = 1e-12) {
    if (!(h > 0.0)) throw std::invalid_argument("duhamel_weight: h must be positive");
    if (eps == 0.0) return -std::expm1(-h * nsq) / nsq;
    return integrate([=](double s) { return dhat(eps, nsq, s) / (eps * eps); }, 0.0, h, abs_tol);
}
inline double duhamel_weight(double eps, int n1, int n2, double h, double abs_tol = 1e-12) {
    return duhamel_weight(eps, bracket_sq(n1, n2), h, abs_tol);
}

/// Closed form of the same weight via the mode ODE:
/// int_0^h eps^{-2} Dhat = (1 - combined(h))/<n>^2. Used as a cross-check.
inline double duhamel_weight_closed(double eps, double nsq, double h) {
    return (1.0 - combined_symbol(eps, nsq, h)) / nsq;
}

/// Initial data pair (phi0, phi1); phi1 is ignored at eps = 0.
struct InitialDataPair {
    SpectralField phi0;
    SpectralField phi1;

    InitialDataPair(SpectralField p0, SpectralField p1) : phi0(std::move(p0)), phi1(std::move(p1)) {
        phi0.check_same_lattice(phi1, "initial data");
        if (!phi0.real_valued() || !phi1.real_valued())
            throw std::invalid_argument("initial data: both fields must be real-tagged");
    }
};

/// Homogeneous linear solution at time t:
///   eps > 0: combined(t) phi0hat + Dhat(t) phi1hat   (mode-wise)
///   eps = 0: heat(t) phi0hat                          (phi1 dropped)
inline SpectralField apply_P_eps(const InitialDataPair& data, double eps, double t) {
    SpectralField out(data.phi0.lattice(), true);
    const int m = out.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = out.lattice().freq(i);
        for (int j = 0; j < m; ++j) {
            const std::size_t k = std::size_t(i) * m + j;
            const cplx p0 = data.phi0.raw()[k];
            const cplx p1 = data.phi1.raw()[k];
            if (p0 == cplx{0.0, 0.0} && p1 == cplx{0.0, 0.0}) continue;
            const double nsq = bracket_sq(n1, out.lattice().freq(j));
            if (eps == 0.0) {
                out.raw()[k] = heat_symbol(nsq, t) * p0;
            } else {
                out.raw()[k] = combined_symbol(eps, nsq, t) * p0 + dhat(eps, nsq, t) * p1;
            }
        }
    }
    return out;
}

}  // namespace skspec
