#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cutoff.hpp"
#include "wick.hpp"

namespace skspec {

using TorusPoint = std::array<double, 2>;

/// Covariance Gamma_{eps,N}(t, x) = E[Psi_{eps,N}(t,y) Psi_{eps,N}(t,y+x)]:
/// spectral sum of chi_N^2 (2pi)^{-2} [int_0^t kappa_eps^2] cos(n.x).
/// At x = 0 this is sigma_variance. The batch form shares the per-shell
/// time integrals across probe points.
inline std::vector<double> covariance_gamma_batch(double eps, double N, double t,
                                                  const std::vector<TorusPoint>& xs,
                                                  double mode_tol = 1e-10) {
    if (t < 0.0) throw std::invalid_argument("covariance_gamma: t must be >= 0");
    std::vector<double> out(xs.size(), 0.0);
    if (t == 0.0) return out;
    const SmoothCutoff cut;
    const int R = int(std::ceil(cutoff_support(N)));
    std::vector<double> shell(std::size_t(2 * R * R) + 2, -1.0);
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            const double w = cut.at_scale(bracket(n1, n2), N);
            if (w == 0.0) continue;
            const std::size_t key = std::size_t(n1 * n1 + n2 * n2);
            if (shell[key] < 0.0)
                shell[key] = detail::kappa_sq_integral(eps, 1.0 + double(key), 0.0, t, mode_tol);
            const double base = w * w * shell[key];
            for (std::size_t p = 0; p < xs.size(); ++p)
                out[p] += base * std::cos(n1 * xs[p][0] + n2 * xs[p][1]);
        }
    for (auto& v : out) v /= 4.0 * M_PI * M_PI;
    return out;
}

inline double covariance_gamma(double eps, double N, double t, const TorusPoint& x,
                               double mode_tol = 1e-10) {
    return covariance_gamma_batch(eps, N, t, {x}, mode_tol)[0];
}

/// Partial sum of the heat Green-type kernel
///   H(t,x) = (2pi)^{-2} sum_n (1 - e^{-2t<n>^2}) / (2<n>^2) e^{i n.x}
/// over <n> <= truncation (sharp). With smooth_N > 0 the sum is instead
/// weighted by chi_{smooth_N}^2 over the full cutoff support, giving
/// P_N^2 H, which equals Gamma_{0,N}.
///
/// Normalization note: the factor is half the classical display
/// (2pi)^{-1} sum (1-e^{-2t<n>^2}) <n>^{-2} e_n(x) because the per-mode
/// Brownian here carries Var(B_n(t)) = t split across real and imaginary
/// parts; with this constant Gamma_0 = H holds exactly.
inline double heat_green(double t, const TorusPoint& x, int truncation, double smooth_N = 0.0) {
    if (truncation < 64) throw std::invalid_argument("heat_green: truncation must be >= 64");
    const SmoothCutoff cut;
    const int R = smooth_N > 0.0 ? int(std::ceil(cutoff_support(smooth_N))) : truncation;
    double acc = 0.0;
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            const double br = bracket(n1, n2);
            if (smooth_N <= 0.0 && br > truncation) continue;
            double w = 1.0;
            if (smooth_N > 0.0) {
                w = cut.at_scale(br, smooth_N);
                w *= w;
                if (w == 0.0) continue;
            }
            const double b2 = br * br;
            acc += w * (-std::expm1(-2.0 * t * b2)) / (2.0 * b2) * std::cos(n1 * x[0] + n2 * x[1]);
        }
    return acc / (4.0 * M_PI * M_PI);
}

/// Bessel-potential kernel J_alpha(x): truncated sum of
/// (2pi)^{-2} chi_trunc(n) <n>^{-alpha} e^{i n.x}. Diverges like
/// c_alpha |x|^{alpha-2} at the origin for 0 < alpha < 2.
inline double bessel_kernel(double alpha, const TorusPoint& x, int truncation) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw std::invalid_argument("bessel_kernel: alpha must be in (0,2)");
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) throw std::invalid_argument("bessel_kernel: x must be nonzero");
    if (r < M_PI / (4.0 * truncation))
        throw std::invalid_argument("bessel_kernel: |x| below truncation resolution");
    const SmoothCutoff cut;
    const int R = 2 * truncation;
    double acc = 0.0;
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            const double br = bracket(n1, n2);
            const double w = cut.at_scale(br, double(truncation));
            if (w == 0.0) continue;
            acc += w * std::pow(br, -alpha) * std::cos(n1 * x[0] + n2 * x[1]);
        }
    return acc / (4.0 * M_PI * M_PI);
}

/// The comparison potentials of the covariance asymptotics:
///   J_{0,N} = (|x| + 1/N)/(|x| + sqrt(t) + 1/N)
///   J_{eps,N} = heat form for N <= 1/(2 eps), otherwise the mixed form with
///   exponent 1 - e^{-t/eps^2}. Always in (0, 1].
inline double potential_J(double eps, double N, double t, const TorusPoint& x) {
    if (t < 0.0) throw std::invalid_argument("potential_J: t must be >= 0");
    const double r = std::hypot(x[0], x[1]);
    const double st = std::sqrt(t);
    const double heat_form = (r + 1.0 / N) / (r + st + 1.0 / N);
    if (eps == 0.0 || N <= 1.0 / (2.0 * eps)) return heat_form;
    const double wave_mix = (r + eps) / (r + st + eps) *
                            std::pow((r + 1.0 / N) / (r + eps), -std::expm1(-t / (eps * eps)));
    return wave_mix;
}

/// An additive "approximately equals" certificate over a probe grid:
/// residuals g - f, their band [c1, c2], and the configured width gate.
struct CovarianceReport {
    std::vector<double> residuals;
    double c1 = 0.0, c2 = 0.0;
    double width() const { return c2 - c1; }
    bool pass = false;
};

inline CovarianceReport band_certificate(const std::vector<double>& model,
                                         const std::vector<double>& computed, double max_width) {
    if (model.size() != computed.size() || model.empty())
        throw std::invalid_argument("band_certificate: probe mismatch");
    CovarianceReport rep;
    rep.c1 = rep.c2 = computed[0] - model[0];
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double r = computed[i] - model[i];
        rep.residuals.push_back(r);
        rep.c1 = std::min(rep.c1, r);
        rep.c2 = std::max(rep.c2, r);
    }
    rep.pass = std::isfinite(rep.width()) && rep.width() <= max_width;
    return rep;
}

/// Default probe grid: dyadic radii pi/2^j (j = 0..5) along the two axes and
/// the diagonal; fixed so reported constants are reproducible.
inline std::vector<TorusPoint> default_probe_points() {
    std::vector<TorusPoint> pts;
    const double inv = 1.0 / std::sqrt(2.0);
    for (int j = 0; j <= 5; ++j) {
        const double r = M_PI / double(1 << j);
        pts.push_back({r, 0.0});
        pts.push_back({0.0, r});
        pts.push_back({r * inv, r * inv});
    }
    return pts;
}

inline std::vector<double> default_probe_times() { return {0.01, 0.1, 1.0}; }

/// Lemma-cov2-style certificate: max over probes of
/// |P_{N_j}^2 Gamma_eps - P_{N1} P_{N2} Gamma_eps| N1^delta |x|^{2 delta}.
struct CovDifferenceReport {
    double constant_j1 = 0.0;
    double constant_j2 = 0.0;
    bool finite = false;
};

inline CovDifferenceReport cov_difference_check(double N1, double N2, double eps,
                                                const std::vector<TorusPoint>& probes,
                                                const std::vector<double>& times,
                                                double delta = 0.1, double mode_tol = 1e-10) {
    if (N1 < 8.0 || N2 < N1) throw std::invalid_argument("cov_difference_check: need 8 <= N1 <= N2");
    const SmoothCutoff cut;
    const int R = int(std::ceil(cutoff_support(N2)));
    CovDifferenceReport rep;
    for (double t : times) {
        // per-shell integral cache
        std::vector<double> shell(std::size_t(2 * R * R) + 2, -1.0);
        for (const auto& x : probes) {
            double d1 = 0.0, d2 = 0.0;
            for (int n1 = -R; n1 <= R; ++n1)
                for (int n2m = -R; n2m <= R; ++n2m) {
                    const double br = bracket(n1, n2m);
                    const double w1 = cut.at_scale(br, N1);
                    const double w2 = cut.at_scale(br, N2);
                    const double g1 = w1 * w1 - w1 * w2;
                    const double g2 = w2 * w2 - w1 * w2;
                    if (g1 == 0.0 && g2 == 0.0) continue;
                    const std::size_t key = std::size_t(n1 * n1 + n2m * n2m);
                    if (shell[key] < 0.0)
                        shell[key] =
                            detail::kappa_sq_integral(eps, 1.0 + double(key), 0.0, t, mode_tol);
                    const double base = shell[key] * std::cos(n1 * x[0] + n2m * x[1]);
                    d1 += g1 * base;
                    d2 += g2 * base;
                }
            const double r = std::hypot(x[0], x[1]);
            const double scale = std::pow(N1, delta) * std::pow(r, 2.0 * delta) /
                                 (4.0 * M_PI * M_PI);
            rep.constant_j1 = std::max(rep.constant_j1, std::abs(d1) * scale);
            rep.constant_j2 = std::max(rep.constant_j2, std::abs(d2) * scale);
        }
    }
    rep.finite = std::isfinite(rep.constant_j1) && std::isfinite(rep.constant_j2);
    return rep;
}

}  // namespace skspec
