#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutoff.hpp"
#include "hermite.hpp"
#include "noise.hpp"
#include "ops.hpp"
#include "quadrature.hpp"
#include "symbols.hpp"
#include "transform.hpp"

namespace skspec {

namespace detail {

/// Distinct <n>^2 values over the band <n> <= 2N together with the summed
/// chi_N(n)^2 weight of each shell (lattice-free: all of Z^2 enters).
struct ShellDecomposition {
    std::vector<double> b2;
    std::vector<double> chi2_weight;
};

inline ShellDecomposition shells_for_cutoff(double N) {
    ShellDecomposition s;
    std::map<double, double> acc;
    const SmoothCutoff cut;
    const int R = int(std::ceil(cutoff_support(N)));
    for (int n1 = -R; n1 <= R; ++n1)
        for (int n2 = -R; n2 <= R; ++n2) {
            const double br = bracket(n1, n2);
            const double w = cut.at_scale(br, N);
            if (w > 0.0) acc[br * br] += w * w;
        }
    for (const auto& [b2, w] : acc) {
        s.b2.push_back(b2);
        s.chi2_weight.push_back(w);
    }
    return s;
}

/// int_0^t kappa_eps(n,s)^2 ds for one mode.
inline double kappa_sq_integral(double eps, double nsq, double t0, double t1, double tol) {
    if (eps == 0.0)
        return (-std::expm1(-2.0 * t1 * nsq) + std::expm1(-2.0 * t0 * nsq)) / (2.0 * nsq);
    const double e2 = eps * eps;
    return integrate([=](double s) { double d = dhat(eps, nsq, s) / e2; return d * d; }, t0, t1, tol);
}

}  // namespace detail

/// sigma_{eps,N}(t) = sum_n chi_N(n)^2 (2pi)^{-2} int_0^t kappa_eps(n,s)^2 ds,
/// the pointwise variance of the truncated convolution. Per-mode quadrature
/// tolerance 1e-10.
inline double sigma_variance(double eps, double N, double t, double mode_tol = 1e-10) {
    if (t < 0.0) throw std::invalid_argument("sigma_variance: t must be >= 0");
    if (t == 0.0) return 0.0;
    const auto shells = detail::shells_for_cutoff(N);
    double acc = 0.0;
    for (std::size_t k = 0; k < shells.b2.size(); ++k)
        acc += shells.chi2_weight[k] *
               detail::kappa_sq_integral(eps, shells.b2[k], 0.0, t, mode_tol);
    return acc / (4.0 * M_PI * M_PI);
}

/// Renormalization tables sigma_{eps,N}(t_j) and gamma = e^{beta^2 sigma/2}
/// on a uniform time grid, for a family of eps values sharing one cutoff.
/// Built once (incremental quadrature per frequency shell), immutable after.
class WickLedger {
public:
    static WickLedger build(const std::vector<double>& eps_list, double N, double T, int steps,
                            double beta, double mode_tol = 1e-11) {
        WickLedger led;
        led.N_ = N;
        led.beta_ = beta;
        led.T_ = T;
        led.steps_ = steps;
        led.eps_ = eps_list;
        const auto shells = detail::shells_for_cutoff(N);
        const double h = T / steps;
        led.sigma_.assign(eps_list.size(), std::vector<double>(std::size_t(steps) + 1, 0.0));
        for (std::size_t e = 0; e < eps_list.size(); ++e) {
            std::vector<double> shell_int(shells.b2.size(), 0.0);
            for (int j = 0; j < steps; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < shells.b2.size(); ++k) {
                    shell_int[k] += detail::kappa_sq_integral(eps_list[e], shells.b2[k], j * h,
                                                              (j + 1) * h, mode_tol);
                    acc += shells.chi2_weight[k] * shell_int[k];
                }
                led.sigma_[e][std::size_t(j) + 1] = acc / (4.0 * M_PI * M_PI);
            }
        }
        return led;
    }

    double cutoff() const { return N_; }
    double beta() const { return beta_; }
    int steps() const { return steps_; }
    double time_at(int j) const { return T_ * j / steps_; }
    const std::vector<double>& eps_list() const { return eps_; }

    double sigma(double eps, int j) const { return sigma_[eps_index(eps)][check_step(j)]; }

    double gamma(double eps, int j) const { return gamma_from_sigma(sigma(eps, j), beta_); }

    /// gamma = e^{beta^2 sigma / 2} with an explicit overflow guard.
    static double gamma_from_sigma(double sigma, double beta) {
        const double expo = 0.5 * beta * beta * sigma;
        if (expo > 700.0)
            throw std::overflow_error("gamma_renorm: exponent " + std::to_string(expo) +
                                      " exceeds overflow guard (beta^2 sigma/2 > 700)");
        return std::exp(expo);
    }

private:
    std::size_t eps_index(double eps) const {
        for (std::size_t e = 0; e < eps_.size(); ++e)
            if (eps_[e] == eps) return e;
        throw std::out_of_range("ledger: eps not tabulated");
    }
    std::size_t check_step(int j) const {
        if (j < 0 || j > steps_) throw std::out_of_range("ledger: step outside grid");
        return std::size_t(j);
    }

    double N_ = 0.0, beta_ = 0.0, T_ = 0.0;
    int steps_ = 0;
    std::vector<double> eps_;
    std::vector<std::vector<double>> sigma_;
};

inline double gamma_renorm(const WickLedger& ledger, double eps, int step) {
    return ledger.gamma(eps, step);
}

/// Wick power :Psi^l: = H_l(Psi(x); sigma), evaluated pointwise on the
/// (already zero-padded) grid and transformed back.
struct WickPowerField {
    int degree;
    std::vector<double> phys;
    SpectralField spectral;
};

inline WickPowerField wick_power(const SpectralField& psi, int degree, double sigma) {
    if (!psi.real_valued()) throw std::invalid_argument("wick_power: field must be real-tagged");
    if (degree < 0) throw std::invalid_argument("wick_power: degree must be >= 0");
    const int bw = bandwidth_inf(psi);
    if (degree >= 2 && (degree + 1) * bw >= psi.size())
        throw std::invalid_argument("wick_power: degree exceeds dealiasing capacity");
    WickPowerField out{degree, to_physical(psi), SpectralField(psi.lattice(), true)};
    if (degree == 1) {
        out.spectral = psi;
        return out;
    }
    std::vector<double> vals(out.phys.size());
    std::vector<double> ladder;
    for (std::size_t p = 0; p < out.phys.size(); ++p) {
        hermite_ladder(degree, out.phys[p], sigma, ladder);
        vals[p] = ladder[std::size_t(degree)];
    }
    out.phys = std::move(vals);
    out.spectral = from_physical(psi.lattice(), out.phys);
    return out;
}

/// Imaginary Gaussian multiplicative chaos Theta = gamma e^{i beta Psi},
/// pointwise; |Theta(x)| = gamma at every grid point.
struct GmcField {
    double beta, gamma;
    std::vector<cplx> phys;
    SpectralField spectral;  // complex-tagged
};

inline GmcField gmc_theta(const SpectralField& psi, double beta, double gamma) {
    if (!psi.real_valued()) throw std::invalid_argument("gmc_theta: field must be real-tagged");
    if (!(beta > 0.0)) throw std::invalid_argument("gmc_theta: beta must be positive");
    const auto p = to_physical(psi);
    GmcField out{beta, gamma, std::vector<cplx>(p.size()), SpectralField(psi.lattice(), false)};
    for (std::size_t k = 0; k < p.size(); ++k)
        out.phys[k] = gamma * std::exp(cplx{0.0, beta * p[k]});
    out.spectral = from_physical_complex(psi.lattice(), out.phys);
    return out;
}

}  // namespace skspec
