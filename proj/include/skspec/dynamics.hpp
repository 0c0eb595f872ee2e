#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "field.hpp"
#include "hermite.hpp"
#include "noise.hpp"
#include "ops.hpp"
#include "symbols.hpp"
#include "transform.hpp"
#include "wick.hpp"

namespace skspec {

enum class ModelKind { polynomial, sine_gordon };

/// A remainder integration aborted on non-finite coefficients; carries the
/// failure location. Blow-up is a legitimate experiment outcome, not a bug.
struct BlowUpError : std::runtime_error {
    double eps;
    double t;
    int step;
    BlowUpError(double eps_, double t_, int step_)
        : std::runtime_error("blow-up detected at eps=" + std::to_string(eps_) +
                             ", t=" + std::to_string(t_)),
          eps(eps_), t(t_), step(step_) {}
};

/// Simulation parameters for one coupled eps-family run.
struct ModelConfig {
    ModelKind model = ModelKind::polynomial;
    int k = 3;                     // polynomial degree
    double beta = std::sqrt(M_PI); // sine-Gordon frequency
    std::vector<double> eps_list;  // may contain 0
    double N = 8.0;                // smooth cutoff
    int M = 64;                    // grid points per axis
    double T = 0.1;
    int steps = 16;
    std::uint64_t seed = 1;
    std::vector<std::pair<std::pair<int, int>, cplx>> phi0_modes;  // coefficient directives
    std::vector<std::pair<std::pair<int, int>, cplx>> phi1_modes;

    struct Validation {
        std::vector<std::string> errors;
        std::vector<std::string> warnings;
        bool ok() const { return errors.empty(); }
    };

    Validation validate() const {
        Validation v;
        if (M < 8 || M % 2 != 0) v.errors.push_back("M must be even and >= 8");
        if (!(N > 0.0)) v.errors.push_back("N must be positive");
        if (!(T > 0.0)) v.errors.push_back("T must be positive");
        if (steps < 1) v.errors.push_back("steps must be >= 1");
        if (eps_list.empty()) v.errors.push_back("eps list must not be empty");
        for (double e : eps_list)
            if (e < 0.0) v.errors.push_back("eps values must be >= 0");
        if (model == ModelKind::polynomial) {
            if (k < 2) v.errors.push_back("polynomial degree k must be >= 2");
            if (double(M) < (k + 1) * 2.0 * N)
                v.errors.push_back("dealiasing: need M >= (k+1)*2N = " +
                                   std::to_string((k + 1) * 2.0 * N));
            if (k % 2 == 0)
                v.warnings.push_back("even k: finite-time blow-up is a possible outcome");
        } else {
            if (!(beta > 0.0)) v.errors.push_back("beta must be positive");
            if (beta * beta >= 4.0 * M_PI)
                v.errors.push_back("beta^2 must be below the 4*pi cap");
            else if (beta * beta > 2.0 * M_PI)
                v.warnings.push_back("beta^2 above 2*pi: outside the GWP range of the sine model");
            if (double(M) < 8.0 * N)
                v.errors.push_back("sine-Gordon oversampling: need M >= 8N");
        }
        // regularity thresholds are advisory: truncated data is smooth
        if (model == ModelKind::polynomial && k >= 2)
            v.warnings.push_back("data regularity threshold s > (2k-3)/(2k-2) = " +
                                 std::to_string((2.0 * k - 3.0) / (2.0 * k - 2.0)) +
                                 " (advisory)");
        if (model == ModelKind::sine_gordon && beta > 0.0)
            v.warnings.push_back("data regularity threshold s > 1 - beta^2/(4 pi) = " +
                                 std::to_string(1.0 - beta * beta / (4.0 * M_PI)) +
                                 " (advisory)");
        return v;
    }

    FrequencyLattice lattice() const { return FrequencyLattice(M); }

    SpectralField build_phi(const std::vector<std::pair<std::pair<int, int>, cplx>>& modes) const {
        SpectralField f(lattice(), true);
        for (const auto& [nm, c] : modes) f.set(nm.first, nm.second, c);
        return f;
    }
    SpectralField phi0() const { return build_phi(phi0_modes); }
    SpectralField phi1() const { return build_phi(phi1_modes); }
};

/// Enhanced data at one time: the renormalized stochastic inputs the
/// deterministic remainder solver consumes, in physical space.
/// Polynomial model: xi[l], l = 0..k, are :Psi^l:(x); the implicit
/// xi_0 == 1 is materialized so a fully zeroed slice switches the
/// nonlinearity off (linear consistency tests).
/// Sine-Gordon: theta(x) = gamma e^{i beta Psi(x)}.
struct EnhancedSlice {
    std::vector<std::vector<double>> xi;  // [l][grid]
    std::vector<cplx> theta;
};

/// Time-indexed enhanced data over a stored Psi trajectory.
struct EnhancedData {
    std::vector<double> times;
    std::vector<EnhancedSlice> slices;
};

namespace detail {

inline EnhancedSlice enhance_physical(const std::vector<double>& psi_phys, ModelKind model, int k,
                                      double beta, double sigma, double gamma) {
    EnhancedSlice out;
    if (model == ModelKind::polynomial) {
        out.xi.assign(std::size_t(k) + 1, std::vector<double>(psi_phys.size()));
        std::vector<double> ladder;
        for (std::size_t p = 0; p < psi_phys.size(); ++p) {
            hermite_ladder(k, psi_phys[p], sigma, ladder);
            for (int l = 0; l <= k; ++l) out.xi[std::size_t(l)][p] = ladder[std::size_t(l)];
        }
    } else {
        out.theta.resize(psi_phys.size());
        for (std::size_t p = 0; p < psi_phys.size(); ++p)
            out.theta[p] = gamma * std::exp(cplx{0.0, beta * psi_phys[p]});
    }
    return out;
}

}  // namespace detail

/// Wick powers (or Theta) of a stored Psi trajectory, evaluated at every
/// stored time against the ledger.
inline EnhancedData build_enhanced_data(const std::vector<SpectralField>& psi_traj,
                                        const WickLedger& ledger, double eps, ModelKind model,
                                        int k, double beta) {
    if (int(psi_traj.size()) != ledger.steps() + 1)
        throw std::invalid_argument("build_enhanced_data: ledger does not cover the trajectory");
    EnhancedData out;
    for (int j = 0; j < int(psi_traj.size()); ++j) {
        const double sigma = ledger.sigma(eps, j);
        const double gamma =
            model == ModelKind::sine_gordon ? ledger.gamma(eps, j) : 1.0;
        out.times.push_back(ledger.time_at(j));
        out.slices.push_back(
            detail::enhance_physical(to_physical(psi_traj[std::size_t(j)]), model, k, beta, sigma, gamma));
    }
    return out;
}

/// Remainder state: v (and eps^2-weighted velocity for eps > 0) as
/// full-lattice fields, supported on the active band.
struct RemainderState {
    double eps;
    SpectralField v;
    SpectralField vdot;

    RemainderState(double eps_, SpectralField v0, SpectralField v1)
        : eps(eps_), v(std::move(v0)), vdot(std::move(v1)) {}
};

namespace detail {

/// G(x) = -sum_{l=0}^{k} C(k,l) xi_l(x) v(x)^{k-l}, or
/// G(x) = -Im(e^{i beta z(x)} Theta(x)) for the sine model.
inline std::vector<double> frozen_force(const EnhancedSlice& xi, const std::vector<double>& v_phys,
                                        ModelKind model, int k, double beta) {
    std::vector<double> g(v_phys.size());
    if (model == ModelKind::polynomial) {
        std::vector<double> binom(std::size_t(k) + 1);
        for (int l = 0; l <= k; ++l) binom[std::size_t(l)] = binomial(k, l);
        for (std::size_t p = 0; p < v_phys.size(); ++p) {
            const double v = v_phys[p];
            double pw = 1.0;  // v^{k-l} built downward from l = k
            double acc = xi.xi[std::size_t(k)][p];
            for (int l = k - 1; l >= 0; --l) {
                pw *= v;
                acc += binom[std::size_t(l)] * xi.xi[std::size_t(l)][p] * pw;
            }
            g[p] = -acc;
        }
    } else {
        for (std::size_t p = 0; p < v_phys.size(); ++p)
            g[p] = -(std::exp(cplx{0.0, beta * v_phys[p]}) * xi.theta[p]).imag();
    }
    return g;
}

inline void check_finite(const RemainderState& s, double t, int step) {
    for (const auto& c : s.v.raw())
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw BlowUpError(s.eps, t, step);
}

}  // namespace detail

/// One frozen-force exponential-integrator step: the linear flow is exact
/// per mode, the nonlinearity G (from the enhanced data at t_j) enters with
/// the Duhamel weights.
inline RemainderState step_remainder(const RemainderState& state, const EnhancedSlice& xi,
                                     const ActiveBand& band, const WaveTables* wave,
                                     const HeatTables* heat, ModelKind model, int k, double beta) {
    const auto v_phys = to_physical(state.v);
    const auto g = detail::frozen_force(xi, v_phys, model, k, beta);
    SpectralField gs = from_physical(state.v.lattice(), g);
    RemainderState next(state.eps, SpectralField(state.v.lattice(), true),
                        SpectralField(state.v.lattice(), true));
    for (std::size_t m = 0; m < band.modes.size(); ++m) {
        const std::size_t idx = band.modes[m].idx;
        const std::uint32_t ti = band.table_index[m];
        const cplx gh = gs.raw()[idx];
        if (state.eps > 0.0) {
            const cplx p = state.v.raw()[idx], q = state.vdot.raw()[idx];
            next.v.raw()[idx] = wave->m11[ti] * p + wave->m12[ti] * q + wave->w_pos[ti] * gh;
            next.vdot.raw()[idx] = wave->m21[ti] * p + wave->m22[ti] * q + wave->w_vel[ti] * gh;
        } else {
            next.v.raw()[idx] = heat->decay[ti] * state.v.raw()[idx] + heat->w_pos[ti] * gh;
        }
    }
    return next;
}

/// Per-step view handed to observers: psi, v, and the assembly u = psi + v.
struct StepView {
    double eps;
    const SpectralField* psi;
    const SpectralField* v;
    SpectralField u() const { return *psi + *v; }
};

using StepObserver = std::function<void(int step, double t, const std::vector<StepView>&)>;

/// Time-indexed solution of one eps: Psi, v, and u = Psi + v per step.
struct Trajectory {
    double eps;
    std::vector<double> times;
    std::vector<SpectralField> psi, v, u;
};

/// Simulates the coupled eps-family: one noise path drives every eps, the
/// enhanced data is rebuilt each step from the ledger, and the remainder is
/// advanced by the exponential integrator. The observer sees every step
/// (including step 0); deterministic given config + seed.
inline void solve_model(const ModelConfig& config, const StepObserver& observe,
                        const WickLedger* shared_ledger = nullptr) {
    const auto validation = config.validate();
    if (!validation.ok())
        throw std::invalid_argument("solve_model: invalid config: " + validation.errors.front());

    const FrequencyLattice lat = config.lattice();
    auto band = ActiveBand::make(lat, config.N);
    const double h = config.T / config.steps;
    const NoisePath path{config.seed, config.T, config.steps};

    // the ledger is seed-independent; sweeps over seeds share one build
    const WickLedger ledger =
        shared_ledger ? *shared_ledger
                      : WickLedger::build(config.eps_list, config.N, config.T, config.steps,
                                          config.beta);

    // Galerkin truncation: data and dynamics live on the active band
    const SpectralField phi0 = truncate_bracket(config.phi0(), cutoff_support(config.N));
    const SpectralField phi1 = truncate_bracket(config.phi1(), cutoff_support(config.N));

    std::vector<std::unique_ptr<ConvolutionState>> conv;
    std::vector<ConvolutionState*> conv_ptrs;
    std::vector<RemainderState> rem;
    std::vector<std::shared_ptr<WaveTables>> wave;
    std::vector<std::shared_ptr<HeatTables>> heat;
    for (double eps : config.eps_list) {
        conv.push_back(std::make_unique<ConvolutionState>(band, eps, h));
        conv_ptrs.push_back(conv.back().get());
        rem.emplace_back(eps, phi0, eps > 0.0 ? phi1 : SpectralField(lat, true));
        if (eps > 0.0) {
            wave.push_back(std::make_shared<WaveTables>(
                WaveTables::build(eps, h, band->b2_values, true)));
            heat.push_back(nullptr);
        } else {
            wave.push_back(nullptr);
            heat.push_back(std::make_shared<HeatTables>(HeatTables::build(h, band->b2_values)));
        }
    }

    std::vector<SpectralField> psi_fields;
    auto emit = [&](int j) {
        psi_fields.clear();
        std::vector<StepView> views;
        for (std::size_t e = 0; e < conv.size(); ++e) psi_fields.push_back(conv[e]->to_field());
        for (std::size_t e = 0; e < conv.size(); ++e)
            views.push_back({config.eps_list[e], &psi_fields[e], &rem[e].v});
        observe(j, h * j, views);
    };

    emit(0);
    for (int j = 0; j < config.steps; ++j) {
        // enhanced data at t_j (frozen over the step), then advance both parts
        std::vector<RemainderState> next;
        for (std::size_t e = 0; e < conv.size(); ++e) {
            const double eps = config.eps_list[e];
            const double sigma = ledger.sigma(eps, j);
            const double gamma =
                config.model == ModelKind::sine_gordon ? ledger.gamma(eps, j) : 1.0;
            const auto psi_phys = to_physical(conv[e]->to_field());
            const auto slice = detail::enhance_physical(psi_phys, config.model, config.k,
                                                        config.beta, sigma, gamma);
            next.push_back(step_remainder(rem[e], slice, *band, wave[e].get(), heat[e].get(),
                                          config.model, config.k, config.beta));
            detail::check_finite(next.back(), h * (j + 1), j + 1);
        }
        advance_convolutions(conv_ptrs, path, std::uint32_t(j));
        rem = std::move(next);
        emit(j + 1);
    }
}

/// Convenience overload collecting full trajectories (small runs only).
inline std::vector<Trajectory> solve_model(const ModelConfig& config,
                                           const WickLedger* shared_ledger = nullptr) {
    std::vector<Trajectory> out;
    for (double eps : config.eps_list) out.push_back(Trajectory{eps, {}, {}, {}, {}});
    solve_model(
        config,
        [&](int, double t, const std::vector<StepView>& views) {
            for (std::size_t e = 0; e < views.size(); ++e) {
                out[e].times.push_back(t);
                out[e].psi.push_back(*views[e].psi);
                out[e].v.push_back(*views[e].v);
                out[e].u.push_back(views[e].u());
            }
        },
        shared_ledger);
    return out;
}

// ---------------------------------------------------------------------------
// Picard oracle
// ---------------------------------------------------------------------------

struct PicardResult {
    bool converged;
    int iterations;
    double final_delta;
    std::vector<double> times;
    std::vector<SpectralField> v;
};

/// Fixed-point iteration of the Duhamel map on the stored grid:
///   v -> P_eps(phi0, phi1) - I_eps(sum_l C(k,l) Xi_l v^{k-l})
/// with I_eps by composite trapezoid over the grid and the exact mode-wise
/// kernel. Stops when successive iterates differ by < tol in sup-over-time
/// H^{1/2}; iterate growth past the cap reports non-contraction.
inline PicardResult picard_solve_local(double eps, const InitialDataPair& data,
                                       const EnhancedData& xi, ModelKind model, int k, double beta,
                                       double N, double tol, int cap = 50) {
    const FrequencyLattice lat = data.phi0.lattice();
    auto band = ActiveBand::make(lat, N);
    const int K = int(xi.times.size()) - 1;
    if (K < 1) throw std::invalid_argument("picard: need at least two grid times");
    const double h = xi.times[1] - xi.times[0];

    // kernel[lag][shell]: eps^{-2} Dhat(n, lag*h) or heat decay
    std::vector<std::vector<double>> kernel(std::size_t(K) + 1);
    for (int lag = 0; lag <= K; ++lag) {
        kernel[std::size_t(lag)].resize(band->b2_values.size());
        for (std::size_t s = 0; s < band->b2_values.size(); ++s)
            kernel[std::size_t(lag)][s] =
                eps > 0.0 ? dhat(eps, band->b2_values[s], lag * h) / (eps * eps)
                          : heat_symbol(band->b2_values[s], lag * h);
    }

    // linear part P_eps(phi)(t_j), fixed across iterations
    const SpectralField phi0 = truncate_bracket(data.phi0, cutoff_support(N));
    const SpectralField phi1 = truncate_bracket(data.phi1, cutoff_support(N));
    const InitialDataPair trunc(phi0, phi1);
    std::vector<SpectralField> lin;
    for (int j = 0; j <= K; ++j) lin.push_back(apply_P_eps(trunc, eps, xi.times[std::size_t(j)]));

    std::vector<SpectralField> v = lin;
    PicardResult res{false, 0, 0.0, xi.times, {}};
    double prev_delta = std::numeric_limits<double>::infinity();
    int growth_streak = 0;
    for (int it = 1; it <= cap; ++it) {
        // F(s_i) in spectral form
        std::vector<SpectralField> f;
        for (int i = 0; i <= K; ++i) {
            const auto v_phys = to_physical(v[std::size_t(i)]);
            auto g = detail::frozen_force(xi.slices[std::size_t(i)], v_phys, model, k, beta);
            for (auto& x : g) x = -x;  // frozen_force returns -F
            f.push_back(from_physical(lat, g));
        }
        std::vector<SpectralField> vn;
        double delta = 0.0;
        for (int j = 0; j <= K; ++j) {
            SpectralField acc = lin[std::size_t(j)];
            for (int i = 0; j > 0 && i <= j; ++i) {
                const double wq = (i == 0 || i == j) ? 0.5 * h : h;
                const auto& ker = kernel[std::size_t(j - i)];
                for (std::size_t m = 0; m < band->modes.size(); ++m) {
                    const std::size_t idx = band->modes[m].idx;
                    acc.raw()[idx] -= wq * ker[band->table_index[m]] * f[std::size_t(i)].raw()[idx];
                }
            }
            delta = std::max(delta, sobolev_norm(acc - v[std::size_t(j)], 0.5));
            vn.push_back(std::move(acc));
        }
        v = std::move(vn);
        res.iterations = it;
        res.final_delta = delta;
        if (delta < tol) {
            res.converged = true;
            break;
        }
        if (delta > prev_delta) {
            if (++growth_streak >= 3) break;  // non-contraction
        } else {
            growth_streak = 0;
        }
        prev_delta = delta;
    }
    res.v = std::move(v);
    return res;
}

}  // namespace skspec
