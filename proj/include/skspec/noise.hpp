#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cutoff.hpp"
#include "field.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "symbols.hpp"

namespace skspec {

/// Seeded cylindrical Wiener path on a uniform time grid, materialized
/// lazily: the increment of any (mode, step) is a pure function of
/// (seed, n, j), so coupling across eps values and across cutoffs N is
/// automatic and order-independent.
///
/// Var(Re dB_n) = Var(Im dB_n) = dt/2 for n != 0, Var(dB_0) = dt, and
/// dB_{-n} = conj(dB_n) exactly.
struct NoisePath {
    std::uint64_t seed;
    double T;
    int steps;

    double dt() const { return T / steps; }

    /// Standardized complex innovation pair shared by every state at (n, j).
    /// Component variances: E|z|^2 = 2 for n != 0 (unit per real part),
    /// and z real with E z^2 = 2 at n = 0.
    std::array<cplx, 2> innovations(int n1, int n2, std::uint32_t j) const {
        if (n1 == 0 && n2 == 0) {
            const auto q = normal_quad(seed, 0, 0, j);
            const double r2 = std::sqrt(2.0);
            return {cplx{r2 * q[0], 0.0}, cplx{r2 * q[1], 0.0}};
        }
        if (is_canonical(n1, n2)) {
            const auto q = normal_quad(seed, n1, n2, j);
            return {cplx{q[0], q[2]}, cplx{q[1], q[3]}};
        }
        const auto m = innovations(-n1, -n2, j);
        return {std::conj(m[0]), std::conj(m[1])};
    }

    /// Brownian increment dB_n over step j.
    cplx increment(int n1, int n2, std::uint32_t j) const {
        return std::sqrt(dt() / 2.0) * innovations(n1, n2, j)[0];
    }
};

inline NoisePath sample_path(std::uint64_t seed, double T, int steps) {
    if (steps < 1 || !(T > 0.0)) throw std::invalid_argument("sample_path: need K >= 1, T > 0");
    return NoisePath{seed, T, steps};
}

/// Debug dump of the increments on modes <n> <= limit:
/// CSV columns (j, t, n1, n2, dRe, dIm).
inline void dump_path_csv(const NoisePath& path, double limit, std::ostream& os) {
    os << "j,t,n1,n2,dRe,dIm\r\n";
    const int R = int(std::ceil(limit));
    char buf[128];
    for (int j = 0; j < path.steps; ++j)
        for (int n1 = -R; n1 <= R; ++n1)
            for (int n2 = -R; n2 <= R; ++n2) {
                if (bracket(n1, n2) > limit) continue;
                const cplx db = path.increment(n1, n2, std::uint32_t(j));
                std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%d,%.17g,%.17g\r\n", j,
                              path.dt() * (j + 1), n1, n2, db.real(), db.imag());
                os << buf;
            }
}

/// One-step covariance of the driven mode (position, velocity):
///   Q11 = int_0^h (eps^-2 Dhat)^2, Q12 = int eps^-4 Dhat Dhat', Q22 = int (eps^-2 Dhat')^2,
/// by adaptive quadrature (abs tol 1e-12).
struct TransitionCov {
    double q11, q12, q22;

    double trace() const { return q11 + q22; }
    double det() const { return q11 * q22 - q12 * q12; }
    double min_eigenvalue() const {
        const double tr = trace();
        const double disc = std::sqrt(std::max((q11 - q22) * (q11 - q22) + 4.0 * q12 * q12, 0.0));
        return 0.5 * (tr - disc);
    }
};

inline TransitionCov transition_cov(double eps, double nsq, double h, double abs_tol = 1e-12) {
    if (!(eps > 0.0) || !(h > 0.0))
        throw std::invalid_argument("transition_cov: requires eps > 0, h > 0");
    const double e2 = eps * eps;
    TransitionCov q;
    q.q11 = integrate([=](double s) { double d = dhat(eps, nsq, s) / e2; return d * d; }, 0.0, h, abs_tol);
    q.q12 = integrate([=](double s) { return dhat(eps, nsq, s) * dhat_dt(eps, nsq, s) / (e2 * e2); },
                      0.0, h, abs_tol);
    q.q22 = integrate([=](double s) { double d = dhat_dt(eps, nsq, s) / e2; return d * d; }, 0.0, h,
                      abs_tol);
    const double tol = 1e-12 * std::max(1.0, q.trace());
    if (q.min_eigenvalue() < -tol)
        throw std::runtime_error("transition_cov: covariance not PSD beyond tolerance");
    return q;
}

/// Symmetric PSD square root S of Q: S = (Q + sqrt(det) I)/sqrt(tr + 2 sqrt(det))
/// (Cayley-Hamilton), the unique PSD root; eigenvalues below the clip
/// tolerance are treated as quadrature noise and clipped at zero.
struct CovSqrt {
    double s11, s12, s22;
};

inline CovSqrt cov_sqrt(const TransitionCov& q) {
    const double tr = std::max(q.trace(), 0.0);
    const double det = std::max(q.det(), 0.0);
    const double rd = std::sqrt(det);
    const double denom = std::sqrt(tr + 2.0 * rd);
    if (denom == 0.0) return {0.0, 0.0, 0.0};
    return {(q.q11 + rd) / denom, q.q12 / denom, (q.q22 + rd) / denom};
}

/// Per-(eps, h) mode tables over the distinct <n>^2 values of the active
/// band: transition entries, noise square root, Duhamel weights. Immutable
/// after construction.
struct WaveTables {
    double eps, h;
    std::vector<double> m11, m12, m21, m22;
    std::vector<double> s11, s12, s22;
    std::vector<double> w_pos, w_vel;

    static WaveTables build(double eps, double h, const std::vector<double>& b2, bool with_duhamel) {
        WaveTables t;
        t.eps = eps;
        t.h = h;
        const std::size_t n = b2.size();
        t.m11.resize(n); t.m12.resize(n); t.m21.resize(n); t.m22.resize(n);
        t.s11.resize(n); t.s12.resize(n); t.s22.resize(n);
        t.w_pos.resize(n); t.w_vel.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto M = mode_transition(eps, b2[k], h);
            t.m11[k] = M.m11; t.m12[k] = M.m12; t.m21[k] = M.m21; t.m22[k] = M.m22;
            const auto S = cov_sqrt(transition_cov(eps, b2[k], h));
            t.s11[k] = S.s11; t.s12[k] = S.s12; t.s22[k] = S.s22;
            if (with_duhamel) {
                t.w_pos[k] = duhamel_weight(eps, b2[k], h);
                t.w_vel[k] = dhat(eps, b2[k], h) / (eps * eps);
            }
        }
        return t;
    }
};

struct HeatTables {
    double h;
    std::vector<double> decay;      // e^{-h <n>^2}
    std::vector<double> noise_std;  // sqrt((1 - e^{-2h<n>^2})/(2<n>^2)), complex total
    std::vector<double> w_pos;      // (1 - e^{-h<n>^2})/<n>^2

    static HeatTables build(double h, const std::vector<double>& b2) {
        HeatTables t;
        t.h = h;
        const std::size_t n = b2.size();
        t.decay.resize(n); t.noise_std.resize(n); t.w_pos.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            t.decay[k] = std::exp(-h * b2[k]);
            t.noise_std[k] = std::sqrt(-std::expm1(-2.0 * h * b2[k]) / (2.0 * b2[k]));
            t.w_pos[k] = -std::expm1(-h * b2[k]) / b2[k];
        }
        return t;
    }
};

/// The active band of a truncated convolution: modes with chi_N > 0, their
/// cutoff weights, the distinct <n>^2 table and conjugate pairing.
struct ActiveBand {
    FrequencyLattice lat;
    double N;
    std::vector<Mode> modes;
    std::vector<double> chi_w;
    std::vector<std::uint32_t> table_index;  // into b2_values
    std::vector<double> b2_values;           // distinct, ascending
    std::vector<std::size_t> mirror;         // position of -n in `modes`
    std::vector<bool> canonical;

    static std::shared_ptr<const ActiveBand> make(const FrequencyLattice& lat, double N) {
        return build(lat, N, cutoff_support(N), false);
    }

    /// Modes with <n> <= limit and unit weights: the raw (unprojected)
    /// convolution, from which any P_N truncation is a reweighting.
    static std::shared_ptr<const ActiveBand> make_sharp(const FrequencyLattice& lat, double limit) {
        return build(lat, limit, limit, true);
    }

private:
    static std::shared_ptr<const ActiveBand> build(const FrequencyLattice& lat, double N,
                                                   double limit, bool unit_weight) {
        auto band = std::make_shared<ActiveBand>(ActiveBand{lat, N, {}, {}, {}, {}, {}, {}});
        band->modes = modes_within(lat, limit);
        const SmoothCutoff cut;
        std::vector<double> b2(band->modes.size());
        for (std::size_t k = 0; k < band->modes.size(); ++k) {
            const auto& m = band->modes[k];
            band->chi_w.push_back(unit_weight ? 1.0 : cut.at_scale(bracket(m.n1, m.n2), N));
            b2[k] = bracket_sq(m.n1, m.n2);
        }
        // distinct <n>^2, ascending
        std::vector<double> uniq = b2;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        band->b2_values = uniq;
        band->table_index.resize(b2.size());
        for (std::size_t k = 0; k < b2.size(); ++k)
            band->table_index[k] = std::uint32_t(
                std::lower_bound(uniq.begin(), uniq.end(), b2[k]) - uniq.begin());
        // conjugate pairing
        std::vector<std::size_t> lookup(lat.point_count(), SIZE_MAX);
        for (std::size_t k = 0; k < band->modes.size(); ++k) lookup[band->modes[k].idx] = k;
        band->mirror.resize(band->modes.size());
        band->canonical.resize(band->modes.size());
        for (std::size_t k = 0; k < band->modes.size(); ++k) {
            const auto& m = band->modes[k];
            band->mirror[k] = lookup[lat.flat(-m.n1, -m.n2)];
            band->canonical[k] = is_canonical(m.n1, m.n2);
        }
        return band;
    }
};

/// State of one truncated stochastic convolution Psi_{eps,N}: compact
/// per-active-mode coefficients (position and, for eps > 0, velocity),
/// starting from zero data.
class ConvolutionState {
public:
    ConvolutionState(std::shared_ptr<const ActiveBand> band, double eps, double h)
        : band_(std::move(band)), eps_(eps), step_(0) {
        psi_.assign(band_->modes.size(), cplx{0.0, 0.0});
        if (eps_ > 0.0) {
            psidot_.assign(band_->modes.size(), cplx{0.0, 0.0});
            wave_ = std::make_shared<WaveTables>(WaveTables::build(eps_, h, band_->b2_values, false));
        } else {
            heat_ = std::make_shared<HeatTables>(HeatTables::build(h, band_->b2_values));
        }
    }

    /// Replica construction against prebuilt tables (seed sweeps share them).
    ConvolutionState(std::shared_ptr<const ActiveBand> band, double eps,
                     std::shared_ptr<WaveTables> wave, std::shared_ptr<HeatTables> heat)
        : band_(std::move(band)), eps_(eps), step_(0), wave_(std::move(wave)),
          heat_(std::move(heat)) {
        psi_.assign(band_->modes.size(), cplx{0.0, 0.0});
        if (eps_ > 0.0) {
            if (!wave_) throw std::invalid_argument("convolution state: missing wave tables");
            psidot_.assign(band_->modes.size(), cplx{0.0, 0.0});
        } else if (!heat_) {
            throw std::invalid_argument("convolution state: missing heat tables");
        }
    }

    double eps() const { return eps_; }
    int step_index() const { return step_; }
    const ActiveBand& band() const { return *band_; }
    const std::vector<cplx>& coeffs() const { return psi_; }
    const std::vector<cplx>& velocity() const { return psidot_; }

    /// Scatter to a full-lattice real-tagged field.
    SpectralField to_field() const {
        SpectralField f(band_->lat, true);
        for (std::size_t k = 0; k < band_->modes.size(); ++k)
            f.raw()[band_->modes[k].idx] = psi_[k];
        return f;
    }

    friend void advance_convolutions(std::vector<ConvolutionState*>& states, const NoisePath& path,
                                     std::uint32_t j);

private:
    std::shared_ptr<const ActiveBand> band_;
    double eps_;
    int step_;
    std::vector<cplx> psi_, psidot_;
    std::shared_ptr<WaveTables> wave_;
    std::shared_ptr<HeatTables> heat_;
};

/// Advances every state through step j with the same standardized
/// innovations; states may carry different eps but must share band and
/// clock. Mean update by the exact transition, fluctuation by the PSD
/// square root of the one-step covariance.
inline void advance_convolutions(std::vector<ConvolutionState*>& states, const NoisePath& path,
                                 std::uint32_t j) {
    if (states.empty()) return;
    const ActiveBand& band = *states.front()->band_;
    for (auto* s : states) {
        if (&s->band() != &band) throw std::invalid_argument("advance: band mismatch");
        if (s->step_ != int(j)) throw std::invalid_argument("advance: time mismatch");
    }
    const double comp = 1.0 / std::sqrt(2.0);  // per-component scaling of E|z|^2 = 2 innovations
    for (std::size_t k = 0; k < band.modes.size(); ++k) {
        if (!band.canonical[k]) continue;
        const auto& m = band.modes[k];
        const auto z = path.innovations(m.n1, m.n2, j);
        const std::size_t mir = band.mirror[k];
        const std::uint32_t ti = band.table_index[k];
        const double w = band.chi_w[k];
        for (auto* s : states) {
            if (s->eps_ > 0.0) {
                const auto& t = *s->wave_;
                const cplx p = s->psi_[k], q = s->psidot_[k];
                const cplx np = t.m11[ti] * p + t.m12[ti] * q +
                                w * comp * (t.s11[ti] * z[0] + t.s12[ti] * z[1]);
                const cplx nq = t.m21[ti] * p + t.m22[ti] * q +
                                w * comp * (t.s12[ti] * z[0] + t.s22[ti] * z[1]);
                s->psi_[k] = np;
                s->psidot_[k] = nq;
                s->psi_[mir] = std::conj(np);
                s->psidot_[mir] = std::conj(nq);
            } else {
                const auto& t = *s->heat_;
                const cplx np = t.decay[ti] * s->psi_[k] + w * comp * t.noise_std[ti] * z[0];
                s->psi_[k] = np;
                s->psi_[mir] = std::conj(np);
            }
        }
    }
    for (auto* s : states) ++s->step_;
}

/// Monte Carlo estimate of E[Psi_{eps,N}(0, t)^2] over independent seeds;
/// cross-validates the ledger's sigma_variance.
struct McEstimate {
    double mean;
    double stderr_;
};

inline McEstimate sigma_from_state_mc(double eps, double N, double t, int paths,
                                      const FrequencyLattice& lat, std::uint64_t seed0 = 1,
                                      int ksteps = 4) {
    if (paths < 100) throw std::invalid_argument("sigma_from_state_mc: need >= 100 paths");
    if (t == 0.0) return {0.0, 0.0};
    auto band = ActiveBand::make(lat, N);
    double acc = 0.0, acc2 = 0.0;
    for (int r = 0; r < paths; ++r) {
        NoisePath path{seed0 + std::uint64_t(r), t, ksteps};
        ConvolutionState st(band, eps, path.dt());
        std::vector<ConvolutionState*> one{&st};
        for (std::uint32_t j = 0; j < std::uint32_t(ksteps); ++j) advance_convolutions(one, path, j);
        cplx sum{0.0, 0.0};
        for (std::size_t k = 0; k < band->modes.size(); ++k) sum += st.coeffs()[k];
        const double val = sum.real() / (2.0 * M_PI);  // Psi(x=0)
        acc += val * val;
        acc2 += val * val * val * val;
    }
    const double mean = acc / paths;
    const double var = std::max(acc2 / paths - mean * mean, 0.0);
    return {mean, std::sqrt(var / paths)};
}

}  // namespace skspec
