#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "certificates.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "dynamics.hpp"
#include "kernels.hpp"
#include "metrics.hpp"

namespace skspec {

inline constexpr const char* kVersion = "0.1.0";

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    std::string detail;
};

struct RunManifest {
    std::string version = kVersion;
    std::string experiment;
    std::string config_hash_hex;
    std::vector<CheckResult> checks;
    double wall_ms = 0.0;
    std::vector<std::string> outputs;
    bool blow_up = false;
    int exit_code = 0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail_exp {

inline void write_text(const std::filesystem::path& dir, const std::string& name,
                       const std::string& body, RunManifest& man) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out.write(body.data(), std::streamsize(body.size()));
    man.outputs.push_back(name);
}

/// Deterministic replica dispatch: worker pool over seed indices, results
/// land in preallocated slots, aggregation order is by index.
template <class Fn>
void parallel_over(std::size_t count, int jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    const int n = std::min<int>(jobs, int(count));
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

/// Smooth deterministic band-limited real field: the "snapshot" input for
/// oracle runs (coefficients decay like e^{-<n>^2/2}).
inline SpectralField deterministic_snapshot(const FrequencyLattice& lat, std::uint64_t seed,
                                            double limit, double amp) {
    SpectralField f(lat, true);
    const int m = lat.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = lat.freq(i);
        for (int j = 0; j < m; ++j) {
            const int n2 = lat.freq(j);
            if (lat.is_nyquist(n1, n2) || !is_canonical(n1, n2)) continue;
            if (bracket(n1, n2) > limit) continue;
            const auto q = normal_quad(seed, n1, n2, 0, 100);
            const double decay = amp * std::exp(-0.5 * bracket_sq(n1, n2));
            if (n1 == 0 && n2 == 0)
                f.set(0, 0, cplx{q[0] * decay, 0.0});
            else
                f.set(n1, n2, decay * cplx{q[0], q[1]});
        }
    }
    return f;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail_exp

// ---------------------------------------------------------------------------
// symbols: audit CSV + the mul1-mul4 certificate constants
// ---------------------------------------------------------------------------

inline void run_symbols(const ExperimentConfig& cfg, const std::filesystem::path& out,
                        RunManifest& man) {
    CsvWriter csv({"eps", "n1", "n2", "t", "dhat", "dhat_dt", "combined", "heat"});
    const std::vector<std::pair<int, int>> modes{{0, 0}, {1, 0}, {1, 1},  {3, 4},
                                                 {8, 0}, {16, 16}, {32, 0}, {48, 31}};
    for (double eps : cfg.eps_list) {
        if (eps == 0.0) continue;  // heat column already carries the eps = 0 symbols
        for (const auto& [n1, n2] : modes)
            for (double t : cfg.times) {
                const double nsq = bracket_sq(n1, n2);
                csv.row({CsvWriter::num(eps), CsvWriter::num(n1), CsvWriter::num(n2),
                         CsvWriter::num(t), CsvWriter::num(dhat(eps, nsq, t)),
                         CsvWriter::num(dhat_dt(eps, nsq, t)),
                         CsvWriter::num(combined_symbol(eps, nsq, t)),
                         CsvWriter::num(heat_symbol(nsq, t))});
            }
    }
    detail_exp::write_text(out, "symbols.csv", csv.str(), man);

    CertificateGrid grid = CertificateGrid::defaults();
    grid.theta = cfg.tol("theta", 0.1);
    const auto certs = multiplier_certificates(grid);
    json jc = json::object();
    for (const auto& c : certs) {
        jc[c.name] = {{"constant", c.constant}, {"finite", c.finite}};
        man.checks.push_back({"certificate_" + c.name, c.finite, c.constant,
                              c.finite ? "finite" : "not finite"});
    }
    detail_exp::write_text(out, "certificates.json", jc.dump(2) + "\n", man);
}

// ---------------------------------------------------------------------------
// wick: sigma/gamma tables and the coupled Cauchy-in-N decay tables
// ---------------------------------------------------------------------------

struct CauchyTable {
    double eps;
    std::vector<double> n_small;
    std::vector<double> mean_diff;
    bool decreasing = false;
};

/// mean over seeds of || :Psi_N^2: - :Psi_{2N}^2: ||_{H^{-1/2}} at t = 1,
/// with nested cutoffs driven by the same innovations.
inline CauchyTable wick_cauchy_table(double eps, const std::vector<double>& cutoffs,
                                     const std::vector<std::uint64_t>& seeds, int jobs) {
    CauchyTable table;
    table.eps = eps;
    const double n_max = cutoffs.back();
    const int M = int(6.0 * n_max);  // degree-2 dealiasing for the largest band
    const FrequencyLattice lat(M);
    auto band = ActiveBand::make_sharp(lat, cutoff_support(n_max));
    const double t = 1.0;
    auto wave = eps > 0.0 ? std::make_shared<WaveTables>(
                                WaveTables::build(eps, t, band->b2_values, false))
                          : nullptr;
    auto heat = eps > 0.0 ? nullptr
                          : std::make_shared<HeatTables>(HeatTables::build(t, band->b2_values));
    std::vector<double> sigma_n;
    for (double N : cutoffs) sigma_n.push_back(sigma_variance(eps, N, t));

    const std::size_t pairs = cutoffs.size() - 1;
    std::vector<std::vector<double>> diffs(pairs, std::vector<double>(seeds.size(), 0.0));
    const SmoothCutoff cut;
    detail_exp::parallel_over(seeds.size(), jobs, [&](std::size_t s) {
        NoisePath path{seeds[s], t, 1};  // the one-step law is exact
        ConvolutionState st(band, eps, wave, heat);
        std::vector<ConvolutionState*> one{&st};
        advance_convolutions(one, path, 0);
        std::vector<SpectralField> wick2;
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            SpectralField f(lat, true);
            for (std::size_t k = 0; k < band->modes.size(); ++k) {
                const auto& m = band->modes[k];
                const double w = cut.at_scale(bracket(m.n1, m.n2), cutoffs[c]);
                if (w > 0.0) f.raw()[m.idx] = w * st.coeffs()[k];
            }
            wick2.push_back(wick_power(f, 2, sigma_n[c]).spectral);
        }
        for (std::size_t p = 0; p < pairs; ++p)
            diffs[p][s] = sobolev_norm(wick2[p] - wick2[p + 1], -0.5);
    });
    for (std::size_t p = 0; p < pairs; ++p) {
        double mean = 0.0;
        for (double d : diffs[p]) mean += d;
        table.n_small.push_back(cutoffs[p]);
        table.mean_diff.push_back(mean / double(seeds.size()));
    }
    table.decreasing = true;
    for (std::size_t p = 1; p < table.mean_diff.size(); ++p)
        if (!(table.mean_diff[p] < table.mean_diff[p - 1])) table.decreasing = false;
    return table;
}

/// Same telescoping comparison for Theta = gamma e^{i beta Psi}.
inline CauchyTable gmc_cauchy_table(double eps, double beta, const std::vector<double>& cutoffs,
                                    const std::vector<std::uint64_t>& seeds, int jobs) {
    CauchyTable table;
    table.eps = eps;
    const double n_max = cutoffs.back();
    const int M = int(8.0 * n_max);  // oversampling for the non-polynomial exponential
    const FrequencyLattice lat(M);
    auto band = ActiveBand::make_sharp(lat, cutoff_support(n_max));
    const double t = 1.0;
    auto wave = eps > 0.0 ? std::make_shared<WaveTables>(
                                WaveTables::build(eps, t, band->b2_values, false))
                          : nullptr;
    auto heat = eps > 0.0 ? nullptr
                          : std::make_shared<HeatTables>(HeatTables::build(t, band->b2_values));
    std::vector<double> gamma_n;
    for (double N : cutoffs)
        gamma_n.push_back(WickLedger::gamma_from_sigma(sigma_variance(eps, N, t), beta));

    const std::size_t pairs = cutoffs.size() - 1;
    std::vector<std::vector<double>> diffs(pairs, std::vector<double>(seeds.size(), 0.0));
    const SmoothCutoff cut;
    detail_exp::parallel_over(seeds.size(), jobs, [&](std::size_t s) {
        NoisePath path{seeds[s], t, 1};
        ConvolutionState st(band, eps, wave, heat);
        std::vector<ConvolutionState*> one{&st};
        advance_convolutions(one, path, 0);
        std::vector<SpectralField> theta;
        for (std::size_t c = 0; c < cutoffs.size(); ++c) {
            SpectralField f(lat, true);
            for (std::size_t k = 0; k < band->modes.size(); ++k) {
                const auto& m = band->modes[k];
                const double w = cut.at_scale(bracket(m.n1, m.n2), cutoffs[c]);
                if (w > 0.0) f.raw()[m.idx] = w * st.coeffs()[k];
            }
            theta.push_back(gmc_theta(f, beta, gamma_n[c]).spectral);
        }
        for (std::size_t p = 0; p < pairs; ++p)
            diffs[p][s] = sobolev_norm(theta[p] - theta[p + 1], -0.5);
    });
    for (std::size_t p = 0; p < pairs; ++p) {
        double mean = 0.0;
        for (double d : diffs[p]) mean += d;
        table.n_small.push_back(cutoffs[p]);
        table.mean_diff.push_back(mean / double(seeds.size()));
    }
    table.decreasing = true;
    for (std::size_t p = 1; p < table.mean_diff.size(); ++p)
        if (!(table.mean_diff[p] < table.mean_diff[p - 1])) table.decreasing = false;
    return table;
}

inline void run_wick(const ExperimentConfig& cfg, const std::filesystem::path& out,
                     RunManifest& man) {
    const double beta = cfg.model.beta;
    CsvWriter csv({"eps", "N", "t", "sigma", "gamma"});
    for (double eps : cfg.eps_list)
        for (double N : cfg.cutoffs)
            for (double t : cfg.times) {
                const double s = sigma_variance(eps, N, t);
                csv.row({CsvWriter::num(eps), CsvWriter::num(N), CsvWriter::num(t),
                         CsvWriter::num(s),
                         CsvWriter::num(WickLedger::gamma_from_sigma(s, beta))});
            }
    detail_exp::write_text(out, "wick.csv", csv.str(), man);

    CsvWriter cauchy({"kind", "eps", "N", "mean_diff"});
    for (double eps : cfg.eps_list) {
        const auto table = wick_cauchy_table(eps, cfg.cutoffs, cfg.seeds, cfg.jobs);
        for (std::size_t p = 0; p < table.n_small.size(); ++p)
            cauchy.row({"wick2", CsvWriter::num(eps), CsvWriter::num(table.n_small[p]),
                        CsvWriter::num(table.mean_diff[p])});
        man.checks.push_back({"wick2_cauchy_decreasing_eps_" + CsvWriter::num(eps),
                              table.decreasing, table.mean_diff.back(),
                              "mean differences over the cutoff ladder"});
    }
    // GMC ladder capped at half the top cutoff (the exponential needs 8N)
    std::vector<double> gmc_cutoffs(cfg.cutoffs.begin(), cfg.cutoffs.end());
    if (gmc_cutoffs.size() > 1) gmc_cutoffs.pop_back();
    const auto gmc = gmc_cauchy_table(0.0, beta, gmc_cutoffs, cfg.seeds, cfg.jobs);
    for (std::size_t p = 0; p < gmc.n_small.size(); ++p)
        cauchy.row({"gmc", CsvWriter::num(0.0), CsvWriter::num(gmc.n_small[p]),
                    CsvWriter::num(gmc.mean_diff[p])});
    man.checks.push_back(
        {"gmc_cauchy_decreasing", gmc.decreasing, gmc.mean_diff.back(), "eps = 0 ladder"});
    detail_exp::write_text(out, "wick_cauchy.csv", cauchy.str(), man);

    const double nmax = cfg.cutoffs.back();
    const double law = sigma_variance(0.0, nmax, 1.0) * 4.0 * M_PI / std::log(nmax);
    const double lo = cfg.tol("sigma_law_low", 0.85), hi = cfg.tol("sigma_law_high", 1.15);
    man.checks.push_back({"sigma_log_law", law >= lo && law <= hi, law,
                          "sigma(0,N,1) * 4pi / log N at N = " + CsvWriter::num(nmax)});
}

// ---------------------------------------------------------------------------
// cov: covariance bands against the potentials, kernel cross-checks
// ---------------------------------------------------------------------------

inline void run_cov(const ExperimentConfig& cfg, const std::filesystem::path& out,
                    RunManifest& man) {
    const double width_gate = cfg.tol("band_width", 3.0);
    const auto probes = default_probe_points();
    CsvWriter csv({"eps", "N", "t", "x1", "x2", "gamma", "model", "residual"});
    json bands = json::array();
    for (double eps : cfg.eps_list) {
        for (double N : cfg.cutoffs) {
            std::vector<double> model, computed;
            for (double t : cfg.times) {
                const auto gam = covariance_gamma_batch(eps, N, t, probes);
                for (std::size_t i = 0; i < probes.size(); ++i) {
                    const double m = -std::log(potential_J(eps, N, t, probes[i])) / (4.0 * M_PI);
                    model.push_back(m);
                    computed.push_back(gam[i]);
                    csv.row({CsvWriter::num(eps), CsvWriter::num(N), CsvWriter::num(t),
                             CsvWriter::num(probes[i][0]), CsvWriter::num(probes[i][1]),
                             CsvWriter::num(gam[i]), CsvWriter::num(m),
                             CsvWriter::num(gam[i] - m)});
                }
            }
            const auto band = band_certificate(model, computed, width_gate);
            bands.push_back({{"check", "cov_band"},
                             {"eps", eps},
                             {"N", N},
                             {"c1", band.c1},
                             {"c2", band.c2},
                             {"width", band.width()},
                             {"pass", band.pass}});
            man.checks.push_back({"cov_band_eps_" + CsvWriter::num(eps) + "_N_" + CsvWriter::num(N),
                                  band.pass, band.width(), "additive band width"});
        }
    }
    detail_exp::write_text(out, "cov.csv", csv.str(), man);

    // telescoped-projection certificate over consecutive cutoffs
    for (std::size_t c = 0; c + 1 < cfg.cutoffs.size(); ++c) {
        for (double eps : {0.0, 0.05}) {
            const auto rep = cov_difference_check(cfg.cutoffs[c], cfg.cutoffs[c + 1], eps, probes,
                                                  {0.1, 1.0});
            const double value = std::max(rep.constant_j1, rep.constant_j2);
            bands.push_back({{"check", "cov_difference"},
                             {"eps", eps},
                             {"N1", cfg.cutoffs[c]},
                             {"N2", cfg.cutoffs[c + 1]},
                             {"constant", value},
                             {"pass", rep.finite}});
            man.checks.push_back({"cov_difference_N_" + CsvWriter::num(cfg.cutoffs[c]) + "_eps_" +
                                      CsvWriter::num(eps),
                                  rep.finite, value, "scaled telescoping constant"});
        }
    }

    // Gamma_0 = P_N^2 H cross-check
    double worst = 0.0;
    {
        const double N = cfg.cutoffs.front(), t = 0.7;
        const std::vector<TorusPoint> pts{{0.1, 0.0}, {0.5, 0.4}, {M_PI / 2, 0.0},
                                          {1.0, -1.0}, {0.0, 2.0}};
        const auto gam = covariance_gamma_batch(0.0, N, t, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            worst = std::max(worst, std::abs(heat_green(t, pts[i], 64, N) - gam[i]));
    }
    man.checks.push_back({"heat_green_matches_gamma0", worst <= 1e-10, worst, "sup over 5 points"});
    bands.push_back({{"check", "heat_green"}, {"sup_diff", worst}, {"pass", worst <= 1e-10}});

    // Bessel kernel divergence exponent
    std::vector<std::pair<double, double>> pts;
    for (double r : {0.02, 0.04, 0.08}) pts.push_back({r, bessel_kernel(1.0, {r, 0.0}, 512)});
    const double slope = fit_rate(pts);
    man.checks.push_back({"bessel_alpha1_exponent", std::abs(slope + 1.0) <= 0.15, slope,
                          "log-log slope on dyadic radii"});
    bands.push_back({{"check", "bessel"}, {"slope", slope}, {"pass", std::abs(slope + 1.0) <= 0.15}});

    detail_exp::write_text(out, "cov.json", bands.dump(2) + "\n", man);
}

// ---------------------------------------------------------------------------
// sk-poly / sk-sine: the coupled Smoluchowski-Kramers runs
// ---------------------------------------------------------------------------

struct SkSeedResult {
    std::uint64_t seed = 0;
    bool aborted = false;
    double abort_t = 0.0;
    std::vector<double> sup_dist;            // one per nonzero eps, config order
    std::vector<double> u_norm, v_norm;      // per (step, eps) row-major trajectory norms
    std::vector<SpectralField> final_u;      // filled only when field dumps are requested
};

inline void run_sk(const ExperimentConfig& cfg, const std::filesystem::path& out,
                   RunManifest& man) {
    ModelConfig model = cfg.model;
    // nonzero eps in config order; the eps = 0 reference is solved alongside
    std::vector<double> eps_nz;
    for (double e : cfg.eps_list)
        if (e > 0.0) eps_nz.push_back(e);
    model.eps_list = eps_nz;
    model.eps_list.push_back(0.0);

    const WickLedger ledger = WickLedger::build(model.eps_list, model.N, model.T, model.steps,
                                                model.beta);

    std::vector<SkSeedResult> results(cfg.seeds.size());
    detail_exp::parallel_over(cfg.seeds.size(), cfg.jobs, [&](std::size_t s) {
        ModelConfig local = model;
        local.seed = cfg.seeds[s];
        SkSeedResult res;
        res.seed = cfg.seeds[s];
        res.sup_dist.assign(eps_nz.size(), 0.0);
        try {
            solve_model(
                local,
                [&](int j, double, const std::vector<StepView>& views) {
                    const SpectralField u0 = *views.back().psi + *views.back().v;
                    res.u_norm.push_back(sobolev_norm(u0, -0.25));
                    res.v_norm.push_back(sobolev_norm(*views.back().v, 0.5));
                    const bool keep = cfg.dump_fields && s == 0 && j == model.steps;
                    if (keep) res.final_u.clear();
                    for (std::size_t e = 0; e < eps_nz.size(); ++e) {
                        const SpectralField ue = *views[e].psi + *views[e].v;
                        res.u_norm.push_back(sobolev_norm(ue, -0.25));
                        res.v_norm.push_back(sobolev_norm(*views[e].v, 0.5));
                        res.sup_dist[e] =
                            std::max(res.sup_dist[e], sobolev_norm(ue - u0, -0.25));
                        if (keep) res.final_u.push_back(ue);
                    }
                    if (keep) res.final_u.push_back(u0);
                },
                &ledger);
        } catch (const BlowUpError& b) {
            res.aborted = true;
            res.abort_t = b.t;
        }
        results[s] = std::move(res);
    });

    std::sort(results.begin(), results.end(),
              [](const SkSeedResult& a, const SkSeedResult& b) { return a.seed < b.seed; });

    CsvWriter csv({"seed", "eps", "sup_dist", "aborted"});
    std::vector<double> mean(eps_nz.size(), 0.0);
    int alive = 0, monotone = 0, aborted = 0;
    for (const auto& r : results) {
        if (r.aborted) {
            ++aborted;
            csv.row({CsvWriter::num(r.seed), "", "", "1"});
            continue;
        }
        ++alive;
        bool mono = true;
        for (std::size_t e = 0; e < eps_nz.size(); ++e) {
            csv.row({CsvWriter::num(r.seed), CsvWriter::num(eps_nz[e]),
                     CsvWriter::num(r.sup_dist[e]), "0"});
            mean[e] += r.sup_dist[e];
            if (e > 0 && !(r.sup_dist[e] < r.sup_dist[e - 1])) mono = false;
        }
        if (mono) ++monotone;
    }
    for (auto& m : mean) m /= std::max(alive, 1);
    CsvWriter means({"eps", "mean_sup_dist"});
    for (std::size_t e = 0; e < eps_nz.size(); ++e)
        means.row({CsvWriter::num(eps_nz[e]), CsvWriter::num(mean[e])});
    const char* prefix = cfg.experiment == ExperimentKind::sk_sine ? "sk_sine" : "sk_poly";
    detail_exp::write_text(out, std::string(prefix) + "_distances.csv", csv.str(), man);
    detail_exp::write_text(out, std::string(prefix) + "_means.csv", means.str(), man);

    // per-step trajectory norms for the first completed seed
    for (const auto& r : results) {
        if (r.aborted) continue;
        CsvWriter traj({"eps", "t", "u_norm_hm025", "v_norm_h05"});
        const double h = model.T / model.steps;
        const std::size_t ncols = eps_nz.size() + 1;  // eps = 0 first
        for (std::size_t row = 0; row * ncols < r.u_norm.size(); ++row)
            for (std::size_t c = 0; c < ncols; ++c) {
                const double eps = c == 0 ? 0.0 : eps_nz[c - 1];
                traj.row({CsvWriter::num(eps), CsvWriter::num(h * double(row)),
                          CsvWriter::num(r.u_norm[row * ncols + c]),
                          CsvWriter::num(r.v_norm[row * ncols + c])});
            }
        detail_exp::write_text(out, std::string(prefix) + "_trajectory.csv", traj.str(), man);
        break;
    }

    if (cfg.dump_fields && !results.empty() && !results.front().final_u.empty()) {
        const auto& fields = results.front().final_u;
        for (std::size_t e = 0; e < fields.size(); ++e) {
            const double eps = e < eps_nz.size() ? eps_nz[e] : 0.0;
            std::ostringstream buf;
            write_field_binary(buf, fields[e]);
            char tag[32];
            std::snprintf(tag, sizeof tag, "%g", eps);
            detail_exp::write_text(out, std::string(prefix) + "_u_eps" + tag + ".sksf", buf.str(),
                                   man);
        }
    }

    const double mono_frac = alive > 0 ? double(monotone) / alive : 0.0;
    const double need_frac = cfg.tol("mono_fraction", 0.8);
    man.checks.push_back({"per_seed_strict_decrease", mono_frac >= need_frac, mono_frac,
                          std::to_string(monotone) + "/" + std::to_string(alive) + " seeds"});
    const double ratio = mean.front() > 0.0 ? mean.back() / mean.front() : 0.0;
    const double need_ratio = cfg.tol("mean_ratio", 0.5);
    man.checks.push_back({"mean_ratio", alive > 0 && ratio <= need_ratio, ratio,
                          "mean(eps=" + CsvWriter::num(eps_nz.back()) + ") / mean(eps=" +
                              CsvWriter::num(eps_nz.front()) + ")"});
    bool positive = alive > 0 && eps_nz.size() >= 3;
    for (double m : mean) positive = positive && m > 0.0;
    if (positive) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t e = 0; e < eps_nz.size(); ++e) pts.push_back({eps_nz[e], mean[e]});
        const double slope = fit_rate(pts);
        man.checks.push_back({"mean_distance_rate", slope > 0.0, slope,
                              "log-log slope of the seed-mean distance in eps"});
    }
    if (aborted > 0) man.blow_up = true;
}

// ---------------------------------------------------------------------------
// oracle: Picard fixed point against the exponential stepper
// ---------------------------------------------------------------------------

inline void run_oracle(const ExperimentConfig& cfg, const std::filesystem::path& out,
                       RunManifest& man) {
    // deterministic snapshot problem: k = 3, N = 8, T = 0.05
    ModelConfig model = cfg.model;
    if (model.N > 8.0) {  // oracle defaults are desk-sized
        model.N = 8.0;
        model.M = 64;
    }
    model.T = std::min(model.T, 0.05);
    const FrequencyLattice lat = model.lattice();
    const double N = model.N, T = model.T;
    const int k = model.k;
    const auto phi0 = detail_exp::deterministic_snapshot(lat, cfg.seeds.front(), 2.0 * N, 0.8);
    const auto phi1 = detail_exp::deterministic_snapshot(lat, cfg.seeds.front() + 1, 2.0 * N, 0.4);
    const auto xi_field =
        detail_exp::deterministic_snapshot(lat, cfg.seeds.front() + 2, 2.0 * N, 0.6);
    const auto xi_phys = to_physical(xi_field);
    const double sigma = 0.25;
    const InitialDataPair data(phi0, phi1);
    auto band = ActiveBand::make(lat, N);

    auto stepper = [&](double eps, int K) {
        const double h = T / K;
        auto slice = detail::enhance_physical(xi_phys, ModelKind::polynomial, k, 1.0, sigma, 1.0);
        RemainderState s(eps, truncate_bracket(phi0, cutoff_support(N)),
                         eps > 0.0 ? truncate_bracket(phi1, cutoff_support(N))
                                   : SpectralField(lat, true));
        std::shared_ptr<WaveTables> wave;
        std::shared_ptr<HeatTables> heat;
        if (eps > 0.0)
            wave = std::make_shared<WaveTables>(WaveTables::build(eps, h, band->b2_values, true));
        else
            heat = std::make_shared<HeatTables>(HeatTables::build(h, band->b2_values));
        for (int j = 0; j < K; ++j)
            s = step_remainder(s, slice, *band, wave.get(), heat.get(), ModelKind::polynomial, k,
                               1.0);
        return s.v;
    };

    CsvWriter csv({"eps", "check", "K", "value"});
    bool all_diff_ok = true;
    double worst_diff = 0.0;
    const double diff_gate = cfg.tol("oracle_diff", 1e-3);
    for (double eps : {0.2, 0.0}) {
        EnhancedData xi;
        const int Kp = 128;
        for (int j = 0; j <= Kp; ++j) {
            xi.times.push_back(T * j / Kp);
            xi.slices.push_back(
                detail::enhance_physical(xi_phys, ModelKind::polynomial, k, 1.0, sigma, 1.0));
        }
        const auto pic = picard_solve_local(eps, data, xi, ModelKind::polynomial, k, 1.0, N, 1e-9);
        const double diff = pic.converged
                                ? sobolev_norm(pic.v.back() - stepper(eps, 256), 0.5)
                                : std::numeric_limits<double>::infinity();
        csv.row({CsvWriter::num(eps), "picard_vs_stepper", CsvWriter::num(256),
                 CsvWriter::num(diff)});
        worst_diff = std::max(worst_diff, diff);
        all_diff_ok = all_diff_ok && pic.converged && diff <= diff_gate;
    }
    man.checks.push_back({"picard_vs_stepper", all_diff_ok, worst_diff,
                          "sup-H^{1/2} difference, gate " + CsvWriter::num(diff_gate)});

    // dt-refinement against a K = 512 reference
    const auto ref = stepper(0.2, 512);
    std::vector<std::pair<double, double>> pts;
    for (int K : {32, 64, 128}) {
        const double err = sobolev_norm(stepper(0.2, K) - ref, 0.5);
        pts.push_back({T / K, err});
        csv.row({CsvWriter::num(0.2), "self_convergence", CsvWriter::num(K), CsvWriter::num(err)});
    }
    const double slope = fit_rate(pts);
    const double lo = cfg.tol("slope_low", 0.8), hi = cfg.tol("slope_high", 1.3);
    man.checks.push_back({"self_convergence_slope", slope >= lo && slope <= hi, slope,
                          "log-log order of the frozen-force integrator"});
    detail_exp::write_text(out, "oracle.csv", csv.str(), man);
}

// ---------------------------------------------------------------------------

/// Executes the named experiment; writes outputs and the manifest; the exit
/// status encodes the taxonomy 0 pass / 2 scientific failure / 3 blow-up.
inline RunManifest run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.experiment = to_string(cfg.experiment);
    man.config_hash_hex = detail_exp::hash_hex(config_hash(cfg.canonical));
    const std::filesystem::path out(cfg.out_dir);

    switch (cfg.experiment) {
        case ExperimentKind::symbols: run_symbols(cfg, out, man); break;
        case ExperimentKind::wick: run_wick(cfg, out, man); break;
        case ExperimentKind::cov: run_cov(cfg, out, man); break;
        case ExperimentKind::sk_poly:
        case ExperimentKind::sk_sine: run_sk(cfg, out, man); break;
        case ExperimentKind::oracle: run_oracle(cfg, out, man); break;
    }

    man.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
    man.exit_code = man.blow_up ? 3 : (man.all_pass() ? 0 : 2);

    std::vector<std::string> inventory = man.outputs;
    inventory.push_back("manifest.json");
    json mj = {{"version", man.version},
               {"experiment", man.experiment},
               {"config_hash", man.config_hash_hex},
               {"wall_ms", man.wall_ms},
               {"blow_up", man.blow_up},
               {"exit_code", man.exit_code},
               {"outputs", inventory},
               {"checks", json::array()}};
    for (const auto& c : man.checks)
        mj["checks"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"detail", c.detail}});
    detail_exp::write_text(out, "manifest.json", mj.dump(2) + "\n", man);
    return man;
}

}  // namespace skspec
