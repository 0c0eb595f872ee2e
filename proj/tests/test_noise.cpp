#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "skspec/noise.hpp"
#include "skspec/ops.hpp"
#include "skspec/wick.hpp"

using namespace skspec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("noise path determinism and symmetry") {
    const auto path = sample_path(42, 1.0, 8);
    const auto again = sample_path(42, 1.0, 8);

    SECTION("same seed twice is bitwise identical") {
        for (int j = 0; j < 8; ++j)
            for (int n1 = -3; n1 <= 3; ++n1)
                for (int n2 = -3; n2 <= 3; ++n2)
                    CHECK(path.increment(n1, n2, j) == again.increment(n1, n2, j));
    }

    SECTION("conjugate pairing is exact") {
        for (int j = 0; j < 8; ++j)
            for (int n1 = -3; n1 <= 3; ++n1)
                for (int n2 = -3; n2 <= 3; ++n2)
                    CHECK(path.increment(-n1, -n2, j) == std::conj(path.increment(n1, n2, j)));
    }

    SECTION("zero mode increments are real with variance dt") {
        const int draws = 100000;
        double acc = 0.0;
        for (int j = 0; j < draws; ++j) {
            const auto db = path.increment(0, 0, j);
            CHECK(db.imag() == 0.0);
            acc += db.real() * db.real();
        }
        const double dt = path.dt();
        const double est = acc / draws;
        const double five_sigma = 5.0 * dt * std::sqrt(2.0 / draws);
        CHECK_THAT(est, WithinAbs(dt, five_sigma));
    }

    SECTION("nonzero mode: Re and Im each carry variance dt/2") {
        const int draws = 100000;
        double acc_re = 0.0, acc_im = 0.0, acc_cross = 0.0;
        for (int j = 0; j < draws; ++j) {
            const auto db = path.increment(2, -1, j);
            acc_re += db.real() * db.real();
            acc_im += db.imag() * db.imag();
            acc_cross += db.real() * db.imag();
        }
        const double half = path.dt() / 2.0;
        const double five_sigma = 5.0 * half * std::sqrt(2.0 / draws);
        CHECK_THAT(acc_re / draws, WithinAbs(half, five_sigma));
        CHECK_THAT(acc_im / draws, WithinAbs(half, five_sigma));
        CHECK_THAT(acc_cross / draws, WithinAbs(0.0, five_sigma));
    }
}

TEST_CASE("transition covariance") {
    SECTION("short-step scaling: Q11 = h^3/(3 eps^4) + O(h^4)") {
        const double eps = 0.4;
        for (double h : {1e-3, 5e-4}) {
            const auto q = transition_cov(eps, 2.0, h);
            CHECK_THAT(q.q11, WithinRel(h * h * h / (3.0 * std::pow(eps, 4)), 1e-2));
        }
    }

    SECTION("Cauchy-Schwarz across a parameter grid") {
        for (double eps : {0.1, 0.3, 0.7})
            for (double nsq : {1.0, 9.0, 30.0})
                for (double h : {0.01, 0.2, 1.0}) {
                    const auto q = transition_cov(eps, nsq, h);
                    CHECK(q.q12 * q.q12 <= q.q11 * q.q22 * (1.0 + 1e-10) + 1e-300);
                    CHECK(q.min_eigenvalue() >= -1e-12 * std::max(1.0, q.trace()));
                }
    }

    SECTION("stationary variance: Q11(infinity) = 1/(2<n>^2)") {
        // eps = 0.5, n = 0: int_0^inf (4 s e^{-2s})^2 ds = 1/2
        CHECK_THAT(transition_cov(0.5, 1.0, 50.0).q11, WithinAbs(0.5, 1e-10));
        CHECK_THAT(transition_cov(0.2, 5.0, 50.0).q11, WithinAbs(0.1, 1e-10));
    }

    SECTION("Q12 closed form: eps^{-4} Dhat(h)^2 / 2") {
        for (double eps : {0.2, 0.6})
            for (double nsq : {1.0, 12.0})
                for (double h : {0.1, 0.7}) {
                    const double d = dhat(eps, nsq, h);
                    CHECK_THAT(transition_cov(eps, nsq, h).q12,
                               WithinAbs(0.5 * d * d / std::pow(eps, 4), 1e-10));
                }
    }

    SECTION("cov_sqrt squares back to Q") {
        const auto q = transition_cov(0.25, 5.0, 0.3);
        const auto s = cov_sqrt(q);
        CHECK_THAT(s.s11 * s.s11 + s.s12 * s.s12, WithinRel(q.q11, 1e-10));
        CHECK_THAT(s.s11 * s.s12 + s.s12 * s.s22, WithinRel(q.q12, 1e-10));
        CHECK_THAT(s.s12 * s.s12 + s.s22 * s.s22, WithinRel(q.q22, 1e-10));
    }
}

TEST_CASE("advance_convolutions statistics") {
    FrequencyLattice lat(16);

    SECTION("coupling sanity: identical eps gives identical trajectories") {
        auto band = ActiveBand::make(lat, 3.0);
        NoisePath path{7, 0.5, 4};
        ConvolutionState a(band, 0.2, path.dt()), b(band, 0.2, path.dt()), c(band, 0.0, path.dt());
        std::vector<ConvolutionState*> all{&a, &b, &c};
        for (std::uint32_t j = 0; j < 4; ++j) advance_convolutions(all, path, j);
        for (std::size_t k = 0; k < a.coeffs().size(); ++k) {
            CHECK(a.coeffs()[k] == b.coeffs()[k]);
        }
        // off-band modes stay exactly zero
        const auto f = a.to_field();
        CHECK(f.at(7, 0) == cplx{0.0, 0.0});
        CHECK(f.hermitian_defect() == 0.0);
    }

    SECTION("heat OU variance law at the zero mode") {
        // E|Psi_0(0, t)|^2 = (1 - e^{-2t})/2
        const double T = 1.0;
        const int paths = 10000;
        auto band = ActiveBand::make(lat, 1.0);  // tiny band containing n = 0
        double acc = 0.0, acc2 = 0.0;
        for (int r = 0; r < paths; ++r) {
            NoisePath path{std::uint64_t(1000 + r), T, 2};
            ConvolutionState st(band, 0.0, path.dt());
            std::vector<ConvolutionState*> one{&st};
            advance_convolutions(one, path, 0);
            advance_convolutions(one, path, 1);
            double v = 0.0;
            for (std::size_t k = 0; k < band->modes.size(); ++k)
                if (band->modes[k].n1 == 0 && band->modes[k].n2 == 0)
                    v = std::norm(st.coeffs()[k]);
            acc += v;
            acc2 += v * v;
        }
        const double mean = acc / paths;
        const double expect = -std::expm1(-2.0 * T) / 2.0;
        const double se = std::sqrt(std::max(acc2 / paths - mean * mean, 0.0) / paths);
        CHECK_THAT(mean, WithinAbs(expect, 5.0 * se));
    }

    SECTION("mode marginals are exact and step-count independent") {
        // E|Psi-hat(n, T)|^2 = chi^2 int_0^T kappa^2, for K = 4 and K = 64
        const double eps = 0.3, N = 3.0, T = 0.5;
        auto band = ActiveBand::make(lat, N);
        const int n1 = 2, n2 = 1;
        std::size_t target = SIZE_MAX;
        for (std::size_t k = 0; k < band->modes.size(); ++k)
            if (band->modes[k].n1 == n1 && band->modes[k].n2 == n2) target = k;
        REQUIRE(target != SIZE_MAX);
        const double chi_w = band->chi_w[target];
        const double expect = chi_w * chi_w *
                              detail::kappa_sq_integral(eps, bracket_sq(n1, n2), 0.0, T, 1e-12);
        const int paths = 8000;
        for (int K : {4, 64}) {
            double acc = 0.0, acc2 = 0.0;
            for (int r = 0; r < paths; ++r) {
                NoisePath path{std::uint64_t(50000 + r), T, K};
                ConvolutionState st(band, eps, path.dt());
                std::vector<ConvolutionState*> one{&st};
                for (std::uint32_t j = 0; j < std::uint32_t(K); ++j)
                    advance_convolutions(one, path, j);
                const double v = std::norm(st.coeffs()[target]);
                acc += v;
                acc2 += v * v;
            }
            const double mean = acc / paths;
            const double se = std::sqrt(std::max(acc2 / paths - mean * mean, 0.0) / paths);
            INFO("K = " << K);
            CHECK_THAT(mean, WithinAbs(expect, 5.0 * se));
        }
    }

    SECTION("spatial stationarity of the pointwise variance") {
        const double T = 0.5, N = 3.0;
        const int paths = 4000;
        auto band = ActiveBand::make(lat, N);
        const std::array<std::pair<int, int>, 5> pts{{{0, 0}, {3, 0}, {0, 7}, {5, 11}, {9, 2}}};
        std::array<double, 5> acc{}, acc2{};
        for (int r = 0; r < paths; ++r) {
            NoisePath path{std::uint64_t(90000 + r), T, 2};
            ConvolutionState st(band, 0.1, path.dt());
            std::vector<ConvolutionState*> one{&st};
            advance_convolutions(one, path, 0);
            advance_convolutions(one, path, 1);
            const auto phys = to_physical(st.to_field());
            for (std::size_t p = 0; p < pts.size(); ++p) {
                const double v = phys[std::size_t(pts[p].first) * 16 + pts[p].second];
                acc[p] += v * v;
                acc2[p] += v * v * v * v;
            }
        }
        const double mean0 = acc[0] / paths;
        for (std::size_t p = 1; p < pts.size(); ++p) {
            const double mean = acc[p] / paths;
            const double se = std::sqrt(std::max(acc2[p] / paths - mean * mean, 0.0) / paths);
            CHECK_THAT(mean, WithinAbs(mean0, 7.0 * se));
        }
    }

    SECTION("pathwise eps-continuity under shared innovations") {
        const double T = 0.5, N = 4.0;
        auto band = ActiveBand::make(lat, N);
        NoisePath path{31337, T, 8};
        const double eps_ref = 0.3;
        double prev = 1e300;
        for (double eps : {0.5, 0.4, 0.35}) {
            ConvolutionState a(band, eps_ref, path.dt()), b(band, eps, path.dt());
            std::vector<ConvolutionState*> both{&a, &b};
            for (std::uint32_t j = 0; j < 8; ++j) advance_convolutions(both, path, j);
            const double d = sobolev_norm(a.to_field() - b.to_field(), -0.5);
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("sigma_from_state_mc cross-oracle") {
    FrequencyLattice lat(32);
    CHECK(sigma_from_state_mc(0.0, 8.0, 0.0, 200, lat).mean == 0.0);

    const auto est = sigma_from_state_mc(0.0, 8.0, 1.0, 3000, lat, 17);
    const double expect = sigma_variance(0.0, 8.0, 1.0);
    CHECK_THAT(est.mean, WithinAbs(expect, 5.0 * est.stderr_));

    // growth ~ log N (tested through the ledger formula: cheap and exact)
    const double s8 = sigma_variance(0.0, 8.0, 1.0);
    const double s16 = sigma_variance(0.0, 16.0, 1.0);
    const double s32 = sigma_variance(0.0, 32.0, 1.0);
    CHECK(s8 < s16);
    CHECK(s16 < s32);
    const double g1 = s16 - s8, g2 = s32 - s16;  // log-growth: equal dyadic gaps
    CHECK_THAT(g2 / g1, WithinAbs(1.0, 0.25));
}
