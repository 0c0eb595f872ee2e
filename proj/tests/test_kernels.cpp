#include <catch2/catch_amalgamated.hpp>

#include "skspec/kernels.hpp"
#include "skspec/metrics.hpp"

using namespace skspec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double cov_model(double N, double t, const TorusPoint& x) {
    const double r = std::hypot(x[0], x[1]);
    return -std::log((r + 1.0 / N) / (r + std::sqrt(t) + 1.0 / N)) / (4.0 * M_PI);
}

}  // namespace

TEST_CASE("covariance gamma") {
    CHECK(covariance_gamma(0.1, 8.0, 0.0, {1.0, 0.0}) == 0.0);

    SECTION("x = 0 recovers sigma_variance") {
        for (double eps : {0.0, 0.2})
            CHECK_THAT(covariance_gamma(eps, 8.0, 0.5, {0.0, 0.0}),
                       WithinAbs(sigma_variance(eps, 8.0, 0.5), 1e-12));
    }

    SECTION("log-model match at a far probe") {
        const double g = covariance_gamma(0.0, 32.0, 1.0, {M_PI, 0.0});
        CHECK(std::abs(g - cov_model(32.0, 1.0, {M_PI, 0.0})) <= 1.5);
    }

    SECTION("even in x, decreasing along the axis") {
        const double N = 16.0, t = 0.5;
        const auto probes = std::vector<TorusPoint>{{0.3, 0.2}, {-0.3, -0.2}};
        const auto vals = covariance_gamma_batch(0.1, N, t, probes);
        CHECK_THAT(vals[0], WithinAbs(vals[1], 1e-12));
        double prev = covariance_gamma(0.1, N, t, {0.05, 0.0});
        for (double r : {0.2, 0.8, 2.0}) {
            const double cur = covariance_gamma(0.1, N, t, {r, 0.0});
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("heat green kernel") {
    SECTION("t = 0 vanishes") {
        CHECK(heat_green(0.0, {0.7, 0.1}, 64) == 0.0);
        CHECK(heat_green(0.0, {0.7, 0.1}, 64, 16.0) == 0.0);
    }

    SECTION("P_N^2 H equals Gamma_{0,N} at five points") {
        const double N = 16.0, t = 0.7;
        const std::vector<TorusPoint> pts{{0.1, 0.0}, {0.5, 0.4}, {M_PI / 2, 0.0},
                                          {1.0, -1.0}, {0.0, 2.0}};
        const auto gam = covariance_gamma_batch(0.0, N, t, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            CHECK_THAT(heat_green(t, pts[i], 64, N), WithinAbs(gam[i], 1e-10));
    }

    SECTION("log asymptotics band over the probe grid") {
        std::vector<double> resid;
        for (double t : default_probe_times())
            for (const auto& x : default_probe_points()) {
                const double r = std::hypot(x[0], x[1]);
                const double model = -std::log(r + std::sqrt(t) + 1.0 / 64.0) / (4.0 * M_PI);
                resid.push_back(heat_green(t, x, 64, 64.0) - model);
            }
        const auto band = band_certificate(std::vector<double>(resid.size(), 0.0), resid, 1.5);
        INFO("band [" << band.c1 << ", " << band.c2 << "]");
        CHECK(band.pass);
    }
}

TEST_CASE("bessel kernel") {
    SECTION("even symmetry") {
        for (double a : {0.5, 1.0, 1.5}) {
            const double p = bessel_kernel(a, {0.4, -0.9}, 64);
            const double q = bessel_kernel(a, {-0.4, 0.9}, 64);
            CHECK_THAT(p, WithinAbs(q, 1e-12));
        }
    }

    SECTION("alpha = 1 divergence exponent near -1") {
        // dyadic radii deep enough into the divergence that the smooth
        // remainder R does not tilt the fit, truncation high enough that
        // the kernel has converged there
        std::vector<std::pair<double, double>> pts;
        for (double r : {0.02, 0.04, 0.08})
            pts.push_back({r, bessel_kernel(1.0, {r, 0.0}, 512)});
        const double slope = fit_rate(pts);
        INFO("slope " << slope);
        CHECK_THAT(slope, WithinAbs(-1.0, 0.15));
    }

    SECTION("doubling the truncation moves values at most by the shell tail") {
        // the chi ramp is C^1, so the dyadic-shell remainder decays like
        // (trunc * r)^{-3/2} (stationary phase against the Bessel factor)
        for (double r : {0.1, 0.5, 1.0}) {
            const double a = bessel_kernel(1.0, {r, 0.2}, 64);
            const double b = bessel_kernel(1.0, {r, 0.2}, 128);
            CHECK_THAT(b, WithinAbs(a, 2.0 * std::pow(64.0 * r, -1.5)));
        }
    }

    SECTION("power-law certificate with fitted c_alpha") {
        // least squares of J against |x|^{alpha-2} on the annulus
        const double alpha = 1.0;
        double num = 0.0, den = 0.0;
        std::vector<std::pair<double, double>> samples;
        for (double r = 0.05; r <= 1.0; r += 0.05) {
            const double J = bessel_kernel(alpha, {r, 0.0}, 128);
            const double basis = std::pow(r, alpha - 2.0);
            samples.push_back({basis, J});
            num += basis * J;
            den += basis * basis;
        }
        const double c_alpha = num / den;
        double worst = 0.0;
        for (const auto& [basis, J] : samples) worst = std::max(worst, std::abs(J - c_alpha * basis));
        INFO("c_alpha " << c_alpha << " residual " << worst);
        CHECK(c_alpha > 0.0);
        CHECK(worst < 0.5);  // remainder R is smooth and O(1) on the annulus
    }
}

TEST_CASE("potential J") {
    SECTION("t = 0 gives exactly 1") {
        for (double eps : {0.0, 0.1, 0.3})
            for (double N : {8.0, 64.0}) CHECK(potential_J(eps, N, 0.0, {0.4, 0.1}) == 1.0);
    }

    SECTION("bounded in (0, 1] on the acceptance pairs") {
        for (double eps : {0.0, 0.1, 0.3})
            for (double N : {16.0, 64.0})
                for (double t : default_probe_times())
                    for (const auto& x : default_probe_points()) {
                        const double J = potential_J(eps, N, t, x);
                        CHECK(J > 0.0);
                        CHECK(J <= 1.0 + 1e-12);
                    }
    }

    SECTION("covariance link band at eps = 0.1, N = 16") {
        std::vector<double> model, computed;
        for (double t : default_probe_times()) {
            const auto pts = default_probe_points();
            const auto gam = covariance_gamma_batch(0.1, 16.0, t, pts);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                computed.push_back(gam[i]);
                model.push_back(-std::log(potential_J(0.1, 16.0, t, pts[i])) / (4.0 * M_PI));
            }
        }
        const auto band = band_certificate(model, computed, 3.0);
        INFO("band [" << band.c1 << ", " << band.c2 << "] width " << band.width());
        CHECK(band.pass);
    }
}

TEST_CASE("cov difference certificate") {
    const auto probes = default_probe_points();

    SECTION("N1 = N2 vanishes identically") {
        const auto rep = cov_difference_check(16.0, 16.0, 0.0, probes, {0.5});
        CHECK(rep.finite);
        CHECK_THAT(rep.constant_j1, WithinAbs(0.0, 1e-14));
        CHECK_THAT(rep.constant_j2, WithinAbs(0.0, 1e-14));
    }

    SECTION("eps = 0 certificate is finite and stable under probe refinement") {
        const auto coarse = cov_difference_check(16.0, 64.0, 0.0, probes, {0.1, 1.0});
        std::vector<TorusPoint> finer = probes;
        for (int j = 0; j <= 5; ++j) finer.push_back({1.5 * M_PI / double(1 << j), 0.1});
        const auto fine = cov_difference_check(16.0, 64.0, 0.0, finer, {0.1, 1.0});
        CHECK(coarse.finite);
        CHECK(fine.finite);
        CHECK(fine.constant_j1 <= 2.0 * coarse.constant_j1 + 1.0);
        CHECK(fine.constant_j2 <= 2.0 * coarse.constant_j2 + 1.0);
    }

    SECTION("eps = 0.05 sweeps the three frequency regimes") {
        const auto rep = cov_difference_check(8.0, 32.0, 0.05, probes, {0.1, 1.0});
        CHECK(rep.finite);
        CHECK(rep.constant_j1 > 0.0);
    }
}
