#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "skspec/field.hpp"
#include "skspec/lattice.hpp"
#include "skspec/ops.hpp"
#include "skspec/transform.hpp"

using namespace skspec;

namespace {

SpectralField random_real_field(const FrequencyLattice& lat, unsigned seed, double limit = 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralField f(lat, true);
    const int m = lat.size();
    for (int i = 0; i < m; ++i) {
        const int n1 = lat.freq(i);
        for (int j = 0; j < m; ++j) {
            const int n2 = lat.freq(j);
            if (lat.is_nyquist(n1, n2) || !is_canonical(n1, n2)) continue;
            if (limit > 0.0 && bracket(n1, n2) > limit) continue;
            if (n1 == 0 && n2 == 0)
                f.set(0, 0, cplx{normal(gen), 0.0});
            else
                f.set(n1, n2, cplx{normal(gen), normal(gen)});
        }
    }
    return f;
}

}  // namespace

TEST_CASE("bracket values") {
    CHECK(bracket(0, 0) == 1.0);
    CHECK_THAT(bracket(1, 0), Catch::Matchers::WithinAbs(1.4142135623730951, 1e-15));
    CHECK_THAT(bracket(3, 4), Catch::Matchers::WithinAbs(5.0990195135927845, 1e-15));
    // bracket >= 1 everywhere
    for (int n1 = -5; n1 <= 5; ++n1)
        for (int n2 = -5; n2 <= 5; ++n2) CHECK(bracket(n1, n2) >= 1.0);
}

TEST_CASE("lattice invariants") {
    FrequencyLattice lat(16);
    CHECK(lat.freq(0) == 0);
    CHECK(lat.freq(8) == -8);
    CHECK(lat.freq(15) == -1);
    CHECK(lat.index_of(-1) == 15);
    CHECK(lat.is_nyquist(-8, 3));
    CHECK_THROWS(FrequencyLattice(7));
    CHECK_THROWS(FrequencyLattice(4));
}

TEST_CASE("dft roundtrip and realness") {
    FrequencyLattice lat(16);

    SECTION("delta at zero gives a constant field") {
        SpectralField f(lat, true);
        f.set(0, 0, cplx{2.0 * M_PI, 0.0});  // fhat(0) = 2pi <=> f == 1
        const auto phys = to_physical_complex(f);
        for (const auto& v : phys) {
            CHECK_THAT(v.real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
            CHECK_THAT(v.imag(), Catch::Matchers::WithinAbs(0.0, 1e-12));
        }
    }

    SECTION("random Hermitian coefficients produce real samples") {
        const auto f = random_real_field(lat, 7);
        const auto phys = to_physical_complex(f);
        for (const auto& v : phys) CHECK(std::abs(v.imag()) <= 1e-12);
    }

    SECTION("inverse then forward reproduces coefficients") {
        const auto f = random_real_field(lat, 11);
        const auto back = from_physical(lat, to_physical(f));
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < f.raw().size(); ++k) {
            num += std::norm(back.raw()[k] - f.raw()[k]);
            den += std::norm(f.raw()[k]);
        }
        CHECK(std::sqrt(num / den) <= 1e-12);
    }

    SECTION("Parseval against direct physical quadrature") {
        const auto f = random_real_field(lat, 13);
        const double coef = sobolev_norm(f, 0.0);
        const double phys = physical_l2_norm(f);
        CHECK_THAT(phys / coef, Catch::Matchers::WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("smooth projection") {
    FrequencyLattice lat(16);
    const auto f = random_real_field(lat, 3);

    SECTION("huge N is the identity") {
        const auto g = project_smooth(f, 2.0 * lat.max_bracket());
        for (std::size_t k = 0; k < f.raw().size(); ++k) CHECK(g.raw()[k] == f.raw()[k]);
    }

    SECTION("modes beyond 2N are killed") {
        const auto g = project_smooth(f, 2.0);  // support <n> <= 4
        CHECK(g.at(5, 0) == cplx{0.0, 0.0});    // <n> = sqrt(26) > 4
        CHECK(g.at(4, 4) == cplx{0.0, 0.0});
    }

    SECTION("ramp value at 1.5N") {
        // mode (2,2): <n> = 3; N = 2 puts it at r = 1.5
        const double w = std::exp(1.0 - 1.0 / (1.0 - 0.25));
        const auto g = project_smooth(f, 3.0 / 1.5);
        CHECK_THAT(g.at(2, 2).real(), Catch::Matchers::WithinRel(w * f.at(2, 2).real(), 1e-13));
    }

    SECTION("applying twice equals chi squared") {
        const auto once = project_smooth(f, 2.0);
        const auto twice = project_smooth(once, 2.0);
        const int m = lat.size();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const int n1 = lat.freq(i), n2 = lat.freq(j);
                const double w = chi_N(bracket(n1, n2), 2.0);
                const cplx expect = w * w * f.raw()[std::size_t(i) * m + j];
                CHECK(std::abs(twice.raw()[std::size_t(i) * m + j] - expect) <= 1e-14);
            }
    }
}

TEST_CASE("sharp projection") {
    FrequencyLattice lat(16);
    const auto f = random_real_field(lat, 5);

    SECTION("tiny eps keeps everything / drops nothing") {
        const double eps = 1.0 / (4.0 * lat.max_bracket());  // split above lattice
        const auto low = project_sharp(f, eps, SharpSide::low);
        const auto high = project_sharp(f, eps, SharpSide::high);
        for (std::size_t k = 0; k < f.raw().size(); ++k) {
            CHECK(low.raw()[k] == f.raw()[k]);
            CHECK(high.raw()[k] == cplx{0.0, 0.0});
        }
    }

    SECTION("low + high = identity, both idempotent") {
        const double eps = 0.2;
        const auto low = project_sharp(f, eps, SharpSide::low);
        const auto high = project_sharp(f, eps, SharpSide::high);
        for (std::size_t k = 0; k < f.raw().size(); ++k) {
            CHECK(low.raw()[k] + high.raw()[k] == f.raw()[k]);
        }
        const auto low2 = project_sharp(low, eps, SharpSide::low);
        for (std::size_t k = 0; k < f.raw().size(); ++k) CHECK(low2.raw()[k] == low.raw()[k]);
    }

    SECTION("eps = 0.25 drops (2,0) from the low side") {
        // <(2,0)> = sqrt(5) > (2*0.25)^-1 = 2
        const auto low = project_sharp(f, 0.25, SharpSide::low);
        CHECK(low.at(2, 0) == cplx{0.0, 0.0});
        CHECK(low.at(1, 0) == f.at(1, 0));  // sqrt(2) < 2 stays
    }
}

TEST_CASE("sobolev norm") {
    FrequencyLattice lat(16);

    SECTION("zero field") {
        SpectralField f(lat, true);
        CHECK(sobolev_norm(f, -1.0) == 0.0);
        CHECK(sobolev_norm(f, 2.0) == 0.0);
    }

    SECTION("single mode at s = 1") {
        SpectralField f(lat, false);
        f.set(1, 0, cplx{1.0, 0.0});
        CHECK_THAT(sobolev_norm(f, 1.0), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-14));
    }

    SECTION("monotone in s") {
        const auto f = random_real_field(lat, 17);
        double prev = sobolev_norm(f, -1.0);
        for (double s : {-0.5, 0.0, 0.5, 1.0}) {
            const double cur = sobolev_norm(f, s);
            CHECK(prev <= cur + 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("dealiased product") {
    FrequencyLattice lat(32);

    SECTION("multiplying by the constant-1 field is the identity") {
        const auto f = random_real_field(lat, 23, 4.0);
        SpectralField one(lat, true);
        one.set(0, 0, cplx{2.0 * M_PI, 0.0});
        const auto g = dealiased_product({f, one});
        for (std::size_t k = 0; k < f.raw().size(); ++k)
            CHECK(std::abs(g.raw()[k] - f.raw()[k]) <= 1e-12);
    }

    SECTION("two single complex modes convolve with 1/(2pi)") {
        SpectralField a(lat, false), b(lat, false);
        a.set(1, 0, cplx{2.0, 0.0});
        b.set(0, 1, cplx{3.0, 0.0});
        const auto g = dealiased_product({a, b});
        CHECK_THAT(g.at(1, 1).real(),
                   Catch::Matchers::WithinRel(6.0 / (2.0 * M_PI), 1e-12));
        CHECK(std::abs(g.at(1, 0)) <= 1e-13);
        CHECK(std::abs(g.at(0, 0)) <= 1e-13);
    }

    SECTION("cube of a real cosine mode") {
        // f with fhat(+-(2,1)) = c: f^3 has modes at +-3(2,1) and +-(2,1)
        const double c = 0.7;
        SpectralField f(lat, true);
        f.set(2, 1, cplx{c, 0.0});
        const auto g = dealiased_product({f, f, f});
        const double pi2 = 4.0 * M_PI * M_PI;
        CHECK_THAT(g.at(6, 3).real(), Catch::Matchers::WithinRel(c * c * c / pi2, 1e-12));
        CHECK_THAT(g.at(2, 1).real(), Catch::Matchers::WithinRel(3.0 * c * c * c / pi2, 1e-12));
        CHECK(std::abs(g.at(4, 2)) <= 1e-14);
        CHECK(g.hermitian_defect() <= 1e-13);
    }

    SECTION("capacity error") {
        const auto f = random_real_field(lat, 29);  // full-band field
        CHECK_THROWS_AS(dealiased_product({f, f, f}, lat.max_bracket()), std::invalid_argument);
    }
}

TEST_CASE("hermitian symmetry is preserved by module operations") {
    FrequencyLattice lat(16);
    const auto f = random_real_field(lat, 31);
    CHECK(f.hermitian_defect() == 0.0);
    CHECK(project_smooth(f, 3.0).hermitian_defect() == 0.0);
    CHECK(project_sharp(f, 0.3, SharpSide::low).hermitian_defect() == 0.0);
    CHECK(dealiased_product({f, f}).hermitian_defect() <= 1e-13);
    CHECK(from_physical(lat, to_physical(f)).hermitian_defect() <= 1e-13);
}

TEST_CASE("field serialization roundtrips") {
    FrequencyLattice lat(16);
    const auto f = random_real_field(lat, 37);

    std::stringstream buf;
    write_field_binary(buf, f);
    const auto back = read_field_binary(buf);
    CHECK(back.size() == f.size());
    CHECK(back.real_valued() == f.real_valued());
    for (std::size_t k = 0; k < f.raw().size(); ++k) CHECK(back.raw()[k] == f.raw()[k]);

    const std::string js = field_to_json(f);
    CHECK(js.find("\"M\":16") != std::string::npos);
    CHECK(js.find("\"coeffs\":[[") != std::string::npos);
}
