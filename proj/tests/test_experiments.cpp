#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "skspec/config.hpp"
#include "skspec/csv.hpp"
#include "skspec/experiments.hpp"

using namespace skspec;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("csv writer format") {
    CsvWriter csv({"a", "b"});
    csv.row({"1", "plain"});
    csv.row({CsvWriter::num(1.0 / 3.0), "needs,\"quoting\""});
    const std::string s = csv.str();
    CHECK(s.find("\r\n") != std::string::npos);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("\"needs,\"\"quoting\"\"\"") != std::string::npos);
}

TEST_CASE("toml subset parsing") {
    const std::string toml = R"(
# an experiment
experiment = "sk-poly"   # trailing comment
out = "results"
eps = [0.2, 0.1, 0.0]

[seeds]
base = 7
count = 3

[model]
kind = "polynomial"
k = 3
N = 8.0
M = 64
T = 0.25
steps = 16
phi0 = [[1, 0, 6.28, 0.0], [0, 1, 0.0, -3.14]]

[tolerances]
mean_ratio = 0.5
)";
    const json doc = parse_config_text(toml);
    CHECK(doc["experiment"] == "sk-poly");
    CHECK(doc["seeds"]["base"] == 7);
    CHECK(doc["model"]["M"] == 64);
    CHECK(doc["model"]["phi0"][1][3] == -3.14);
    CHECK(doc["tolerances"]["mean_ratio"] == 0.5);

    // the same document as JSON parses identically
    const json j = parse_config_text(doc.dump());
    CHECK(j == doc);

    CHECK_THROWS(parse_config_text("key without equals"));
    CHECK_THROWS(parse_config_text("a = [1, 2"));
}

TEST_CASE("config validation") {
    SECTION("minimal sk-poly document gets defaults") {
        auto [cfg, diag] = validate_config(parse_config_text(R"({"experiment": "sk-poly"})"));
        CHECK(diag.ok());
        CHECK(cfg.seeds.size() == 16);
        CHECK(cfg.model.N == 32.0);
        CHECK(cfg.model.M == 256);
        CHECK(cfg.model.T == 0.25);
        CHECK(!cfg.model.phi0_modes.empty());
    }

    SECTION("beta cap rejection") {
        auto [cfg, diag] = validate_config(parse_config_text(
            R"({"experiment": "sk-sine", "model": {"beta2": 15.707963267948966}})"));
        CHECK_FALSE(diag.ok());
    }

    SECTION("dealiasing rule: k = 4, N = 16 needs M >= 160") {
        auto [cfg, diag] = validate_config(parse_config_text(
            R"({"experiment": "sk-poly", "model": {"k": 4, "N": 16, "M": 64}})"));
        CHECK_FALSE(diag.ok());
        bool mentions = false;
        for (const auto& e : diag.errors) mentions = mentions || e.find("160") != std::string::npos;
        CHECK(mentions);
    }

    SECTION("negative T rejected") {
        auto [cfg, diag] = validate_config(
            parse_config_text(R"({"experiment": "sk-poly", "model": {"T": -1.0}})"));
        CHECK_FALSE(diag.ok());
    }

    SECTION("unknown experiment rejected") {
        auto [cfg, diag] = validate_config(parse_config_text(R"({"experiment": "nope"})"));
        CHECK_FALSE(diag.ok());
    }

    SECTION("hash is stable under key order") {
        const json a = parse_config_text(R"({"experiment": "symbols", "out": "x"})");
        const json b = parse_config_text(R"({"out": "x", "experiment": "symbols"})");
        CHECK(config_hash(a) == config_hash(b));
        const json c = parse_config_text(R"({"experiment": "symbols", "out": "y"})");
        CHECK(config_hash(a) != config_hash(c));
    }
}

TEST_CASE("experiment runs and exit taxonomy") {
    const auto tmp = std::filesystem::temp_directory_path() / "skspec_test";
    std::filesystem::remove_all(tmp);

    SECTION("sk-poly reruns to byte-identical CSVs, exit 0") {
        const std::string doc = R"({"experiment": "sk-poly",
            "seeds": {"base": 1, "count": 3}, "eps": [0.2, 0.1, 0.0],
            "model": {"k": 3, "N": 4, "M": 32, "T": 0.1, "steps": 8}})";
        auto [cfg, diag] = validate_config(parse_config_text(doc));
        REQUIRE(diag.ok());
        cfg.tolerances["mean_ratio"] = 1.0;  // direction only at this toy size
        cfg.out_dir = (tmp / "a").string();
        const auto man_a = run(cfg);
        cfg.out_dir = (tmp / "b").string();
        cfg.jobs = 2;  // parallel dispatch must not change any byte
        const auto man_b = run(cfg);
        CHECK(man_a.exit_code == 0);
        for (const auto& name : man_a.outputs) {
            if (name == "manifest.json") continue;  // carries wall-clock
            CHECK(slurp(tmp / "a" / name) == slurp(tmp / "b" / name));
        }
        // manifest lists every output file
        const json manifest = json::parse(slurp(tmp / "a" / "manifest.json"));
        for (const auto& name : man_a.outputs)
            CHECK(std::filesystem::exists(tmp / "a" / name));
        CHECK(manifest["outputs"].size() == man_a.outputs.size());
        CHECK(manifest["config_hash"] == man_a.config_hash_hex);
    }

    SECTION("scientific failure exits 2") {
        const std::string doc = R"({"experiment": "cov", "eps": [0.0], "cutoffs": [16],
            "times": [0.1], "tolerances": {"band_width": 1e-9}})";
        auto [cfg, diag] = validate_config(parse_config_text(doc));
        REQUIRE(diag.ok());
        cfg.out_dir = (tmp / "fail").string();
        const auto man = run(cfg);
        CHECK(man.exit_code == 2);
    }

    SECTION("blow-up exits 3 and is recorded") {
        const std::string doc = R"({"experiment": "sk-poly",
            "seeds": [1], "eps": [0.2, 0.0],
            "model": {"k": 2, "N": 4, "M": 32, "T": 1.0, "steps": 16,
                      "phi0": [[0, 0, -251.3, 0.0]], "phi1": []}})";
        auto [cfg, diag] = validate_config(parse_config_text(doc));
        REQUIRE(diag.ok());
        cfg.out_dir = (tmp / "blow").string();
        const auto man = run(cfg);
        CHECK(man.exit_code == 3);
        CHECK(man.blow_up);
    }

    std::filesystem::remove_all(tmp);
}
