#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "skspec/skspec.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_command(const std::string& config_path, int jobs, const std::string& out_override,
                std::uint64_t seed_offset, const std::string& dump_noise) {
    skspec::ExperimentConfig cfg;
    try {
        const auto doc = skspec::parse_config_text(read_file(config_path));
        auto [parsed, diag] = skspec::validate_config(doc);
        for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
        if (!diag.ok()) {
            for (const auto& e : diag.errors) std::cerr << "config error: " << e << "\n";
            return 1;
        }
        cfg = std::move(parsed);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    if (jobs > 0) cfg.jobs = jobs;
    if (const char* env = std::getenv("SKSPEC_OUT")) cfg.out_dir = env;
    if (!out_override.empty()) cfg.out_dir = out_override;
    for (auto& s : cfg.seeds) s += seed_offset;

    if (!dump_noise.empty()) {
        const auto path = skspec::sample_path(cfg.seeds.front(), cfg.model.T, cfg.model.steps);
        std::ofstream os(dump_noise, std::ios::binary);
        skspec::dump_path_csv(path, skspec::cutoff_support(cfg.model.N), os);
        std::cerr << "noise path dumped to " << dump_noise << "\n";
    }

    try {
        const auto man = skspec::run(cfg);
        for (const auto& c : man.checks)
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << c.value
                      << "  (" << c.detail << ")\n";
        std::cout << man.experiment << ": " << man.outputs.size() << " file(s) in " << cfg.out_dir
                  << ", " << man.wall_ms / 1000.0 << " s, exit " << man.exit_code << "\n";
        return man.exit_code;
    } catch (const skspec::BlowUpError& b) {
        std::cerr << "blow-up abort: " << b.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int symbols_dump(const std::string& out_path) {
    using skspec::CsvWriter;
    CsvWriter csv({"eps", "n1", "n2", "t", "dhat", "dhat_dt", "combined", "heat"});
    for (double eps : {0.05, 0.1, 0.2, 0.5, 1.0})
        for (int n1 : {0, 1, 3, 8, 16, 32})
            for (double t : {0.01, 0.1, 0.5, 1.0, 2.0}) {
                const double nsq = skspec::bracket_sq(n1, 0);
                csv.row({CsvWriter::num(eps), CsvWriter::num(n1), CsvWriter::num(0),
                         CsvWriter::num(t), CsvWriter::num(skspec::dhat(eps, nsq, t)),
                         CsvWriter::num(skspec::dhat_dt(eps, nsq, t)),
                         CsvWriter::num(skspec::combined_symbol(eps, nsq, t)),
                         CsvWriter::num(skspec::heat_symbol(nsq, t))});
            }
    csv.save(out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int wick_dump(const std::string& out_path) {
    using skspec::CsvWriter;
    const double beta = std::sqrt(M_PI);
    CsvWriter csv({"eps", "N", "t", "sigma", "gamma"});
    for (double eps : {0.0, 0.1, 0.2})
        for (double N : {8.0, 16.0, 32.0})
            for (double t : {0.25, 0.5, 1.0}) {
                const double s = skspec::sigma_variance(eps, N, t);
                csv.row({CsvWriter::num(eps), CsvWriter::num(N), CsvWriter::num(t),
                         CsvWriter::num(s),
                         CsvWriter::num(skspec::WickLedger::gamma_from_sigma(s, beta))});
            }
    csv.save(out_path);
    std::cout << "wrote " << out_path << "\n";

    // quick Cauchy-in-N decay table alongside (8 seeds, eps in {0, 0.1})
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
    CsvWriter cauchy({"kind", "eps", "N", "mean_diff"});
    for (double eps : {0.0, 0.1}) {
        const auto table = skspec::wick_cauchy_table(eps, {8.0, 16.0, 32.0}, seeds, 2);
        for (std::size_t p = 0; p < table.n_small.size(); ++p)
            cauchy.row({"wick2", CsvWriter::num(eps), CsvWriter::num(table.n_small[p]),
                        CsvWriter::num(table.mean_diff[p])});
    }
    const std::string cauchy_path =
        out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv"
            ? out_path.substr(0, out_path.size() - 4) + "_cauchy.csv"
            : out_path + "_cauchy.csv";
    cauchy.save(cauchy_path);
    std::cout << "wrote " << cauchy_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skspec: pseudo-spectral Smoluchowski-Kramers verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dump_noise;
    int jobs = 0;
    std::uint64_t seed_offset = 0;
    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config document");
    run_cmd->add_option("--config", config_path, "JSON or TOML config")->required();
    run_cmd->add_option("--jobs", jobs, "worker pool size for seed replicas");
    run_cmd->add_option("--out", out_dir, "output directory (overrides config and SKSPEC_OUT)");
    run_cmd->add_option("--seed-offset", seed_offset, "shift every configured seed");
    run_cmd->add_option("--dump-noise", dump_noise,
                        "debug: write the first seed's increments as CSV to this path");

    std::string sym_out = "symbols.csv";
    auto* sym_cmd = app.add_subcommand("symbols", "dump the propagator symbol audit table");
    sym_cmd->add_option("--out", sym_out, "output CSV path");

    std::string wick_out = "wick.csv";
    auto* wick_cmd = app.add_subcommand("wick", "dump the (eps, N, t, sigma, gamma) table");
    wick_cmd->add_option("--out", wick_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return run_command(config_path, jobs, out_dir, seed_offset, dump_noise);
    if (sym_cmd->parsed()) return symbols_dump(sym_out);
    if (wick_cmd->parsed()) return wick_dump(wick_out);
    return 1;
}
