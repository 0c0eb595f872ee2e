#pragma once

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"

namespace skspec {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset reader. Supported: comments, [section] and [a.b] headers,
// dotted keys, strings, numbers, booleans, and (nested) inline arrays.
// No date/times, multi-line strings, or inline tables; the JSON form of a
// config is always accepted.
// ---------------------------------------------------------------------------

namespace detail_toml {

inline std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string drop_comment(const std::string& line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

json parse_value(const std::string& text, std::size_t& pos);

inline void skip_ws(const std::string& t, std::size_t& pos) {
    while (pos < t.size() && (t[pos] == ' ' || t[pos] == '\t')) ++pos;
}

inline json parse_array(const std::string& t, std::size_t& pos) {
    json arr = json::array();
    ++pos;  // '['
    for (;;) {
        skip_ws(t, pos);
        if (pos >= t.size()) throw std::invalid_argument("toml: unterminated array");
        if (t[pos] == ']') {
            ++pos;
            return arr;
        }
        arr.push_back(parse_value(t, pos));
        skip_ws(t, pos);
        if (pos < t.size() && t[pos] == ',') ++pos;
    }
}

inline json parse_value(const std::string& t, std::size_t& pos) {
    skip_ws(t, pos);
    if (pos >= t.size()) throw std::invalid_argument("toml: missing value");
    if (t[pos] == '[') return parse_array(t, pos);
    if (t[pos] == '"') {
        std::string s;
        for (++pos; pos < t.size() && t[pos] != '"'; ++pos) {
            if (t[pos] == '\\' && pos + 1 < t.size()) ++pos;
            s += t[pos];
        }
        if (pos >= t.size()) throw std::invalid_argument("toml: unterminated string");
        ++pos;
        return json(s);
    }
    std::size_t end = pos;
    while (end < t.size() && t[end] != ',' && t[end] != ']' && t[end] != ' ' && t[end] != '\t')
        ++end;
    const std::string tok = t.substr(pos, end - pos);
    pos = end;
    if (tok == "true") return json(true);
    if (tok == "false") return json(false);
    try {
        if (tok.find_first_of(".eE") != std::string::npos) return json(std::stod(tok));
        return json(std::stoll(tok));
    } catch (...) {
        throw std::invalid_argument("toml: bad value token '" + tok + "'");
    }
}

inline void set_dotted(json& root, const std::string& dotted, json value) {
    json* cur = &root;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = dotted.find('.', start);
        const std::string key = strip(dotted.substr(start, dot - start));
        if (key.empty()) throw std::invalid_argument("toml: empty key component");
        if (dot == std::string::npos) {
            (*cur)[key] = std::move(value);
            return;
        }
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

inline json parse(const std::string& text) {
    json root = json::object();
    std::string prefix;
    std::size_t line_start = 0;
    int lineno = 0;
    while (line_start <= text.size()) {
        const std::size_t nl = text.find('\n', line_start);
        std::string line = text.substr(line_start, nl == std::string::npos ? nl : nl - line_start);
        line_start = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        line = strip(drop_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("toml: bad table header at line " +
                                            std::to_string(lineno));
            prefix = strip(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("toml: expected key = value at line " +
                                        std::to_string(lineno));
        const std::string key = strip(line.substr(0, eq));
        std::size_t pos = 0;
        const std::string rhs = strip(line.substr(eq + 1));
        json value = parse_value(rhs, pos);
        skip_ws(rhs, pos);
        if (pos != rhs.size())
            throw std::invalid_argument("toml: trailing junk at line " + std::to_string(lineno));
        set_dotted(root, prefix.empty() ? key : prefix + "." + key, std::move(value));
    }
    return root;
}

}  // namespace detail_toml

/// Parses a config document: JSON if it parses as JSON, else the TOML subset.
inline json parse_config_text(const std::string& text) {
    const json as_json = json::parse(text, nullptr, false);
    if (!as_json.is_discarded()) return as_json;
    return detail_toml::parse(text);
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

enum class ExperimentKind { symbols, wick, cov, sk_poly, sk_sine, oracle };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::symbols: return "symbols";
        case ExperimentKind::wick: return "wick";
        case ExperimentKind::cov: return "cov";
        case ExperimentKind::sk_poly: return "sk-poly";
        case ExperimentKind::sk_sine: return "sk-sine";
        case ExperimentKind::oracle: return "oracle";
    }
    return "?";
}

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::symbols;
    ModelConfig model;
    std::vector<double> eps_list;        // analysis eps grid (may include 0)
    std::vector<double> cutoffs;         // N grid for wick/cov
    std::vector<double> times;           // t grid for symbols/wick/cov
    std::vector<std::uint64_t> seeds;
    std::string out_dir = "out";
    int jobs = 1;
    bool dump_fields = false;  // full-field binary dumps of the final step
    std::map<std::string, double> tolerances;

    json canonical;  // normalized document (hashed for the manifest)

    double tol(const std::string& key, double fallback) const {
        const auto it = tolerances.find(key);
        return it == tolerances.end() ? fallback : it->second;
    }
};

struct ConfigDiagnostics {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

namespace detail_cfg {

inline std::vector<double> as_doubles(const json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

inline void read_modes(const json& j, std::vector<std::pair<std::pair<int, int>, cplx>>& out,
                       const std::string& field, ConfigDiagnostics& diag) {
    if (!j.is_array()) {
        diag.errors.push_back(field + ": expected an array of [n1,n2,re,im] records");
        return;
    }
    for (const auto& rec : j) {
        if (!rec.is_array() || rec.size() != 4) {
            diag.errors.push_back(field + ": each record must be [n1,n2,re,im]");
            return;
        }
        out.push_back({{rec[0].get<int>(), rec[1].get<int>()},
                       cplx{rec[2].get<double>(), rec[3].get<double>()}});
    }
}

}  // namespace detail_cfg

/// Default initial data for the sk experiments: smooth low modes,
/// phi0 = 2 cos(x1) + sin(x2), phi1 = cos(x1 + x2) (coefficient directives).
inline std::vector<std::pair<std::pair<int, int>, cplx>> default_phi0_modes() {
    return {{{1, 0}, cplx{2.0 * M_PI, 0.0}},
            {{0, 1}, cplx{0.0, -M_PI}}};
}
inline std::vector<std::pair<std::pair<int, int>, cplx>> default_phi1_modes() {
    return {{{1, 1}, cplx{M_PI, 0.0}}};
}

/// Full schema validation; invalid documents are rejected with field-level
/// diagnostics and no outputs are produced.
inline std::pair<ExperimentConfig, ConfigDiagnostics> validate_config(const json& doc) {
    ExperimentConfig cfg;
    ConfigDiagnostics diag;
    if (!doc.is_object()) {
        diag.errors.push_back("config: document must be an object");
        return {cfg, diag};
    }

    const std::string name = doc.value("experiment", "");
    if (name == "symbols") cfg.experiment = ExperimentKind::symbols;
    else if (name == "wick") cfg.experiment = ExperimentKind::wick;
    else if (name == "cov") cfg.experiment = ExperimentKind::cov;
    else if (name == "sk-poly") cfg.experiment = ExperimentKind::sk_poly;
    else if (name == "sk-sine") cfg.experiment = ExperimentKind::sk_sine;
    else if (name == "oracle") cfg.experiment = ExperimentKind::oracle;
    else diag.errors.push_back(
        "experiment: must be one of symbols|wick|cov|sk-poly|sk-sine|oracle, got '" + name + "'");

    cfg.out_dir = doc.value("out", "out");
    if (doc.contains("jobs")) cfg.jobs = doc["jobs"].get<int>();
    if (cfg.jobs < 1) diag.errors.push_back("jobs: must be >= 1");
    cfg.dump_fields = doc.value("dump_fields", false);

    // seeds: explicit list or {base, count}
    if (doc.contains("seeds")) {
        const auto& s = doc["seeds"];
        if (s.is_array()) {
            for (const auto& v : s) cfg.seeds.push_back(v.get<std::uint64_t>());
        } else if (s.is_object()) {
            const std::uint64_t base = s.value("base", 1);
            const int count = s.value("count", 1);
            if (count < 1) diag.errors.push_back("seeds.count: must be >= 1");
            for (int i = 0; i < count; ++i) cfg.seeds.push_back(base + std::uint64_t(i));
        } else {
            diag.errors.push_back("seeds: must be an array or {base, count}");
        }
    } else {
        for (int i = 0; i < 16; ++i) cfg.seeds.push_back(1 + std::uint64_t(i));
    }

    cfg.eps_list = doc.contains("eps") ? detail_cfg::as_doubles(doc["eps"])
                                       : std::vector<double>{0.2, 0.1, 0.05, 0.0};
    for (double e : cfg.eps_list)
        if (e < 0.0) diag.errors.push_back("eps: values must be >= 0");

    cfg.cutoffs = doc.contains("cutoffs") ? detail_cfg::as_doubles(doc["cutoffs"])
                                          : std::vector<double>{8.0, 16.0, 32.0, 64.0};
    for (double n : cfg.cutoffs)
        if (!(n > 0.0)) diag.errors.push_back("cutoffs: values must be positive");

    cfg.times = doc.contains("times") ? detail_cfg::as_doubles(doc["times"])
                                      : std::vector<double>{0.01, 0.1, 1.0};
    for (double t : cfg.times)
        if (t < 0.0) diag.errors.push_back("times: values must be >= 0");

    if (doc.contains("tolerances")) {
        for (const auto& [k, v] : doc["tolerances"].items())
            cfg.tolerances[k] = v.get<double>();
    }

    // model block (used by sk-*/oracle; harmless defaults otherwise)
    ModelConfig& m = cfg.model;
    m.model = cfg.experiment == ExperimentKind::sk_sine ? ModelKind::sine_gordon
                                                        : ModelKind::polynomial;
    if (cfg.experiment == ExperimentKind::sk_poly || cfg.experiment == ExperimentKind::sk_sine) {
        m.N = 32.0;
        m.M = 256;
        m.T = 0.25;
        m.steps = 16;
    }
    m.phi0_modes = default_phi0_modes();
    m.phi1_modes = default_phi1_modes();
    if (doc.contains("model")) {
        const auto& mj = doc["model"];
        if (!mj.is_object()) {
            diag.errors.push_back("model: must be an object");
        } else {
            const std::string kind = mj.value("kind", "");
            if (kind == "polynomial") m.model = ModelKind::polynomial;
            else if (kind == "sine-gordon") m.model = ModelKind::sine_gordon;
            else if (!kind.empty()) diag.errors.push_back("model.kind: unknown '" + kind + "'");
            if (mj.contains("k")) m.k = mj["k"].get<int>();
            if (mj.contains("beta2")) {
                const double b2 = mj["beta2"].get<double>();
                if (!(b2 > 0.0)) diag.errors.push_back("model.beta2: must be positive");
                else m.beta = std::sqrt(b2);
            }
            if (mj.contains("N")) m.N = mj["N"].get<double>();
            if (mj.contains("M")) m.M = mj["M"].get<int>();
            if (mj.contains("T")) m.T = mj["T"].get<double>();
            if (mj.contains("steps")) m.steps = mj["steps"].get<int>();
            if (mj.contains("phi0")) {
                m.phi0_modes.clear();
                detail_cfg::read_modes(mj["phi0"], m.phi0_modes, "model.phi0", diag);
            }
            if (mj.contains("phi1")) {
                m.phi1_modes.clear();
                detail_cfg::read_modes(mj["phi1"], m.phi1_modes, "model.phi1", diag);
            }
        }
    }
    m.eps_list = cfg.eps_list;

    if (cfg.experiment == ExperimentKind::sk_poly || cfg.experiment == ExperimentKind::sk_sine ||
        cfg.experiment == ExperimentKind::oracle) {
        const auto v = m.validate();
        for (const auto& e : v.errors) diag.errors.push_back("model: " + e);
        for (const auto& w : v.warnings) diag.warnings.push_back("model: " + w);
        if (std::find(cfg.eps_list.begin(), cfg.eps_list.end(), 0.0) == cfg.eps_list.end() &&
            cfg.experiment != ExperimentKind::oracle)
            diag.errors.push_back("eps: sk experiments need the eps = 0 reference in the list");
    }

    // canonical document for hashing (nlohmann objects iterate sorted by key)
    cfg.canonical = doc;
    return {cfg, diag};
}

/// FNV-1a 64 over the canonical dump; stable across runs and platforms.
inline std::uint64_t config_hash(const json& canonical) {
    const std::string s = canonical.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace skspec
