#pragma once

/// Run configuration for the command-line tool.  A run is a pure function of
/// its RunConfig: the config serializes to a flat key=value text (one key per
/// line, '#' comments), parse/serialize round-trips are idempotent, and every
/// CSV output records the config hash, seed, and tool version in leading
/// comment lines.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sdiv/errors.hpp"
#include "sdiv/integrate.hpp"

namespace sdiv {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest round-trippable decimal formatting (17 significant digits).
inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunConfig {
    enum class Command {
        bound_grid,
        sweep,
        scenario_bound,
        check_divergence_floor,
        check_breakdown_inequality
    };

    Command command = Command::bound_grid;
    std::vector<double> alphas;   // empty = per-command default
    std::vector<double> lambdas;  // empty = per-command default
    std::string family = "normal-location";
    double mu0 = 5.0;
    double sigma0 = 1.0;
    double rate0 = 10.0;
    double shape = 1.0;
    double eta = 0.0;  // contaminant location for scenario bounds
    int dim = 1;
    int size = 12;
    double eps_start = 0.0;
    double eps_stop = 0.5;
    double eps_step = 0.005;
    std::string integrator = "quadrature";  // "quadrature" or "mc"
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdiv = 200;
    int mc_samples = 10000;
    std::uint64_t seed = 42;
    int n_grid = 0;  // 0 = family default
    int check_count = 500;
    bool split_output = false;
    std::string out;

    IntegratorHandle make_integrator() const {
        if (integrator == "mc") return IntegratorHandle::monte_carlo(mc_samples, seed);
        if (integrator == "quadrature") {
            return IntegratorHandle::adaptive_quadrature(rel_tol, abs_tol, max_subdiv);
        }
        throw IOFailure("unknown integrator '" + integrator + "'");
    }

    std::vector<double> eps_grid() const {
        std::vector<double> grid;
        if (!(eps_step > 0.0)) {
            grid.push_back(eps_start);
            return grid;
        }
        const int n = static_cast<int>(std::floor((eps_stop - eps_start) / eps_step + 0.5));
        for (int i = 0; i <= n; ++i) grid.push_back(eps_start + i * eps_step);
        return grid;
    }
};

namespace detail {

inline std::string command_name(RunConfig::Command c) {
    switch (c) {
        case RunConfig::Command::bound_grid: return "bound-grid";
        case RunConfig::Command::sweep: return "sweep";
        case RunConfig::Command::scenario_bound: return "scenario-bound";
        case RunConfig::Command::check_divergence_floor: return "check-divergence-floor";
        case RunConfig::Command::check_breakdown_inequality: return "check-breakdown-inequality";
    }
    return "bound-grid";
}

inline RunConfig::Command command_from_name(const std::string& s) {
    if (s == "bound-grid") return RunConfig::Command::bound_grid;
    if (s == "sweep") return RunConfig::Command::sweep;
    if (s == "scenario-bound") return RunConfig::Command::scenario_bound;
    if (s == "check-divergence-floor") return RunConfig::Command::check_divergence_floor;
    if (s == "check-breakdown-inequality") {
        return RunConfig::Command::check_breakdown_inequality;
    }
    throw IOFailure("unknown command '" + s + "'");
}

inline std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += fmt_double(v[i]);
    }
    return s;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace detail

/// Parses "start:stop:step" (or a single value) into the eps grid fields.
inline void set_eps_range(RunConfig& cfg, const std::string& text) {
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        cfg.eps_start = cfg.eps_stop = std::stod(text);
        cfg.eps_step = 0.0;
        return;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw IOFailure("eps range must be start:stop:step");
    cfg.eps_start = std::stod(text.substr(0, c1));
    cfg.eps_stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    cfg.eps_step = std::stod(text.substr(c2 + 1));
}

inline std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "command = " << detail::command_name(c.command) << '\n';
    os << "alpha = " << detail::join_list(c.alphas) << '\n';
    os << "lambda = " << detail::join_list(c.lambdas) << '\n';
    os << "family = " << c.family << '\n';
    os << "mu0 = " << fmt_double(c.mu0) << '\n';
    os << "sigma0 = " << fmt_double(c.sigma0) << '\n';
    os << "rate0 = " << fmt_double(c.rate0) << '\n';
    os << "shape = " << fmt_double(c.shape) << '\n';
    os << "eta = " << fmt_double(c.eta) << '\n';
    os << "dim = " << c.dim << '\n';
    os << "size = " << c.size << '\n';
    os << "eps = " << fmt_double(c.eps_start) << ':' << fmt_double(c.eps_stop) << ':'
       << fmt_double(c.eps_step) << '\n';
    os << "integrator = " << c.integrator << '\n';
    os << "rel_tol = " << fmt_double(c.rel_tol) << '\n';
    os << "abs_tol = " << fmt_double(c.abs_tol) << '\n';
    os << "max_subdiv = " << c.max_subdiv << '\n';
    os << "mc_samples = " << c.mc_samples << '\n';
    os << "seed = " << c.seed << '\n';
    os << "n_grid = " << c.n_grid << '\n';
    os << "check_count = " << c.check_count << '\n';
    os << "split = " << (c.split_output ? 1 : 0) << '\n';
    os << "out = " << c.out << '\n';
    return os.str();
}

inline void apply_config_key(RunConfig& c, const std::string& key, const std::string& value) {
    if (key == "command") {
        c.command = detail::command_from_name(value);
    } else if (key == "alpha") {
        c.alphas = detail::parse_list(value);
    } else if (key == "lambda") {
        c.lambdas = detail::parse_list(value);
    } else if (key == "family") {
        c.family = value;
    } else if (key == "mu0") {
        c.mu0 = std::stod(value);
    } else if (key == "sigma0") {
        c.sigma0 = std::stod(value);
    } else if (key == "rate0") {
        c.rate0 = std::stod(value);
    } else if (key == "shape") {
        c.shape = std::stod(value);
    } else if (key == "eta") {
        c.eta = std::stod(value);
    } else if (key == "dim") {
        c.dim = std::stoi(value);
    } else if (key == "size") {
        c.size = std::stoi(value);
    } else if (key == "eps") {
        set_eps_range(c, value);
    } else if (key == "integrator") {
        c.integrator = value;
    } else if (key == "rel_tol") {
        c.rel_tol = std::stod(value);
    } else if (key == "abs_tol") {
        c.abs_tol = std::stod(value);
    } else if (key == "max_subdiv") {
        c.max_subdiv = std::stoi(value);
    } else if (key == "mc_samples") {
        c.mc_samples = std::stoi(value);
    } else if (key == "seed") {
        c.seed = std::strtoull(value.c_str(), nullptr, 10);
    } else if (key == "n_grid") {
        c.n_grid = std::stoi(value);
    } else if (key == "check_count") {
        c.check_count = std::stoi(value);
    } else if (key == "split") {
        c.split_output = value == "1" || value == "true";
    } else if (key == "out") {
        c.out = value;
    } else {
        throw IOFailure("unknown config key '" + key + "'");
    }
}

inline RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw IOFailure("config line without '=': " + t);
        apply_config_key(c, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
    return c;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOFailure("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// FNV-1a over the canonical serialization.
inline std::uint64_t config_hash(const RunConfig& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string csv_metadata(const RunConfig& c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(c)));
    std::string s;
    s += "# tool_version=";
    s += kToolVersion;
    s += "\n# config_hash=";
    s += buf;
    s += "\n# seed=";
    s += std::to_string(c.seed);
    s += "\n";
    return s;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOFailure("cannot open output file " + path);
    out << text;
    if (!out) throw IOFailure("failed writing output file " + path);
}

}  // namespace sdiv
