#include "qchaos/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qchaos {
namespace {

using nlohmann::json;

// Best-effort line number of a key in the raw text (for diagnostics on keys
// the parser accepted but we reject semantically).
std::string key_location(const std::string& text, const std::string& key) {
    const std::size_t pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return {};
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n');
    return ":" + std::to_string(line);
}

[[noreturn]] void fail(const std::string& path, const std::string& text, const std::string& key,
                       const std::string& message) {
    throw std::runtime_error(path + key_location(text, key) + ": " + message);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& scope,
                const std::string& path, const std::string& text) {
    if (!j.is_object())
        throw std::runtime_error(path + ": " + scope + " must be a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            fail(path, text, item.key(), "unknown key '" + item.key() + "' in " + scope);
}

template <typename T>
void assign(const json& j, const char* key, T& out, const std::string& path,
            const std::string& text) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(path, text, key, std::string("invalid value for '") + key + "': " + e.what());
    }
}

RunMode run_mode_from(const std::string& s) {
    if (s == "twa") return RunMode::twa;
    if (s == "trajectories") return RunMode::trajectories;
    if (s == "master_oracle") return RunMode::master_oracle;
    if (s == "analyze") return RunMode::analyze;
    throw std::runtime_error("unknown mode '" + s + "'");
}

DriveMode drive_mode_from(const std::string& s) {
    if (s == "modulated") return DriveMode::modulated;
    if (s == "constant") return DriveMode::constant;
    throw std::runtime_error("unknown drive mode '" + s + "'");
}

Well well_from(const std::string& s) {
    if (s == "right") return Well::right;
    if (s == "left") return Well::left;
    throw std::runtime_error("unknown well '" + s + "'");
}

json to_json(const RunConfig& c) {
    json j;
    j["params"] = {{"omega", c.params.omega},     {"Omega", c.params.Omega},
                   {"g", c.params.g},             {"eta0", c.params.eta0},
                   {"omega_c", c.params.omega_c}, {"omega_d", c.params.omega_d},
                   {"kappa", c.params.kappa}};
    j["mode"] = run_mode_name(c.mode);
    j["drive"] = c.drive == DriveMode::modulated ? "modulated" : "constant";
    j["well"] = c.well == Well::right ? "right" : "left";
    j["n_trajectories"] = c.n_trajectories;
    j["t_final"] = c.t_final;
    j["dt"] = c.dt;
    j["sample_interval"] = c.sample_interval;
    j["grid"] = {{"n_points", c.grid.n_points}, {"x_min", c.grid.x_min}, {"x_max", c.grid.x_max}};
    j["fock_n_max"] = c.fock_n_max;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["oracle_tol"] = c.oracle_tol;
    if (!c.kappa_sweep.empty()) j["kappa_sweep"] = c.kappa_sweep;
    if (!c.analysis_times.empty()) j["analysis_times"] = c.analysis_times;
    return j;
}

RunConfig from_json(const json& j, const std::string& path, const std::string& text) {
    check_keys(j,
               {"params", "mode", "drive", "well", "n_trajectories", "t_final", "dt",
                "sample_interval", "grid", "fock_n_max", "seed", "output_dir", "oracle_tol",
                "kappa_sweep", "analysis_times"},
               "config", path, text);
    RunConfig c;
    if (j.contains("params")) {
        const json& p = j.at("params");
        check_keys(p, {"omega", "Omega", "g", "eta0", "omega_c", "omega_d", "kappa"}, "params",
                   path, text);
        assign(p, "omega", c.params.omega, path, text);
        assign(p, "Omega", c.params.Omega, path, text);
        assign(p, "g", c.params.g, path, text);
        assign(p, "eta0", c.params.eta0, path, text);
        assign(p, "omega_c", c.params.omega_c, path, text);
        assign(p, "omega_d", c.params.omega_d, path, text);
        assign(p, "kappa", c.params.kappa, path, text);
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, {"n_points", "x_min", "x_max"}, "grid", path, text);
        assign(g, "n_points", c.grid.n_points, path, text);
        assign(g, "x_min", c.grid.x_min, path, text);
        assign(g, "x_max", c.grid.x_max, path, text);
    }
    const auto parse_enum = [&](const char* key, auto parser, auto& out) {
        std::string s;
        assign(j, key, s, path, text);
        if (s.empty()) return;
        try {
            out = parser(s);
        } catch (const std::exception& e) {
            fail(path, text, key, e.what());
        }
    };
    parse_enum("mode", run_mode_from, c.mode);
    parse_enum("drive", drive_mode_from, c.drive);
    parse_enum("well", well_from, c.well);
    assign(j, "n_trajectories", c.n_trajectories, path, text);
    assign(j, "t_final", c.t_final, path, text);
    assign(j, "dt", c.dt, path, text);
    assign(j, "sample_interval", c.sample_interval, path, text);
    assign(j, "fock_n_max", c.fock_n_max, path, text);
    assign(j, "seed", c.seed, path, text);
    assign(j, "output_dir", c.output_dir, path, text);
    assign(j, "oracle_tol", c.oracle_tol, path, text);
    assign(j, "kappa_sweep", c.kappa_sweep, path, text);
    assign(j, "analysis_times", c.analysis_times, path, text);
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return c;
}

}  // namespace

const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::twa: return "twa";
        case RunMode::trajectories: return "trajectories";
        case RunMode::master_oracle: return "master_oracle";
        case RunMode::analyze: return "analyze";
    }
    throw std::logic_error("unknown RunMode");
}

void RunConfig::validate() const {
    params.validate();
    grid.make();  // throws on a bad grid spec
    if (n_trajectories == 0) throw std::runtime_error("n_trajectories must be positive");
    if (!(t_final > 0)) throw std::runtime_error("t_final must be positive");
    if (!(dt > 0)) throw std::runtime_error("dt must be positive");
    if (!(sample_interval > 0)) throw std::runtime_error("sample_interval must be positive");
    if (fock_n_max < 0) throw std::runtime_error("fock_n_max must be non-negative");
    if (!(oracle_tol > 0)) throw std::runtime_error("oracle_tol must be positive");
    for (const double k : kappa_sweep)
        if (k < 0) throw std::runtime_error("kappa_sweep entries must be non-negative");
    for (const double t : analysis_times)
        if (!(t >= 0) || t > t_final)
            throw std::runtime_error("analysis_times must lie in [0, t_final]");
    if (mode == RunMode::master_oracle && fock_n_max == 0)
        throw std::runtime_error("master_oracle mode requires fock_n_max > 0");
    if (mode == RunMode::analyze && analysis_times.empty())
        throw std::runtime_error("analyze mode requires analysis_times");
}

RunConfig profile(const std::string& name) {
    if (name == "paper-fig3") {
        RunConfig c;
        c.params = ModelParams{};  // Omega = omega_d = 1, omega_c = g = 1.5, eta0 = 3
        c.mode = RunMode::analyze;
        c.drive = DriveMode::modulated;
        c.n_trajectories = 2000;
        c.t_final = 50.0;
        c.dt = 0.5 / 160;  // lands exactly on the 0.5-spaced sample grid
        c.sample_interval = 0.5;
        c.grid = GridSpec{1024, -20.0, 20.0};
        c.fock_n_max = 180;
        c.seed = 12345;
        c.kappa_sweep = {0.0, 0.005, 0.01, 0.05};
        c.analysis_times = {50.0};
        return c;
    }
    throw std::runtime_error("unknown profile '" + name + "'");
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto line =
            1 + std::count(text.begin(),
                           text.begin() + static_cast<long>(std::min(e.byte, text.size())), '\n');
        throw std::runtime_error(path + ":" + std::to_string(line) + ": " + e.what());
    }
    return from_json(j, path, text);
}

void save_config(const std::string& path, const RunConfig& config) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_json(config).dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::string canonical_json(const RunConfig& config) {
    return to_json(config).dump();  // nlohmann objects iterate in sorted key order
}

std::uint64_t config_hash(const RunConfig& config) {
    const std::string s = canonical_json(config);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace qchaos
