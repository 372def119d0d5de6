#include "tunnelwave/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tunnelwave/csvio.hpp"
#include "tunnelwave/errors.hpp"

namespace tw {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key))
            throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

double num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
    return obj[key].get<double>();
}

PotentialModel parse_potential(const json& block) {
    reject_unknown(block, {"kind", "params"}, "potential");
    const std::string kind = block.value("kind", "eckart");
    const json params = block.value("params", json::object());
    if (kind == "eckart") {
        reject_unknown(params, {"v0", "a"}, "potential.params");
        return make_eckart(num(params, "v0", 1.0), num(params, "a", 1.0));
    }
    if (kind == "gaussian_bump") {
        reject_unknown(params, {"v0", "a"}, "potential.params");
        return make_gaussian_bump(num(params, "v0", 1.0), num(params, "a", 1.0));
    }
    if (kind == "rational") {
        reject_unknown(params, {"v0", "m"}, "potential.params");
        return make_rational(num(params, "v0", 1.0),
                             static_cast<int>(num(params, "m", 1.0)));
    }
    throw ConfigError("unsupported potential kind \"" + kind +
                      "\" (custom potentials need closed-form code, not JSON)");
}

DensityParams parse_density(const json& block, const PotentialModel& model,
                            const EnergyWindow& window) {
    reject_unknown(block, {"g", "e0", "g_cubic", "J", "P"}, "density");
    if (block.contains("P") && block["P"].is_object()) {
        const json& p = block["P"];
        reject_unknown(p, {"hermite"}, "density.P");
        if (!p.contains("hermite")) throw ConfigError("density.P object must be {\"hermite\": ...}");
        const json& h = p["hermite"];
        reject_unknown(h, {"j", "eta"}, "density.P.hermite");
        if (!h.contains("eta")) throw ConfigError("density.P.hermite needs \"eta\"");
        return hermite_density(static_cast<int>(num(h, "j", 0.0)),
                               h["eta"].get<double>(), model, window);
    }
    DensityParams params = make_canonical_density();
    params.window = window;
    params.v_minus_inf = model.v_minus_inf;
    params.g = num(block, "g", params.g);
    params.e0 = num(block, "e0", params.e0);
    params.g_cubic = num(block, "g_cubic", params.g_cubic);
    if (block.contains("J")) {
        if (!block["J"].is_array()) throw ConfigError("density.J must be an array");
        params.j_coeffs = block["J"].get<std::vector<double>>();
    }
    if (block.contains("P")) {
        const std::string p = block["P"].get<std::string>();
        if (p != "const") throw ConfigError("density.P string form must be \"const\"");
        params.p_kind = PProfile::constant;
    }
    return params;
}

SimulationConfig parse_evolution(const json& block, const EnergyWindow& window) {
    reject_unknown(block,
                   {"L", "n", "dt", "t_final", "x_c", "absorber", "absorber_width",
                    "absorber_strength", "snapshot_times", "placement_tol", "buffer_tol",
                    "norm_check_stride"},
                   "evolution");
    SimulationConfig cfg;
    cfg.window = window;
    cfg.L = num(block, "L", cfg.L);
    cfg.n = static_cast<int>(num(block, "n", cfg.n));
    cfg.dt = num(block, "dt", cfg.dt);
    cfg.t_final = num(block, "t_final", cfg.t_final);
    cfg.x_c = num(block, "x_c", cfg.x_c);
    if (block.contains("absorber")) cfg.absorber = block["absorber"].get<std::string>();
    cfg.absorber_width = num(block, "absorber_width", cfg.absorber_width);
    cfg.absorber_strength = num(block, "absorber_strength", cfg.absorber_strength);
    if (block.contains("snapshot_times"))
        cfg.snapshot_times = block["snapshot_times"].get<std::vector<double>>();
    cfg.placement_tol = num(block, "placement_tol", cfg.placement_tol);
    cfg.buffer_tol = num(block, "buffer_tol", cfg.buffer_tol);
    cfg.norm_check_stride =
        static_cast<int>(num(block, "norm_check_stride", cfg.norm_check_stride));
    return cfg;
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    ExperimentConfig config;
    config.source_path = path;
    config.raw_text = buffer.str();

    json root;
    try {
        root = json::parse(config.raw_text);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    try {
        reject_unknown(root,
                       {"potential", "window", "density", "hbar_list", "evolution",
                        "chi_mod", "approx", "transmission", "compare", "output_dir",
                        "binary_snapshots", "deterministic"},
                       "config root");
        config.potential = parse_potential(root.value("potential", json::object()));
        if (root.contains("window")) {
            const json& w = root["window"];
            reject_unknown(w, {"e1", "e2"}, "window");
            config.window.e1 = num(w, "e1", config.window.e1);
            config.window.e2 = num(w, "e2", config.window.e2);
        }
        if (!(config.window.e1 < config.window.e2))
            throw ConfigError("window needs e1 < e2");
        config.density =
            parse_density(root.value("density", json::object()), config.potential,
                          config.window);
        if (root.contains("hbar_list")) {
            config.hbar_list = root["hbar_list"].get<std::vector<double>>();
            for (double h : config.hbar_list)
                if (!(h > 0.0)) throw ConfigError("hbar_list entries must be positive");
        }
        config.evolution =
            parse_evolution(root.value("evolution", json::object()), config.window);
        if (root.contains("chi_mod")) {
            const json& c = root["chi_mod"];
            reject_unknown(c, {"C", "beta"}, "chi_mod");
            config.chi_mod_C = num(c, "C", config.chi_mod_C);
            config.chi_mod_beta = num(c, "beta", config.chi_mod_beta);
        }
        if (root.contains("approx")) {
            const json& a = root["approx"];
            reject_unknown(a, {"times", "grid", "approximants"}, "approx");
            if (a.contains("times")) config.approx_times = a["times"].get<std::vector<double>>();
            if (a.contains("grid")) {
                const json& g = a["grid"];
                reject_unknown(g, {"x_min", "dx", "n"}, "approx.grid");
                config.approx_grid.x_min = num(g, "x_min", 0.0);
                config.approx_grid.dx = num(g, "dx", 0.0);
                config.approx_grid.n = static_cast<int>(num(g, "n", 0.0));
            }
            if (a.contains("approximants")) {
                config.approximants = a["approximants"].get<std::vector<std::string>>();
                for (const auto& name : config.approximants)
                    if (name != "gauss_inf" && name != "mod" && name != "gauss" &&
                        name != "superposition")
                        throw ConfigError("unknown approximant \"" + name + "\"");
            }
        }
        if (root.contains("transmission")) {
            const json& t = root["transmission"];
            reject_unknown(t, {"energies"}, "transmission");
            if (t.contains("energies"))
                config.transmission_energies = t["energies"].get<std::vector<double>>();
        }
        if (root.contains("compare")) {
            const json& c = root["compare"];
            reject_unknown(c, {"gauged_tol", "require_decreasing"}, "compare");
            config.compare_gauged_tol = num(c, "gauged_tol", config.compare_gauged_tol);
            if (c.contains("require_decreasing"))
                config.compare_require_decreasing = c["require_decreasing"].get<bool>();
        }
        if (root.contains("output_dir"))
            config.output_dir = root["output_dir"].get<std::string>();
        if (root.contains("binary_snapshots"))
            config.binary_snapshots = root["binary_snapshots"].get<bool>();
        if (root.contains("deterministic"))
            config.deterministic = root["deterministic"].get<bool>();
    } catch (const json::exception& e) {
        throw ConfigError("config schema error in " + path + ": " + e.what());
    }
    config.density.validate();
    return config;
}

int worker_count() {
    const char* env = std::getenv("TUNNELWAVE_WORKERS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256)
        throw ConfigError("TUNNELWAVE_WORKERS must be an integer in [1, 256]");
    return static_cast<int>(v);
}

unsigned long long fnv1a64(const std::string& bytes) {
    unsigned long long hash = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void write_manifest(const std::string& dir, const ExperimentConfig& config,
                    const std::vector<std::pair<std::string, double>>& timings) {
    ensure_dir(dir);
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx", fnv1a64(config.raw_text));
    json manifest = {
        {"config_path", config.source_path},
        {"config_fnv1a64", hash_hex},
        {"config_text", config.raw_text},
        {"tool_version", version_string()},
        {"compiler", __VERSION__},
    };
    json tj = json::object();
    for (const auto& [label, seconds] : timings) tj[label] = seconds;
    manifest["timings_seconds"] = tj;
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw ConfigError("cannot write manifest in " + dir);
    out << manifest.dump(2) << "\n";
}

} // namespace tw
