#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ionlogic/errors.hpp"

namespace ionlogic::cli {

namespace {

double parse_with_units(std::string_view text, const char* what,
                        std::initializer_list<std::pair<std::string_view, double>> units) {
    std::string s(text);
    std::size_t used = 0;
    double value;
    try {
        value = std::stod(s, &used);
    } catch (const std::logic_error&) {
        throw ConfigError(std::string("cannot parse ") + what + " '" + s + "'");
    }
    std::string unit = s.substr(used);
    unit.erase(0, unit.find_first_not_of(' '));
    if (unit.empty()) return value;
    for (const auto& [name, scale] : units) {
        if (unit == name) return value * scale;
    }
    throw ConfigError(std::string("unknown unit '") + unit + "' in " + what + " '" + s + "'");
}

double number(const nlohmann::json& j, const char* key) {
    if (!j.is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
    return j.get<double>();
}

std::uint64_t count(const nlohmann::json& j, const char* key) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

}  // namespace

double parse_duration(std::string_view text) {
    return parse_with_units(text, "duration", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}});
}

double parse_frequency(std::string_view text) {
    return parse_with_units(text, "frequency", {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}});
}

void RunConfig::resolve() {
    if (eta && target_ratio) throw ConfigError("give either eta or target_ratio, not both");
    if (!eta && !target_ratio) target_ratio = 4.0 / 3.0;
    if (!(omega_z_hz > 0.0) || !std::isfinite(omega_z_hz)) throw ConfigError("omega_z_hz must be positive");
    if (!(omega_00_hz > 0.0) || !std::isfinite(omega_00_hz)) throw ConfigError("omega_00_hz must be positive");
    if (eta && !(*eta > 0.0 && *eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
    if (target_ratio && !(*target_ratio > 1.0 && std::isfinite(*target_ratio))) {
        throw ConfigError("target_ratio must exceed 1");
    }
    if (!(tau_s > 0.0)) throw ConfigError("tau must be positive");
    if (!(prep_error >= 0.0 && prep_error <= 1.0)) throw ConfigError("prep_error must lie in [0, 1]");
    if (!(lambda_dark >= 0.0) || !(lambda_bright > lambda_dark)) {
        throw ConfigError("need lambda_bright > lambda_dark >= 0");
    }
    if (!(window_s > 0.0)) throw ConfigError("window must be positive");
    if (shots < 1) throw ConfigError("shots must be at least 1");
    if (n_max < kMinNMax) throw ConfigError("n_max must be at least " + std::to_string(kMinNMax));
    (void)model();
}

CouplingModel RunConfig::model() const {
    const double e = eta ? *eta : eta_for_ratio(target_ratio.value_or(4.0 / 3.0));
    return CouplingModel::from_carrier_rate(kTwoPi * omega_z_hz, e, kTwoPi * omega_00_hz, n_max);
}

NoiseConfig RunConfig::noise() const {
    if (ideal) return NoiseConfig::ideal();
    NoiseConfig n;
    n.tau = tau_s;
    n.prep_error = prep_error;
    return n;
}

DetectorModel RunConfig::detector() const { return {lambda_bright, lambda_dark, window_s}; }

ReadoutConfig RunConfig::readout() const {
    if (ideal) return ReadoutConfig::exact();
    return ReadoutConfig::monte_carlo(detector(), shots);
}

RunConfig apply_config_json(const nlohmann::json& root, RunConfig cfg) {
    const nlohmann::json& j = root.contains("config") ? root.at("config") : root;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("tau_s") && j.contains("tau_us")) throw ConfigError("give tau_s or tau_us, not both");
    if (j.contains("window_s") && j.contains("window_us")) {
        throw ConfigError("give window_s or window_us, not both");
    }
    if (j.contains("eta") && j.contains("target_ratio") && !j.at("eta").is_null() &&
        !j.at("target_ratio").is_null()) {
        throw ConfigError("give either eta or target_ratio, not both");
    }
    for (const auto& [key, value] : j.items()) {
        const char* k = key.c_str();
        if (key == "omega_z_hz") {
            cfg.omega_z_hz = number(value, k);
        } else if (key == "omega_00_hz") {
            cfg.omega_00_hz = number(value, k);
        } else if (key == "eta") {
            if (value.is_null()) continue;
            cfg.eta = number(value, k);
            cfg.target_ratio.reset();
        } else if (key == "target_ratio") {
            if (value.is_null()) continue;
            cfg.target_ratio = number(value, k);
            cfg.eta.reset();
        } else if (key == "tau_s" || key == "tau_us") {
            // null means no contrast decay
            const double scale = key == "tau_us" ? 1e-6 : 1.0;
            cfg.tau_s = value.is_null() ? std::numeric_limits<double>::infinity() : number(value, k) * scale;
        } else if (key == "prep_error") {
            cfg.prep_error = number(value, k);
        } else if (key == "lambda_bright") {
            cfg.lambda_bright = number(value, k);
        } else if (key == "lambda_dark") {
            cfg.lambda_dark = number(value, k);
        } else if (key == "window_s" || key == "window_us") {
            cfg.window_s = number(value, k) * (key == "window_us" ? 1e-6 : 1.0);
        } else if (key == "shots") {
            cfg.shots = count(value, k);
        } else if (key == "seed") {
            if (value.is_null()) {
                cfg.seed.reset();
            } else {
                cfg.seed = count(value, k);
            }
        } else if (key == "n_max") {
            cfg.n_max = static_cast<int>(count(value, k));
        } else if (key == "ideal") {
            if (!value.is_boolean()) throw ConfigError("config key 'ideal' must be true or false");
            cfg.ideal = value.get<bool>();
        } else if (key == "csv") {
            cfg.csv_path = value.is_null() ? "" : value.get<std::string>();
        } else if (key == "json") {
            cfg.json_path = value.is_null() ? "" : value.get<std::string>();
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return apply_config_json(nlohmann::json::parse(text.str()), std::move(base));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["omega_z_hz"] = cfg.omega_z_hz;
    if (cfg.eta) j["eta"] = *cfg.eta;
    if (cfg.target_ratio) j["target_ratio"] = *cfg.target_ratio;
    j["omega_00_hz"] = cfg.omega_00_hz;
    j["tau_s"] = std::isfinite(cfg.tau_s) ? nlohmann::json(cfg.tau_s) : nlohmann::json(nullptr);
    j["prep_error"] = cfg.prep_error;
    j["lambda_bright"] = cfg.lambda_bright;
    j["lambda_dark"] = cfg.lambda_dark;
    j["window_s"] = cfg.window_s;
    j["shots"] = cfg.shots;
    j["seed"] = cfg.seed ? nlohmann::json(*cfg.seed) : nlohmann::json(nullptr);
    j["n_max"] = cfg.n_max;
    j["ideal"] = cfg.ideal;
    return j;
}

}  // namespace ionlogic::cli
