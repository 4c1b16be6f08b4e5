#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ionlogic/coupling.hpp"
#include "ionlogic/experiments.hpp"
#include "ionlogic/pulses.hpp"

namespace ionlogic::cli {

/// Everything a run needs. Frequencies are ordinary frequencies (Hz); the
/// factor 2π is applied once, in model().
struct RunConfig {
    double omega_z_hz = 3.4e6;
    std::optional<double> eta;
    std::optional<double> target_ratio;  // defaults to 4/3 when neither is set
    double omega_00_hz = 92e3;
    double tau_s = 170e-6;  // infinity disables contrast decay
    double prep_error = 0.04;
    double lambda_bright = 30.0;
    double lambda_dark = 2.0;
    double window_s = 200e-6;
    std::uint64_t shots = kDefaultShots;
    std::optional<std::uint64_t> seed;
    int n_max = kDefaultNMax;
    bool ideal = false;
    std::string csv_path;
    std::string json_path;

    /// Fills in the default target ratio and checks every invariant; throws
    /// ConfigError.
    void resolve();

    CouplingModel model() const;
    NoiseConfig noise() const;
    ReadoutConfig readout() const;
    DetectorModel detector() const;
};

/// "150us", "1.5e-4 s", "2ms"; a bare number is seconds.
double parse_duration(std::string_view text);
/// "3.4MHz", "92 kHz"; a bare number is Hz.
double parse_frequency(std::string_view text);

/// Output paths are left out so that reruns into other files stay
/// byte-identical.
nlohmann::json config_to_json(const RunConfig& cfg);

/// Applies the keys present in `j` on top of `base`. Accepts either a config
/// object or a run summary with a "config" member. Unknown keys are errors.
RunConfig apply_config_json(const nlohmann::json& j, RunConfig base);
RunConfig load_config_file(const std::string& path, RunConfig base);

}  // namespace ionlogic::cli
