#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "ionlogic/coupling.hpp"
#include "ionlogic/state.hpp"

namespace ionlogic {

inline constexpr int kMaxSidebandOrder = 3;

/// One Raman pulse on the Δn-th sideband (0 = carrier, +k blue, −k red).
struct PulseSpec {
    int delta_n = 0;
    double duration = 0.0;  // s
    double phase = 0.0;     // rad

    friend bool operator==(const PulseSpec&, const PulseSpec&) = default;
};

struct NoiseConfig {
    double tau = std::numeric_limits<double>::infinity();  // contrast-decay time constant, s
    double prep_error = 0.0;

    static NoiseConfig ideal() { return {}; }
    bool has_decay() const { return std::isfinite(tau); }
    void validate() const;
};

/// Handler for non-fatal warnings (e.g. a CNOT on a detuned model). The
/// default writes to stderr. Not thread-safe to swap while pulses run.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);

/// Two-level rotations on every pair (↓n, ↑n+Δn):
///   c'↑ = cos(Ωt) c↑ − i e^{+iφ} sin(Ωt) c↓
///   c'↓ = cos(Ωt) c↓ − i e^{−iφ} sin(Ωt) c↑
/// with Ω = Ω_{n,n+Δn}. Levels without a partner inside the truncation are
/// left alone. Density inputs are conjugated by the same unitary. Throws
/// TruncationError if population reaches the top two Fock levels.
IonState apply_pulse(const IonState& state, const PulseSpec& pulse, const CouplingModel& model);

/// As above, followed by contrast decay over the pulse duration when
/// noise.tau is finite (the result is then a density operator). The decay
/// dephases the state in the eigenbasis of the pulse's coupling, which damps
/// the Rabi-oscillation contrast by e^{−t/τ}.
IonState apply_pulse(const IonState& state, const PulseSpec& pulse, const CouplingModel& model,
                     const NoiseConfig& noise);

/// Pulse whose rotation on the reference pair (↓reference_n, ↑reference_n+Δn)
/// has the given area, with area = 2Ωt (so π means full transfer).
PulseSpec pulse_for_area(int delta_n, double area, double phase, const CouplingModel& model,
                         int reference_n);

IonState apply_area(const IonState& state, int delta_n, double area, double phase,
                    const CouplingModel& model, int reference_n);

/// Carrier pulse of length gate_time(model), phase 0. Emits a warning (but
/// still runs) when Ω00/Ω22 is not 4/3.
IonState cnot(const IonState& state, const CouplingModel& model);
IonState cnot(const IonState& state, const CouplingModel& model, const NoiseConfig& noise);

/// Multiplies every coherence between ↓ and ↑ labels by e^{−elapsed/τ}.
/// Populations and same-spin motional coherences are untouched.
IonState apply_contrast_decay(const IonState& state, double elapsed, const NoiseConfig& noise);

enum class PrepRecipe { Down0, Up0, Down2, Up2, Fig2Superposition, PhaseState };

struct PrepSpec {
    PrepRecipe recipe = PrepRecipe::Down0;
    double phase = 0.0;  // only used by PhaseState
};

/// Accepts down0, up0, down2, up2, fig2-superposition, phase-state.
PrepRecipe parse_recipe(std::string_view name);
std::string recipe_name(PrepRecipe recipe);

/// Pulse list that prepares the recipe from |↓0⟩.
std::vector<PulseSpec> prep_sequence(const PrepSpec& spec, const CouplingModel& model);

/// Deterministic preparation. With prep_error > 0 the result is the mixture
/// (1 − prep_error)·ideal + prep_error·spin_flip(ideal).
IonState prep(const PrepSpec& spec, const CouplingModel& model, const NoiseConfig& noise);

/// One sampled preparation shot: the ideal state, or its spin-flipped
/// counterpart with probability prep_error. Deterministic per seed.
IonState prep_sample(const PrepSpec& spec, const CouplingModel& model, const NoiseConfig& noise,
                     std::uint64_t seed);

/// Applies pulses in order, each followed by decay when noise.tau is finite.
IonState apply_sequence(const IonState& state, const std::vector<PulseSpec>& pulses,
                        const CouplingModel& model, const NoiseConfig& noise = {});

/// JSON list of {"delta_n", "duration", "phase"} records. Records may give
/// {"delta_n", "area", "reference_n", "phase"} instead of a duration when a
/// model is supplied to resolve them.
std::string pulses_to_json(const std::vector<PulseSpec>& pulses);
std::vector<PulseSpec> pulses_from_json(std::string_view text, const CouplingModel* model = nullptr);

}  // namespace ionlogic
