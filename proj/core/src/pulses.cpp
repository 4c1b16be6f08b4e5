#include "ionlogic/pulses.hpp"

#include <cmath>
#include <iostream>
#include <random>
#include <string>
#include <utility>

#include <json.hpp>

#include "ionlogic/errors.hpp"
#include "state_access.hpp"

namespace ionlogic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGateRatio = 4.0 / 3.0;
constexpr double kGateRatioTol = 1e-9;

WarningHandler& warning_handler() {
    static WarningHandler handler = [](std::string_view msg) {
        std::cerr << "ionlogic: warning: " << msg << '\n';
    };
    return handler;
}

void warn(std::string_view msg) {
    if (warning_handler()) warning_handler()(msg);
}

void check_pulse(const PulseSpec& pulse) {
    if (std::abs(pulse.delta_n) > kMaxSidebandOrder) {
        throw ConfigError("sideband order " + std::to_string(pulse.delta_n) +
                          " exceeds the supported |Δn| ≤ " + std::to_string(kMaxSidebandOrder));
    }
    if (!(pulse.duration >= 0.0) || !std::isfinite(pulse.duration)) {
        throw ConfigError("pulse duration must be finite and non-negative");
    }
}

// Coupled pairs of a pulse as (↓ index, ↑ index, Fock n of the ↓ side).
template <typename F>
void for_each_pair(int delta_n, int n_max, F&& f) {
    const int levels = n_max + 1;
    for (int n = std::max(0, -delta_n); n <= n_max && n + delta_n <= n_max; ++n) {
        f(n, levels + n + delta_n, n);
    }
}

ComplexMatrix pulse_unitary(const PulseSpec& pulse, const CouplingModel& model) {
    const int n_max = model.n_max();
    const int d = 2 * (n_max + 1);
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    const Complex up_phase = std::polar(1.0, pulse.phase);
    const Complex i(0.0, 1.0);
    for_each_pair(pulse.delta_n, n_max, [&](int down, int up, int n) {
        const double theta = model.rabi(n, n + pulse.delta_n) * pulse.duration;
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        u(up, up) = c;
        u(up, down) = -i * up_phase * s;
        u(down, down) = c;
        u(down, up) = -i * std::conj(up_phase) * s;
    });
    return u;
}

// Hermitian involution whose ±1 eigenvectors diagonalize the pulse coupling;
// identity on levels the pulse does not touch.
ComplexMatrix coupling_involution(const PulseSpec& pulse, int n_max) {
    const int d = 2 * (n_max + 1);
    ComplexMatrix g = ComplexMatrix::Identity(d, d);
    const Complex up_phase = std::polar(1.0, pulse.phase);
    for_each_pair(pulse.delta_n, n_max, [&](int down, int up, int) {
        g(down, down) = 0.0;
        g(up, up) = 0.0;
        g(up, down) = up_phase;
        g(down, up) = std::conj(up_phase);
    });
    return g;
}

void check_model(const IonState& state, const CouplingModel& model) {
    if (state.n_max() != model.n_max()) {
        throw ConfigError("state and coupling model use different n_max");
    }
}

}  // namespace

void NoiseConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("noise tau must be positive");
    if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
        throw ConfigError("prep_error must lie in [0, 1]");
    }
}

void set_warning_handler(WarningHandler handler) { warning_handler() = std::move(handler); }

IonState apply_pulse(const IonState& state, const PulseSpec& pulse, const CouplingModel& model) {
    check_pulse(pulse);
    check_model(state, model);
    const int n_max = model.n_max();
    IonState out = state;
    if (state.is_pure()) {
        ComplexVector psi = state.amplitudes();
        const Complex up_phase = std::polar(1.0, pulse.phase);
        const Complex i(0.0, 1.0);
        for_each_pair(pulse.delta_n, n_max, [&](int down, int up, int n) {
            const double theta = model.rabi(n, n + pulse.delta_n) * pulse.duration;
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            const Complex cd = psi(down);
            const Complex cu = psi(up);
            psi(up) = c * cu - i * up_phase * s * cd;
            psi(down) = c * cd - i * std::conj(up_phase) * s * cu;
        });
        out = detail::StateAccess::pure(std::move(psi), n_max);
    } else {
        const ComplexMatrix u = pulse_unitary(pulse, model);
        out = detail::StateAccess::density(u * state.rho() * u.adjoint(), n_max);
    }
    check_truncation(out);
    return out;
}

IonState apply_pulse(const IonState& state, const PulseSpec& pulse, const CouplingModel& model,
                     const NoiseConfig& noise) {
    noise.validate();
    IonState out = apply_pulse(state, pulse, model);
    if (!noise.has_decay() || pulse.duration == 0.0) return out;
    const double keep = std::exp(-pulse.duration / noise.tau);
    const ComplexMatrix g = coupling_involution(pulse, model.n_max());
    const IonState dens = to_density(out);
    const ComplexMatrix& rho = dens.rho();
    ComplexMatrix mixed = 0.5 * (1.0 + keep) * rho + 0.5 * (1.0 - keep) * (g * rho * g.adjoint());
    return detail::StateAccess::density(std::move(mixed), model.n_max());
}

PulseSpec pulse_for_area(int delta_n, double area, double phase, const CouplingModel& model,
                         int reference_n) {
    if (std::abs(delta_n) > kMaxSidebandOrder) {
        throw ConfigError("sideband order " + std::to_string(delta_n) + " not supported");
    }
    const int partner = reference_n + delta_n;
    if (reference_n < 0 || partner < 0 || reference_n > model.n_max() || partner > model.n_max()) {
        throw DomainError("reference level " + std::to_string(reference_n) +
                          " has no partner on sideband " + std::to_string(delta_n));
    }
    const double rate = std::abs(model.rabi(reference_n, partner));
    if (!(rate > 0.0)) {
        throw DegeneratePulseError("reference coupling Ω(" + std::to_string(reference_n) + ", " +
                                   std::to_string(partner) + ") vanishes");
    }
    if (!(area >= 0.0)) throw ConfigError("pulse area must be non-negative");
    return PulseSpec{delta_n, area / (2.0 * rate), phase};
}

IonState apply_area(const IonState& state, int delta_n, double area, double phase,
                    const CouplingModel& model, int reference_n) {
    return apply_pulse(state, pulse_for_area(delta_n, area, phase, model, reference_n), model);
}

namespace {

PulseSpec gate_pulse(const CouplingModel& model) {
    const double ratio = model.carrier_ratio();
    if (std::abs(ratio - kGateRatio) > kGateRatioTol) {
        warn("CNOT on a model with Omega00/Omega22 = " + std::to_string(ratio) +
             " (ideal 4/3); gate logic will be approximate");
    }
    return PulseSpec{0, gate_time(model), 0.0};
}

}  // namespace

IonState cnot(const IonState& state, const CouplingModel& model) {
    return apply_pulse(state, gate_pulse(model), model);
}

IonState cnot(const IonState& state, const CouplingModel& model, const NoiseConfig& noise) {
    return apply_pulse(state, gate_pulse(model), model, noise);
}

IonState apply_contrast_decay(const IonState& state, double elapsed, const NoiseConfig& noise) {
    noise.validate();
    if (!(elapsed >= 0.0)) throw DomainError("elapsed time must be non-negative");
    if (!noise.has_decay()) return to_density(state);
    const double keep = std::exp(-elapsed / noise.tau);
    const int levels = state.n_max() + 1;
    ComplexMatrix rho = to_density(state).rho();
    rho.topRightCorner(levels, levels) *= keep;
    rho.bottomLeftCorner(levels, levels) *= keep;
    return detail::StateAccess::density(std::move(rho), state.n_max());
}

PrepRecipe parse_recipe(std::string_view name) {
    if (name == "down0") return PrepRecipe::Down0;
    if (name == "up0") return PrepRecipe::Up0;
    if (name == "down2") return PrepRecipe::Down2;
    if (name == "up2") return PrepRecipe::Up2;
    if (name == "fig2-superposition") return PrepRecipe::Fig2Superposition;
    if (name == "phase-state") return PrepRecipe::PhaseState;
    throw ConfigError("unknown preparation recipe '" + std::string(name) + "'");
}

std::string recipe_name(PrepRecipe recipe) {
    switch (recipe) {
        case PrepRecipe::Down0: return "down0";
        case PrepRecipe::Up0: return "up0";
        case PrepRecipe::Down2: return "down2";
        case PrepRecipe::Up2: return "up2";
        case PrepRecipe::Fig2Superposition: return "fig2-superposition";
        case PrepRecipe::PhaseState: return "phase-state";
    }
    return "unknown";
}

std::vector<PulseSpec> prep_sequence(const PrepSpec& spec, const CouplingModel& model) {
    switch (spec.recipe) {
        case PrepRecipe::Down0:
            return {};
        case PrepRecipe::Up0:
            return {pulse_for_area(0, kPi, 0.0, model, 0)};
        case PrepRecipe::Down2:
            // |↓0⟩ → |↑1⟩ on the first blue sideband, then |↑1⟩ → |↓2⟩ on the first red.
            return {pulse_for_area(+1, kPi, 0.0, model, 0), pulse_for_area(-1, kPi, 0.0, model, 2)};
        case PrepRecipe::Up2:
            return {pulse_for_area(+2, kPi, 0.0, model, 0)};
        case PrepRecipe::Fig2Superposition:
            return {pulse_for_area(+2, kPi / 2.0, 0.0, model, 0)};
        case PrepRecipe::PhaseState:
            return {pulse_for_area(+1, kPi / 2.0, spec.phase, model, 0),
                    pulse_for_area(-1, kPi, 0.0, model, 2)};
    }
    throw ConfigError("unknown preparation recipe");
}

namespace {

IonState prep_ideal(const PrepSpec& spec, const CouplingModel& model) {
    IonState state = IonState::basis({Spin::Down, 0}, model.n_max());
    for (const PulseSpec& pulse : prep_sequence(spec, model)) state = apply_pulse(state, pulse, model);
    return state;
}

}  // namespace

IonState prep(const PrepSpec& spec, const CouplingModel& model, const NoiseConfig& noise) {
    noise.validate();
    IonState ideal = prep_ideal(spec, model);
    if (noise.prep_error == 0.0) return ideal;
    return mix(ideal, spin_flip(ideal), 1.0 - noise.prep_error);
}

IonState prep_sample(const PrepSpec& spec, const CouplingModel& model, const NoiseConfig& noise,
                     std::uint64_t seed) {
    noise.validate();
    IonState ideal = prep_ideal(spec, model);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution flip(noise.prep_error);
    return flip(rng) ? spin_flip(ideal) : ideal;
}

IonState apply_sequence(const IonState& state, const std::vector<PulseSpec>& pulses,
                        const CouplingModel& model, const NoiseConfig& noise) {
    IonState out = state;
    for (const PulseSpec& pulse : pulses) out = apply_pulse(out, pulse, model, noise);
    return out;
}

std::string pulses_to_json(const std::vector<PulseSpec>& pulses) {
    auto list = nlohmann::json::array();
    for (const PulseSpec& p : pulses) {
        list.push_back({{"delta_n", p.delta_n}, {"duration", p.duration}, {"phase", p.phase}});
    }
    return list.dump();
}

std::vector<PulseSpec> pulses_from_json(std::string_view text, const CouplingModel* model) {
    std::vector<PulseSpec> pulses;
    try {
        const auto list = nlohmann::json::parse(text);
        if (!list.is_array()) throw ConfigError("pulse sequence must be a JSON list");
        for (const auto& rec : list) {
            const int delta_n = rec.at("delta_n").get<int>();
            const double phase = rec.value("phase", 0.0);
            if (rec.contains("duration")) {
                pulses.push_back({delta_n, rec.at("duration").get<double>(), phase});
            } else if (rec.contains("area")) {
                if (model == nullptr) {
                    throw ConfigError("pulse given by area needs a coupling model to resolve");
                }
                pulses.push_back(pulse_for_area(delta_n, rec.at("area").get<double>(), phase, *model,
                                                rec.value("reference_n", 0)));
            } else {
                throw ConfigError("pulse record needs either 'duration' or 'area'");
            }
            check_pulse(pulses.back());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed pulse sequence: ") + e.what());
    }
    return pulses;
}

}  // namespace ionlogic
