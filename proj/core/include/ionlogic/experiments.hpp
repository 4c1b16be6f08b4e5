#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ionlogic/coupling.hpp"
#include "ionlogic/pulses.hpp"
#include "ionlogic/readout.hpp"
#include "ionlogic/state.hpp"

namespace ionlogic {

/// How P↓ is obtained from a final state: exactly (bypass) or through a
/// simulated fluorescence histogram and the parametric estimator.
struct ReadoutConfig {
    bool bypass = true;
    DetectorModel detector{};
    std::uint64_t shots = kDefaultShots;

    static ReadoutConfig exact() { return {}; }
    static ReadoutConfig monte_carlo(const DetectorModel& det, std::uint64_t shots) {
        return {false, det, shots};
    }
};

/// P↓ of `state` under the readout configuration; sigma is 0 in bypass mode.
PEstimate measure(const IonState& state, const ReadoutConfig& readout, std::uint64_t seed);

struct ScanPoint {
    double x = 0.0;  // s or rad
    double p_down = 0.0;
    double sigma = 0.0;
};

/// Scan data; x strictly increasing, estimates in [0, 1].
struct ScanCurve {
    std::vector<ScanPoint> points;

    void validate() const;
    std::size_t size() const { return points.size(); }
};

struct FitParam {
    double value = 0.0;
    double sigma = 0.0;
};

struct FitResult {
    std::map<std::string, FitParam> params;
    double rss = 0.0;  // weighted residual sum of squares
    int dof = 0;
    int iterations = 0;
    double gradient_norm = 0.0;
    bool converged = false;

    const FitParam& at(const std::string& name) const;
};

struct TruthRow {
    BasisLabel input;
    double ideal = 0.0;
    double p_down = 0.0;
    double sigma = 0.0;
};

/// Measured CNOT truth table reported for comparison only.
inline constexpr std::array<double, 4> kReferenceTruthTable{0.989, 0.050, 0.019, 0.968};

/// Inputs ↓0, ↑0, ↓2, ↑2: prepare (with noise), apply the gate, read out.
std::array<TruthRow, 4> run_truth_table(const CouplingModel& model, const NoiseConfig& noise,
                                        const ReadoutConfig& readout, std::uint64_t seed);

/// Superposition input (|↓0⟩ − i|↑2⟩)/√2, carrier driven for each time.
ScanCurve run_rabi_scan(const CouplingModel& model, const NoiseConfig& noise,
                        const ReadoutConfig& readout, const std::vector<double>& times,
                        std::uint64_t seed);

/// ½ + ¼ e^{−t/τ} [cos(2Ω00 t) − cos(2Ω22 t)].
double rabi_scan_closed_form(const CouplingModel& model, double tau, double t);

/// Phase-state input, gate, optional full motional dephasing (coherent =
/// false), then a π/2 analysis pulse on the second blue sideband.
ScanCurve run_fringe_scan(const CouplingModel& model, const NoiseConfig& noise,
                          const ReadoutConfig& readout, const std::vector<double>& phases,
                          std::uint64_t seed, bool coherent = true);

/// Weighted fit of c + e^{−t/τ} [a cos(2Ω1 t) + b cos(2Ω2 t)], Ω1 > Ω2.
/// Parameters: c, a, b, Omega1, Omega2, tau, ratio (= Ω1/Ω2). Points with
/// zero sigma are fitted unweighted. Throws FitError if only one frequency
/// is present or the iteration does not converge.
FitResult fit_double_sine_decay(const ScanCurve& curve);

/// Closed-form fit of c + (C/2) cos(φ − φ0). Parameters: offset, contrast
/// (clamped to [0, 1]), phase (in (−π, π]).
FitResult fit_fringe(const ScanCurve& curve);

/// Uniform grid from start to stop inclusive; the count is
/// round((stop − start) / step) + 1.
std::vector<double> linear_grid(double start, double stop, double step);

/// "x,p_down,sigma"
std::string scan_to_csv(const ScanCurve& curve);
/// "input,ideal,p_down,sigma"
std::string truth_table_to_csv(const std::array<TruthRow, 4>& rows);

std::string label_name(BasisLabel label);

}  // namespace ionlogic
