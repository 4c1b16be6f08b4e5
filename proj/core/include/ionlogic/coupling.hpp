#pragma once

#include <numbers>
#include <vector>

#include "ionlogic/state.hpp"

namespace ionlogic {

/// CODATA 2018 reduced Planck constant, J·s.
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// η = Δk_z √(ħ / 2 m ω_z). All inputs must be positive.
double lamb_dicke(double delta_k_z, double mass_kg, double omega_z);

/// Generalized Laguerre polynomial L_n^alpha(x) by upward recurrence.
double laguerre(int n, int alpha, double x);

/// Ω00/Ω22 = 2 / (2 − 4η² + η⁴).
double carrier_ratio_formula(double eta);

/// Smallest η in (0, 1) whose carrier ratio equals target_ratio (> 1).
double eta_for_ratio(double target_ratio);

/// Trap and laser parameters plus the derived table of Rabi rates
/// Ω_{n,m} = Ω e^{−η²/2} η^{|n−m|} √(n<!/n>!) L_{n<}^{|n−m|}(η²).
///
/// Frequencies are angular (rad/s). The table is filled at construction and
/// never modified, so a model may be shared across threads.
class CouplingModel {
public:
    CouplingModel(double omega_z, double eta, double omega_base, int n_max = kDefaultNMax);

    /// η from the trap geometry via lamb_dicke().
    static CouplingModel from_physical(double delta_k_z, double mass_kg, double omega_z,
                                       double omega_base, int n_max = kDefaultNMax);

    /// Model whose carrier rate Ω00 (not the bare Ω) is given.
    static CouplingModel from_carrier_rate(double omega_z, double eta, double omega_00,
                                           int n_max = kDefaultNMax);

    double omega_z() const { return omega_z_; }
    double eta() const { return eta_; }
    double omega_base() const { return omega_base_; }
    int n_max() const { return n_max_; }

    /// Ω_{n,m} in rad/s; throws DomainError for indices outside 0..n_max.
    double rabi(int n, int m) const;

    /// Ω00 / Ω22 from the tabulated elements.
    double carrier_ratio() const { return rabi(0, 0) / rabi(2, 2); }

    /// Same model with a different truncation.
    CouplingModel with_n_max(int n_max) const;

private:
    double omega_z_;
    double eta_;
    double omega_base_;
    int n_max_;
    std::vector<double> table_;
};

/// Free-function form of CouplingModel::rabi.
double rabi_element(const CouplingModel& model, int n, int m);

/// Duration of the gate pulse, 2π / Ω00 (a 4π rotation on the n = 0 pair).
double gate_time(const CouplingModel& model);

}  // namespace ionlogic
