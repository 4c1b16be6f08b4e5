#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionlogic/coupling.hpp"
#include "ionlogic/state.hpp"

namespace ionlogic {

/// Time-independent Hamiltonian (units of ħ, rad/s) in the frame rotating at
/// the carrier frequency: n·ω_z on both spin manifolds plus Ω_{n,m} between
/// (↓n) and (↑m) for every pair, i.e. all sidebands driven at once.
class DressedHamiltonian {
public:
    explicit DressedHamiltonian(const CouplingModel& model);

    const Eigen::MatrixXd& matrix() const { return h_; }
    const Eigen::VectorXd& eigenvalues() const { return eig_.eigenvalues(); }
    const Eigen::MatrixXd& eigenvectors() const { return eig_.eigenvectors(); }
    int n_max() const { return n_max_; }
    double omega_z() const { return omega_z_; }

private:
    int n_max_;
    double omega_z_;
    Eigen::MatrixXd h_;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

/// Second-order shift Σ_{i≠n} Ω²_{i,n} / ((n − i) ω_z), identical for both
/// spins. Requires n ≤ n_max − 5.
double perturbative_shift(const CouplingModel& model, Spin spin, int n);

struct ExactShift {
    int n = 0;
    double pair_center = 0.0;   // mean of the pair's two eigenvalues − n·ω_z
    double shift_down = 0.0;    // diagonal of the effective 2×2 Hamiltonian − n·ω_z
    double shift_up = 0.0;
    double min_overlap = 0.0;   // weight of the assigned eigenvectors inside the pair

    double differential() const { return shift_up - shift_down; }
};

/// Exact level shifts of every resonant pair (↓n, ↑n) from the dressed
/// spectrum. Each pair takes the two eigenvectors with the largest weight in
/// its subspace; the spin-resolved shifts come from the effective Hamiltonian
/// obtained by orthonormalizing their projections onto the pair. Throws
/// StrongCouplingError when an assigned weight drops below 0.5.
std::vector<ExactShift> exact_shifts(const CouplingModel& model);
/// Only the listed pairs, in the given order.
std::vector<ExactShift> exact_shifts(const CouplingModel& model, const std::vector<int>& levels);

/// exp(−iHt) applied in the interaction picture (free phases e^{−inω_z t}
/// removed), so the result is comparable with apply_pulse.
IonState propagate_exact(const IonState& state, double t, const CouplingModel& model);
IonState propagate_exact(const IonState& state, double t, const DressedHamiltonian& h);

struct LeakagePoint {
    double speed = 0.0;    // Ω00 / ω_z
    double leakage = 0.0;  // population lost from {↓,↑}×{0,2}, averaged over basis inputs
};

/// For each speed, rescales the laser so Ω00 = speed·ω_z (η and ω_z kept),
/// runs the gate-length exact propagation on the four computational basis
/// states and reports the mean leakage.
std::vector<LeakagePoint> leakage_scan(const CouplingModel& model, const std::vector<double>& speeds);

/// Least-squares slope of log(leakage) against log(speed).
double power_law_exponent(const std::vector<LeakagePoint>& points);

struct ShiftRow {
    int n = 0;
    double shift_pert = 0.0;
    double shift_exact = 0.0;
    double differential_exact = 0.0;
    double rel_err = 0.0;
};

/// Perturbative vs exact pair-center shifts for the requested levels.
std::vector<ShiftRow> shift_table(const CouplingModel& model, const std::vector<int>& levels);

/// CSV with header "level,shift_pert,shift_exact,rel_err".
std::string shift_table_csv(const std::vector<ShiftRow>& rows);
/// CSV with header "speed,leakage".
std::string leakage_csv(const std::vector<LeakagePoint>& points);

}  // namespace ionlogic
