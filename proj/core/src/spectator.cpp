#include "ionlogic/spectator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "ionlogic/errors.hpp"
#include "format.hpp"
#include "state_access.hpp"

namespace ionlogic {

namespace {

constexpr int kShiftHeadroom = 5;

Eigen::MatrixXd build_hamiltonian(const CouplingModel& model) {
    const int levels = model.n_max() + 1;
    const int d = 2 * levels;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d, d);
    for (int n = 0; n < levels; ++n) {
        h(n, n) = n * model.omega_z();
        h(levels + n, levels + n) = n * model.omega_z();
    }
    for (int n = 0; n < levels; ++n) {
        for (int m = 0; m < levels; ++m) {
            const double rate = model.rabi(n, m);
            h(levels + m, n) = rate;
            h(n, levels + m) = rate;
        }
    }
    return h;
}

}  // namespace

DressedHamiltonian::DressedHamiltonian(const CouplingModel& model)
    : n_max_(model.n_max()), omega_z_(model.omega_z()), h_(build_hamiltonian(model)), eig_(h_) {
    if (eig_.info() != Eigen::Success) throw Error("dressed Hamiltonian diagonalization failed");
}

double perturbative_shift(const CouplingModel& model, Spin /*spin*/, int n) {
    if (n < 0) throw DomainError("negative Fock index");
    if (n > model.n_max() - kShiftHeadroom) {
        throw TruncationError("perturbative shift of level " + std::to_string(n) +
                              " needs n ≤ n_max − " + std::to_string(kShiftHeadroom));
    }
    // The same sum serves both spins: ↓n couples to ↑i through Ω_{n,i}, and ↑n
    // couples to ↓i through Ω_{i,n} = Ω_{n,i}, with identical detunings.
    double shift = 0.0;
    for (int i = 0; i <= model.n_max(); ++i) {
        if (i == n) continue;
        const double rate = model.rabi(i, n);
        shift += rate * rate / (static_cast<double>(n - i) * model.omega_z());
    }
    return shift;
}

std::vector<ExactShift> exact_shifts(const CouplingModel& model) {
    std::vector<int> all(model.n_max() + 1);
    std::iota(all.begin(), all.end(), 0);
    return exact_shifts(model, all);
}

std::vector<ExactShift> exact_shifts(const CouplingModel& model, const std::vector<int>& which) {
    const DressedHamiltonian h(model);
    const int levels = model.n_max() + 1;
    const int d = 2 * levels;
    const Eigen::MatrixXd& vecs = h.eigenvectors();
    const Eigen::VectorXd& vals = h.eigenvalues();

    std::vector<ExactShift> shifts;
    shifts.reserve(which.size());
    for (int n : which) {
        if (n < 0 || n >= levels) throw DomainError("level " + std::to_string(n) + " outside truncation");
        Eigen::VectorXd weight(d);
        for (int k = 0; k < d; ++k) {
            weight(k) = vecs(n, k) * vecs(n, k) + vecs(levels + n, k) * vecs(levels + n, k);
        }
        std::array<int, 2> best{0, 1};
        if (weight(1) > weight(0)) std::swap(best[0], best[1]);
        for (int k = 2; k < d; ++k) {
            if (weight(k) > weight(best[0])) {
                best[1] = best[0];
                best[0] = k;
            } else if (weight(k) > weight(best[1])) {
                best[1] = k;
            }
        }
        const double min_overlap = std::min(weight(best[0]), weight(best[1]));
        if (min_overlap < 0.5) {
            throw StrongCouplingError("level pair n = " + std::to_string(n) +
                                      " keeps only " + std::to_string(min_overlap) +
                                      " of an eigenvector; perturbative picture has broken down");
        }

        Eigen::Matrix2d proj;
        Eigen::Vector2d energy;
        for (int c = 0; c < 2; ++c) {
            proj(0, c) = vecs(n, best[c]);
            proj(1, c) = vecs(levels + n, best[c]);
            energy(c) = vals(best[c]);
        }
        // Symmetric (des Cloizeaux) effective Hamiltonian on span{↓n, ↑n}.
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> gram(proj.transpose() * proj);
        const Eigen::Matrix2d ortho = proj * gram.operatorInverseSqrt();
        const Eigen::Matrix2d h_eff = ortho * energy.asDiagonal() * ortho.transpose();

        const double bare = n * model.omega_z();
        ExactShift s;
        s.n = n;
        s.pair_center = 0.5 * (energy(0) + energy(1)) - bare;
        s.shift_down = h_eff(0, 0) - bare;
        s.shift_up = h_eff(1, 1) - bare;
        s.min_overlap = min_overlap;
        shifts.push_back(s);
    }
    return shifts;
}

IonState propagate_exact(const IonState& state, double t, const DressedHamiltonian& h) {
    if (state.n_max() != h.n_max()) throw ConfigError("state and Hamiltonian use different n_max");
    const int levels = h.n_max() + 1;
    const int d = 2 * levels;
    const Eigen::MatrixXcd vecs = h.eigenvectors().cast<Complex>();
    Eigen::VectorXcd phases(d);
    for (int k = 0; k < d; ++k) phases(k) = std::polar(1.0, -h.eigenvalues()(k) * t);
    Eigen::VectorXcd frame(d);
    for (int i = 0; i < d; ++i) frame(i) = std::polar(1.0, (i % levels) * h.omega_z() * t);
    const ComplexMatrix u =
        frame.asDiagonal() * (vecs * phases.asDiagonal() * vecs.adjoint());
    if (state.is_pure()) return detail::StateAccess::pure(u * state.amplitudes(), h.n_max());
    return detail::StateAccess::density(u * state.rho() * u.adjoint(), h.n_max());
}

IonState propagate_exact(const IonState& state, double t, const CouplingModel& model) {
    return propagate_exact(state, t, DressedHamiltonian(model));
}

std::vector<LeakagePoint> leakage_scan(const CouplingModel& model, const std::vector<double>& speeds) {
    constexpr std::array<BasisLabel, 4> inputs{{{Spin::Down, 0}, {Spin::Up, 0}, {Spin::Down, 2}, {Spin::Up, 2}}};
    std::vector<LeakagePoint> out;
    out.reserve(speeds.size());
    for (double speed : speeds) {
        if (!(speed > 0.0 && speed <= 0.5)) throw DomainError("gate speed must lie in (0, 0.5]");
        const CouplingModel scaled = CouplingModel::from_carrier_rate(
            model.omega_z(), model.eta(), speed * model.omega_z(), model.n_max());
        const DressedHamiltonian h(scaled);
        const double t = gate_time(scaled);
        double leakage = 0.0;
        for (BasisLabel in : inputs) {
            const IonState outp = propagate_exact(IonState::basis(in, scaled.n_max()), t, h);
            double kept = 0.0;
            for (BasisLabel q : inputs) kept += outp.population(q);
            leakage += 1.0 - kept;
        }
        out.push_back({speed, leakage / inputs.size()});
    }
    return out;
}

double power_law_exponent(const std::vector<LeakagePoint>& points) {
    if (points.size() < 2) throw DomainError("power-law fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
        if (!(p.speed > 0.0 && p.leakage > 0.0)) throw DomainError("power-law fit needs positive data");
        const double x = std::log(p.speed);
        const double y = std::log(p.leakage);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(points.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<ShiftRow> shift_table(const CouplingModel& model, const std::vector<int>& levels) {
    const std::vector<ExactShift> exact = exact_shifts(model, levels);
    std::vector<ShiftRow> rows;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const int n = levels[k];
        ShiftRow row;
        row.n = n;
        row.shift_pert = perturbative_shift(model, Spin::Down, n);
        row.shift_exact = exact[k].pair_center;
        row.differential_exact = exact[k].differential();
        row.rel_err = row.shift_exact != 0.0
                          ? std::abs(row.shift_pert - row.shift_exact) / std::abs(row.shift_exact)
                          : std::abs(row.shift_pert);
        rows.push_back(row);
    }
    return rows;
}

using detail::fmt_double;

std::string shift_table_csv(const std::vector<ShiftRow>& rows) {
    std::string out = "level,shift_pert,shift_exact,rel_err\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + ',' + fmt_double(r.shift_pert) + ',' + fmt_double(r.shift_exact) +
               ',' + fmt_double(r.rel_err) + '\n';
    }
    return out;
}

std::string leakage_csv(const std::vector<LeakagePoint>& points) {
    std::string out = "speed,leakage\n";
    for (const auto& p : points) out += fmt_double(p.speed) + ',' + fmt_double(p.leakage) + '\n';
    return out;
}

}  // namespace ionlogic
