#include "ionlogic/state.hpp"

#include <cmath>
#include <string>
#include <utility>

#include <json.hpp>

#include "ionlogic/errors.hpp"
#include "state_access.hpp"

namespace ionlogic {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kHermTol = 1e-12;
constexpr double kEigTol = 1e-10;
constexpr double kTruncationTol = 1e-9;

void check_n_max(int n_max) {
    if (n_max < kMinNMax) {
        throw ConfigError("n_max must be at least " + std::to_string(kMinNMax) + ", got " +
                          std::to_string(n_max));
    }
}

void check_label(BasisLabel label, int n_max) {
    if (label.n < 0 || label.n > n_max) {
        throw ConfigError("Fock index " + std::to_string(label.n) + " outside 0.." +
                          std::to_string(n_max));
    }
}

}  // namespace

IonState::IonState(Repr repr, int n_max, ComplexVector psi, ComplexMatrix rho)
    : repr_(repr), n_max_(n_max), psi_(std::move(psi)), rho_(std::move(rho)) {}

IonState IonState::basis(BasisLabel label, int n_max) {
    check_n_max(n_max);
    check_label(label, n_max);
    ComplexVector psi = ComplexVector::Zero(2 * (n_max + 1));
    psi(basis_index(label, n_max)) = 1.0;
    return IonState(Repr::Pure, n_max, std::move(psi), {});
}

IonState IonState::pure(ComplexVector amplitudes, int n_max) {
    check_n_max(n_max);
    if (amplitudes.size() != 2 * (n_max + 1)) {
        throw ConfigError("amplitude vector has size " + std::to_string(amplitudes.size()) +
                          ", expected " + std::to_string(2 * (n_max + 1)));
    }
    const double norm = amplitudes.squaredNorm();
    if (std::abs(norm - 1.0) > kNormTol) {
        throw ConfigError("pure state is not normalized (norm² = " + std::to_string(norm) + ")");
    }
    return IonState(Repr::Pure, n_max, std::move(amplitudes), {});
}

IonState IonState::density(ComplexMatrix rho, int n_max) {
    check_n_max(n_max);
    const int d = 2 * (n_max + 1);
    if (rho.rows() != d || rho.cols() != d) {
        throw ConfigError("density matrix has wrong shape");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kHermTol) {
        throw ConfigError("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > kNormTol) {
        throw ConfigError("density matrix does not have unit trace");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kEigTol) {
        throw ConfigError("density matrix has a negative eigenvalue");
    }
    return detail::StateAccess::density(std::move(rho), n_max);
}

const ComplexVector& IonState::amplitudes() const {
    if (repr_ != Repr::Pure) throw UnsupportedError("state is a density operator");
    return psi_;
}

const ComplexMatrix& IonState::rho() const {
    if (repr_ != Repr::Density) throw UnsupportedError("state is a pure vector");
    return rho_;
}

Complex IonState::amplitude(BasisLabel label) const {
    check_label(label, n_max_);
    return amplitudes()(basis_index(label, n_max_));
}

double IonState::population(BasisLabel label) const {
    check_label(label, n_max_);
    const int i = basis_index(label, n_max_);
    return is_pure() ? std::norm(psi_(i)) : rho_(i, i).real();
}

double IonState::fock_population(int n) const {
    return population({Spin::Down, n}) + population({Spin::Up, n});
}

double IonState::norm() const {
    return is_pure() ? psi_.squaredNorm() : rho_.trace().real();
}

double p_down(const IonState& state) {
    const int levels = state.n_max() + 1;
    if (state.is_pure()) return state.amplitudes().head(levels).squaredNorm();
    return state.rho().diagonal().head(levels).real().sum();
}

IonState to_density(const IonState& state) {
    if (!state.is_pure()) return state;
    const ComplexVector& psi = state.amplitudes();
    return detail::StateAccess::density(psi * psi.adjoint(), state.n_max());
}

double fidelity(const IonState& a, const IonState& b) {
    if (a.n_max() != b.n_max()) throw ConfigError("fidelity of states with different n_max");
    if (a.is_pure() && b.is_pure()) {
        return std::norm(a.amplitudes().dot(b.amplitudes()));
    }
    if (a.is_pure() != b.is_pure()) {
        const IonState& pure = a.is_pure() ? a : b;
        const IonState& mixed = a.is_pure() ? b : a;
        const ComplexVector& psi = pure.amplitudes();
        return psi.dot(mixed.rho() * psi).real();
    }
    throw UnsupportedError("fidelity between two density operators is not supported");
}

double purity(const IonState& state) {
    if (state.is_pure()) return 1.0;
    return (state.rho() * state.rho()).trace().real();
}

void check_truncation(const IonState& state) {
    const int n = state.n_max();
    const double top = state.fock_population(n) + state.fock_population(n - 1);
    if (top >= kTruncationTol) {
        throw TruncationError("population " + std::to_string(top) +
                              " in the top two Fock levels (n_max = " + std::to_string(n) +
                              "); increase n_max");
    }
}

IonState spin_flip(const IonState& state) {
    const int levels = state.n_max() + 1;
    const int d = state.dim();
    Eigen::PermutationMatrix<Eigen::Dynamic> swap(d);
    for (int i = 0; i < d; ++i) swap.indices()(i) = (i + levels) % d;
    if (state.is_pure()) {
        return detail::StateAccess::pure(swap * state.amplitudes(), state.n_max());
    }
    return detail::StateAccess::density(swap * state.rho() * swap.transpose(), state.n_max());
}

IonState dephase_motion(const IonState& state) {
    const int levels = state.n_max() + 1;
    ComplexMatrix rho = to_density(state).rho();
    for (int i = 0; i < rho.rows(); ++i) {
        for (int j = 0; j < rho.cols(); ++j) {
            if (i % levels != j % levels) rho(i, j) = 0.0;
        }
    }
    return detail::StateAccess::density(std::move(rho), state.n_max());
}

IonState mix(const IonState& a, const IonState& b, double weight_a) {
    if (a.n_max() != b.n_max()) throw ConfigError("mixing states with different n_max");
    if (weight_a < 0.0 || weight_a > 1.0) throw DomainError("mixture weight outside [0, 1]");
    ComplexMatrix rho = weight_a * to_density(a).rho() + (1.0 - weight_a) * to_density(b).rho();
    return detail::StateAccess::density(std::move(rho), a.n_max());
}

std::string to_json(const IonState& state) {
    nlohmann::json j;
    j["n_max"] = state.n_max();
    j["repr"] = state.is_pure() ? "pure" : "density";
    auto amps = nlohmann::json::array();
    if (state.is_pure()) {
        for (const Complex& c : state.amplitudes()) amps.push_back({c.real(), c.imag()});
    } else {
        const ComplexMatrix& rho = state.rho();
        for (int r = 0; r < rho.rows(); ++r) {
            for (int c = 0; c < rho.cols(); ++c) amps.push_back({rho(r, c).real(), rho(r, c).imag()});
        }
    }
    j["amplitudes"] = std::move(amps);
    return j.dump();
}

IonState state_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid state JSON: ") + e.what());
    }
    try {
        const int n_max = j.at("n_max").get<int>();
        const std::string repr = j.at("repr").get<std::string>();
        const auto& amps = j.at("amplitudes");
        check_n_max(n_max);
        const int d = 2 * (n_max + 1);
        auto read = [&](std::size_t k) {
            return Complex(amps.at(k).at(0).get<double>(), amps.at(k).at(1).get<double>());
        };
        if (repr == "pure") {
            if (amps.size() != static_cast<std::size_t>(d)) throw ConfigError("wrong amplitude count");
            ComplexVector psi(d);
            for (int i = 0; i < d; ++i) psi(i) = read(i);
            return IonState::pure(std::move(psi), n_max);
        }
        if (repr == "density") {
            if (amps.size() != static_cast<std::size_t>(d) * d) throw ConfigError("wrong amplitude count");
            ComplexMatrix rho(d, d);
            for (int r = 0; r < d; ++r) {
                for (int c = 0; c < d; ++c) rho(r, c) = read(static_cast<std::size_t>(r) * d + c);
            }
            return IonState::density(std::move(rho), n_max);
        }
        throw ConfigError("unknown repr '" + repr + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed state JSON: ") + e.what());
    }
}

}  // namespace ionlogic
