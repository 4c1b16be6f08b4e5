#pragma once

#include <complex>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ionlogic {

namespace detail {
struct StateAccess;
}

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class Spin : int { Down = 0, Up = 1 };

inline Spin flipped(Spin s) { return s == Spin::Down ? Spin::Up : Spin::Down; }

struct BasisLabel {
    Spin spin = Spin::Down;
    int n = 0;

    friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

inline constexpr int kDefaultNMax = 20;
inline constexpr int kMinNMax = 4;

/// Basis index for spin-major, Fock-minor ordering.
inline int basis_index(BasisLabel label, int n_max) {
    return static_cast<int>(label.spin) * (n_max + 1) + label.n;
}

/// Joint spin ⊗ Fock(n_max) state, either a pure amplitude vector or a
/// density operator. Values are immutable; every operation returns a new
/// state.
class IonState {
public:
    enum class Repr { Pure, Density };

    static IonState basis(BasisLabel label, int n_max = kDefaultNMax);
    /// Takes ownership of amplitudes; throws ConfigError if the vector is not
    /// normalized to 1e-12 or its size does not match n_max.
    static IonState pure(ComplexVector amplitudes, int n_max);
    /// Throws ConfigError unless rho is Hermitian with unit trace.
    static IonState density(ComplexMatrix rho, int n_max);

    Repr repr() const { return repr_; }
    bool is_pure() const { return repr_ == Repr::Pure; }
    int n_max() const { return n_max_; }
    int dim() const { return 2 * (n_max_ + 1); }

    /// Pure representation only.
    const ComplexVector& amplitudes() const;
    /// Density representation only.
    const ComplexMatrix& rho() const;

    Complex amplitude(BasisLabel label) const;
    /// ⟨label|ρ|label⟩ for either representation.
    double population(BasisLabel label) const;
    /// Σ_spin population of Fock level n.
    double fock_population(int n) const;

    /// Σ|c|² or tr ρ.
    double norm() const;

private:
    friend struct detail::StateAccess;

    IonState(Repr repr, int n_max, ComplexVector psi, ComplexMatrix rho);

    Repr repr_;
    int n_max_;
    ComplexVector psi_;
    ComplexMatrix rho_;
};

double p_down(const IonState& state);

/// |ψ⟩⟨ψ|; returns density inputs unchanged.
IonState to_density(const IonState& state);

/// |⟨a|b⟩|² for two pure states, ⟨ψ|ρ|ψ⟩ for a pure/mixed pair. Throws
/// UnsupportedError for two density operators.
double fidelity(const IonState& a, const IonState& b);

/// tr ρ² (1 for pure states).
double purity(const IonState& state);

/// Throws TruncationError if the top two Fock levels carry ≥ 1e-9 population.
void check_truncation(const IonState& state);

/// Applies σ_x ⊗ 1 (swap of spin labels at fixed n).
IonState spin_flip(const IonState& state);

/// Zeroes every coherence between different Fock levels.
IonState dephase_motion(const IonState& state);

/// Mixture w·a + (1−w)·b of two states (promoted to density operators).
IonState mix(const IonState& a, const IonState& b, double weight_a);

/// {"n_max", "repr", "amplitudes": [[re, im], ...]} in basis order; density
/// amplitudes are row-major.
std::string to_json(const IonState& state);
IonState state_from_json(std::string_view text);

}  // namespace ionlogic
