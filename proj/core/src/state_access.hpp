#pragma once

#include "ionlogic/state.hpp"

namespace ionlogic::detail {

/// Construction paths that skip validation; used for results of operations
/// that preserve the invariants by construction.
struct StateAccess {
    static IonState pure(ComplexVector psi, int n_max) {
        return IonState(IonState::Repr::Pure, n_max, std::move(psi), {});
    }
    static IonState density(ComplexMatrix rho, int n_max) {
        // Remove the rounding-level anti-Hermitian part.
        ComplexMatrix h = 0.5 * (rho + rho.adjoint());
        return IonState(IonState::Repr::Density, n_max, {}, std::move(h));
    }
};

}  // namespace ionlogic::detail
