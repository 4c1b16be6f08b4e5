#include "ionlogic/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ionlogic/errors.hpp"

namespace ionlogic {

double lamb_dicke(double delta_k_z, double mass_kg, double omega_z) {
    if (!(delta_k_z > 0.0) || !(mass_kg > 0.0) || !(omega_z > 0.0)) {
        throw DomainError("lamb_dicke: wavevector, mass and trap frequency must be positive");
    }
    return delta_k_z * std::sqrt(kHbar / (2.0 * mass_kg * omega_z));
}

double laguerre(int n, int alpha, double x) {
    if (n < 0 || alpha < 0) throw DomainError("laguerre: negative degree or order");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 1.0 + alpha - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

double carrier_ratio_formula(double eta) {
    const double e2 = eta * eta;
    return 2.0 / (2.0 - 4.0 * e2 + e2 * e2);
}

double eta_for_ratio(double target_ratio) {
    if (!(target_ratio > 1.0) || !std::isfinite(target_ratio)) {
        throw DomainError("eta_for_ratio: target ratio must be finite and > 1, got " +
                          std::to_string(target_ratio));
    }
    // On η² ∈ (0, 2 − √2) the ratio rises monotonically from 1 to +∞.
    auto ratio_of = [](double x) { return 2.0 / (2.0 - 4.0 * x + x * x); };
    double lo = 0.0;
    double hi = 2.0 - std::numbers::sqrt2;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = ratio_of(mid);
        if (r < target_ratio) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(0.5 * (lo + hi));
}

CouplingModel::CouplingModel(double omega_z, double eta, double omega_base, int n_max)
    : omega_z_(omega_z), eta_(eta), omega_base_(omega_base), n_max_(n_max) {
    if (!(omega_z > 0.0)) throw ConfigError("trap frequency must be positive");
    if (!(eta > 0.0 && eta < 1.0)) {
        throw ConfigError("Lamb-Dicke parameter must lie in (0, 1), got " + std::to_string(eta));
    }
    if (!(omega_base >= 0.0)) throw ConfigError("Rabi rate must be non-negative");
    if (!(omega_base < omega_z)) {
        throw ConfigError("Rabi rate must stay below the trap frequency");
    }
    if (n_max < kMinNMax) throw ConfigError("n_max must be at least " + std::to_string(kMinNMax));

    const int levels = n_max + 1;
    const double x = eta * eta;
    const double prefactor = omega_base * std::exp(-0.5 * x);
    table_.assign(static_cast<std::size_t>(levels) * levels, 0.0);
    for (int lo = 0; lo < levels; ++lo) {
        double scale = prefactor;  // Ω e^{−η²/2} η^d √(lo!/hi!) built incrementally in d
        for (int d = 0; lo + d < levels; ++d) {
            if (d > 0) scale *= eta / std::sqrt(static_cast<double>(lo + d));
            const double value = scale * laguerre(lo, d, x);
            table_[static_cast<std::size_t>(lo) * levels + lo + d] = value;
            table_[static_cast<std::size_t>(lo + d) * levels + lo] = value;
        }
    }
}

CouplingModel CouplingModel::from_physical(double delta_k_z, double mass_kg, double omega_z,
                                           double omega_base, int n_max) {
    return CouplingModel(omega_z, lamb_dicke(delta_k_z, mass_kg, omega_z), omega_base, n_max);
}

CouplingModel CouplingModel::from_carrier_rate(double omega_z, double eta, double omega_00,
                                               int n_max) {
    return CouplingModel(omega_z, eta, omega_00 * std::exp(0.5 * eta * eta), n_max);
}

double CouplingModel::rabi(int n, int m) const {
    if (n < 0 || m < 0 || n > n_max_ || m > n_max_) {
        throw DomainError("Rabi element (" + std::to_string(n) + ", " + std::to_string(m) +
                          ") outside 0.." + std::to_string(n_max_));
    }
    return table_[static_cast<std::size_t>(n) * (n_max_ + 1) + m];
}

CouplingModel CouplingModel::with_n_max(int n_max) const {
    return CouplingModel(omega_z_, eta_, omega_base_, n_max);
}

double rabi_element(const CouplingModel& model, int n, int m) { return model.rabi(n, m); }

double gate_time(const CouplingModel& model) { return kTwoPi / model.rabi(0, 0); }

}  // namespace ionlogic
