#include <doctest.h>

#include <cmath>

#include "ionlogic/coupling.hpp"
#include "ionlogic/errors.hpp"
#include "oracles.hpp"

using namespace ionlogic;

namespace {
constexpr double kOmegaZ = kTwoPi * 3.4e6;
constexpr double kBeMass = 9.0121831 * 1.66053906660e-27;  // ⁹Be⁺ (electron mass neglected)
}  // namespace

TEST_CASE("Lamb-Dicke parameter scaling and domain") {
    const double dk = std::sqrt(2.0) * kTwoPi / 313e-9;
    const double eta = lamb_dicke(dk, kBeMass, kOmegaZ);
    CHECK(lamb_dicke(dk, kBeMass, 2.0 * kOmegaZ) == doctest::Approx(eta / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(lamb_dicke(dk, 0.0, kOmegaZ), DomainError);
    CHECK_THROWS_AS(lamb_dicke(-dk, kBeMass, kOmegaZ), DomainError);
    CHECK_THROWS_AS(lamb_dicke(dk, kBeMass, 0.0), DomainError);
}

TEST_CASE("Lamb-Dicke cross-check against the ratio-4/3 parameter") {
    // Orthogonal 313 nm beams: Δk = √2·2π/λ. The beam geometry is an assumption,
    // so this is a 5 % plausibility check, not ground truth.
    const double dk = std::sqrt(2.0) * kTwoPi / 313e-9;
    const double eta = lamb_dicke(dk, kBeMass, kOmegaZ);
    const double target = eta_for_ratio(4.0 / 3.0);
    CHECK(std::abs(eta - target) / target < 0.05);
}

TEST_CASE("Laguerre recurrence matches explicit low-order forms") {
    const double x = 0.37;
    CHECK(laguerre(0, 3, x) == 1.0);
    CHECK(laguerre(1, 2, x) == doctest::Approx(3.0 - x).epsilon(1e-15));
    CHECK(laguerre(2, 0, x) == doctest::Approx(1.0 - 2.0 * x + 0.5 * x * x).epsilon(1e-15));
    CHECK(laguerre(3, 1, x) ==
          doctest::Approx((-x * x * x + 12.0 * x * x - 36.0 * x + 24.0) / 6.0).epsilon(1e-14));
    CHECK_THROWS_AS(laguerre(-1, 0, x), DomainError);
}

TEST_CASE("carrier ratio identity across η") {
    for (int k = 1; k <= 19; ++k) {
        const double eta = 0.05 * k;
        const CouplingModel m(kOmegaZ, eta, kTwoPi * 92e3);
        const double ratio = m.rabi(0, 0) / m.rabi(2, 2);
        const double formula = 2.0 / (2.0 - 4.0 * eta * eta + std::pow(eta, 4));
        CHECK(std::abs(ratio - formula) <= 1e-12 * std::abs(formula));
    }
}

TEST_CASE("matrix elements agree with the operator exponential oracle") {
    const int trunc = 40;
    for (double eta : {0.05, 0.1, 0.2, 0.3594, 0.5}) {
        const Eigen::MatrixXcd disp = oracle::displacement_matrix(eta, trunc);
        const CouplingModel m(kOmegaZ, eta, 1.0, 20);
        for (int n = 0; n <= 10; ++n) {
            for (int mm = 0; mm <= 10; ++mm) {
                const double expected = std::abs(disp(mm, n));
                const double got = std::abs(m.rabi(n, mm));
                CAPTURE(eta);
                CAPTURE(n);
                CAPTURE(mm);
                // Elements are in units of Ω; the oracle's own error is ~1e-16 absolute.
                CHECK(std::abs(got - expected) <= 1e-10);
            }
        }
    }
}

TEST_CASE("Ω01 at η = 0.1 from the operator exponential") {
    const Eigen::MatrixXcd disp = oracle::displacement_matrix(0.1, 40);
    const CouplingModel m(kOmegaZ, 0.1, 1.0);
    CHECK(std::abs(m.rabi(0, 1) - std::abs(disp(1, 0))) < 1e-14);
}

TEST_CASE("symmetry and point-particle limit") {
    const CouplingModel m(kOmegaZ, 0.45, kTwoPi * 50e3);
    for (int n = 0; n <= 20; ++n) {
        for (int k = 0; k <= 20; ++k) CHECK(m.rabi(n, k) == m.rabi(k, n));
    }
    const CouplingModel tiny(kOmegaZ, 1e-7, 1.0);
    for (int n = 0; n <= 20; ++n) {
        CHECK(std::abs(tiny.rabi(n, n) - 1.0) < 1e-10);
        if (n < 20) CHECK(std::abs(tiny.rabi(n, n + 1)) < 1e-5);
        if (n < 19) CHECK(std::abs(tiny.rabi(n, n + 2)) < 1e-12);
    }
    CHECK_THROWS_AS(m.rabi(21, 0), DomainError);
    CHECK_THROWS_AS(rabi_element(m, 0, -1), DomainError);
}

TEST_CASE("eta_for_ratio") {
    const double x_expected = (4.0 - std::sqrt(14.0)) / 2.0;
    CHECK(std::abs(oracle::eta_squared_for_ratio(4.0 / 3.0) - x_expected) < 1e-15);
    const double eta = eta_for_ratio(4.0 / 3.0);
    CHECK(std::abs(eta * eta - x_expected) < 1e-14);
    CHECK(eta == doctest::Approx(0.359404).epsilon(1e-6));

    for (double r : {1.0001, 1.05, 1.2, 1.295, 4.0 / 3.0, 2.0, 10.0}) {
        const double e = eta_for_ratio(r);
        CHECK(std::abs(e * e - oracle::eta_squared_for_ratio(r)) < 1e-14);
        CHECK(std::abs(carrier_ratio_formula(e) - r) <= 1e-12 * r);
        const CouplingModel m(kOmegaZ, e, 1.0);
        CHECK(std::abs(m.carrier_ratio() - r) <= 1e-12 * r);
    }
    CHECK(eta_for_ratio(1.0 + 1e-9) < 1e-4);
    CHECK_THROWS_AS(eta_for_ratio(1.0), DomainError);
    CHECK_THROWS_AS(eta_for_ratio(0.5), DomainError);
}

TEST_CASE("gate time") {
    const double eta = eta_for_ratio(4.0 / 3.0);
    const CouplingModel m = CouplingModel::from_carrier_rate(kOmegaZ, eta, kTwoPi * 92e3);
    CHECK(std::abs(m.rabi(0, 0) - kTwoPi * 92e3) < 1e-9);
    const double t = gate_time(m);
    CHECK(t == doctest::Approx(1.0 / 92e3).epsilon(1e-14));
    CHECK(t * 1e6 == doctest::Approx(10.870).epsilon(1e-4));
    CHECK(std::abs(m.rabi(2, 2) * t - 1.5 * std::numbers::pi) < 1e-12);

    const CouplingModel doubled(kOmegaZ, eta, 2.0 * m.omega_base());
    CHECK(gate_time(doubled) == doctest::Approx(t / 2.0).epsilon(1e-14));
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(CouplingModel(kOmegaZ, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(CouplingModel(kOmegaZ, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(CouplingModel(kOmegaZ, 0.3, 2.0 * kOmegaZ), ConfigError);
    CHECK_THROWS_AS(CouplingModel(kOmegaZ, 0.3, 1.0, 2), ConfigError);
    const double dk = std::sqrt(2.0) * kTwoPi / 313e-9;
    const CouplingModel phys = CouplingModel::from_physical(dk, kBeMass, kOmegaZ, kTwoPi * 92e3);
    CHECK(phys.eta() == lamb_dicke(dk, kBeMass, kOmegaZ));
}
