#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "ionlogic/errors.hpp"
#include "ionlogic/pulses.hpp"
#include "oracles.hpp"

using namespace ionlogic;
using std::numbers::pi;

namespace {

constexpr double kOmegaZ = kTwoPi * 3.4e6;
const Complex I(0.0, 1.0);

CouplingModel default_model(int n_max = 20) {
    return CouplingModel::from_carrier_rate(kOmegaZ, eta_for_ratio(4.0 / 3.0), kTwoPi * 92e3, n_max);
}

IonState basis(Spin s, int n) { return IonState::basis({s, n}); }

double max_diff(const ComplexVector& a, const ComplexVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

ComplexVector vec_of(std::initializer_list<std::pair<BasisLabel, Complex>> terms, int n_max = 20) {
    ComplexVector v = ComplexVector::Zero(2 * (n_max + 1));
    for (const auto& [label, amp] : terms) v(basis_index(label, n_max)) = amp;
    return v;
}

struct SilenceWarnings {
    SilenceWarnings() { set_warning_handler([](std::string_view) {}); }
    ~SilenceWarnings() { set_warning_handler(nullptr); }
};

}  // namespace

TEST_CASE("carrier π pulse on ↓0") {
    const CouplingModel m = default_model();
    const PulseSpec p{0, (pi / 2.0) / m.rabi(0, 0), 0.0};
    const IonState out = apply_pulse(basis(Spin::Down, 0), p, m);
    CHECK(max_diff(out.amplitudes(), vec_of({{{Spin::Up, 0}, -I}})) < 1e-15);
    CHECK(p_down(out) < 1e-30);
}

TEST_CASE("two full Rabi cycles return ↓0 exactly") {
    const CouplingModel m = default_model();
    const IonState out = apply_pulse(basis(Spin::Down, 0), {0, 2.0 * pi / m.rabi(0, 0), 0.0}, m);
    CHECK(max_diff(out.amplitudes(), vec_of({{{Spin::Down, 0}, 1.0}})) < 1e-14);
}

TEST_CASE("3π pulse on ↓2") {
    const CouplingModel m = default_model();
    const IonState out = apply_pulse(basis(Spin::Down, 2), {0, 1.5 * pi / m.rabi(2, 2), 0.0}, m);
    CHECK(max_diff(out.amplitudes(), vec_of({{{Spin::Up, 2}, I}})) < 1e-14);
}

TEST_CASE("apply_area examples") {
    const CouplingModel m = default_model();
    const IonState d0 = basis(Spin::Down, 0);
    const IonState full = apply_area(d0, 2, pi, 0.0, m, 0);
    CHECK(max_diff(full.amplitudes(), vec_of({{{Spin::Up, 2}, -I}})) < 1e-15);

    const IonState half = apply_area(d0, 2, pi / 2.0, 0.0, m, 0);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(max_diff(half.amplitudes(), vec_of({{{Spin::Down, 0}, r}, {{Spin::Up, 2}, -I * r}})) < 1e-15);

    std::mt19937_64 rng(3);
    const IonState any = oracle::random_pure(rng, 20, 10);
    const IonState same = apply_area(any, 1, 0.0, 0.7, m, 0);
    CHECK(max_diff(same.amplitudes(), any.amplitudes()) == 0.0);

    const PulseSpec spec = pulse_for_area(-1, pi, 0.0, m, 2);
    CHECK(spec.duration == doctest::Approx((pi / 2.0) / m.rabi(2, 1)).epsilon(1e-15));
}

TEST_CASE("degenerate pulse") {
    const CouplingModel m = default_model();
    CHECK_NOTHROW(pulse_for_area(0, pi, 0.0, m, 1));
    CHECK_THROWS_AS(pulse_for_area(0, pi, 0.0, m, 25), DomainError);
    const CouplingModel zero(kOmegaZ, 0.3, 0.0);
    CHECK_THROWS_AS(pulse_for_area(0, pi, 0.0, zero, 0), DegeneratePulseError);
}

TEST_CASE("pulse validation") {
    const CouplingModel m = default_model();
    CHECK_THROWS_AS(apply_pulse(basis(Spin::Down, 0), {4, 1e-6, 0.0}, m), ConfigError);
    CHECK_THROWS_AS(apply_pulse(basis(Spin::Down, 0), {0, -1e-6, 0.0}, m), ConfigError);
    CHECK_THROWS_AS(apply_pulse(basis(Spin::Down, 0), {0, 1e-6, 0.0}, CouplingModel(kOmegaZ, 0.3, 1.0, 10)),
                    ConfigError);
    CHECK_THROWS_AS(apply_pulse(basis(Spin::Down, 18), {2, 1e-6, 0.0}, m), TruncationError);
    NoiseConfig bad;
    bad.prep_error = 1.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = {};
    bad.tau = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("red sideband below its order is a no-op") {
    const CouplingModel m = default_model();
    const IonState d0 = basis(Spin::Down, 0);
    const IonState out = apply_pulse(d0, {-2, 3e-6, 0.4}, m);
    CHECK(max_diff(out.amplitudes(), d0.amplitudes()) == 0.0);
    const IonState d1 = basis(Spin::Down, 1);
    CHECK(max_diff(apply_pulse(d1, {-2, 3e-6, 0.4}, m).amplitudes(), d1.amplitudes()) == 0.0);
    // ↑1 pairs with ↓3 and does move.
    CHECK(apply_pulse(basis(Spin::Up, 1), {-2, 3e-6, 0.4}, m).population({Spin::Up, 1}) < 1.0);
}

TEST_CASE("CNOT truth table") {
    const CouplingModel m = default_model();
    CHECK(p_down(cnot(basis(Spin::Down, 0), m)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p_down(cnot(basis(Spin::Up, 0), m)) < 1e-28);
    CHECK(p_down(cnot(basis(Spin::Down, 2), m)) < 1e-28);
    CHECK(p_down(cnot(basis(Spin::Up, 2), m)) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK(max_diff(cnot(basis(Spin::Down, 2), m).amplitudes(), vec_of({{{Spin::Up, 2}, I}})) < 1e-14);
    CHECK(max_diff(cnot(basis(Spin::Up, 2), m).amplitudes(), vec_of({{{Spin::Down, 2}, I}})) < 1e-14);
    CHECK(max_diff(cnot(basis(Spin::Up, 0), m).amplitudes(), vec_of({{{Spin::Up, 0}, 1.0}})) < 1e-14);

    const double r = 1.0 / std::sqrt(2.0);
    const IonState in = IonState::pure(vec_of({{{Spin::Down, 0}, r}, {{Spin::Up, 2}, r}}), 20);
    const IonState out = cnot(in, m);
    CHECK(max_diff(out.amplitudes(), vec_of({{{Spin::Down, 0}, r}, {{Spin::Down, 2}, I * r}})) < 1e-14);
    CHECK(std::abs(p_down(out) - 1.0) < 1e-14);
}

TEST_CASE("CNOT warns on a detuned model and still runs") {
    std::string captured;
    set_warning_handler([&](std::string_view msg) { captured = msg; });
    const CouplingModel detuned = CouplingModel::from_carrier_rate(kOmegaZ, 0.3, kTwoPi * 92e3);
    const IonState out = cnot(basis(Spin::Down, 0), detuned);
    set_warning_handler(nullptr);
    CHECK_FALSE(captured.empty());
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);

    captured.clear();
    set_warning_handler([&](std::string_view msg) { captured = msg; });
    (void)cnot(basis(Spin::Down, 0), default_model());
    set_warning_handler(nullptr);
    CHECK(captured.empty());
}

TEST_CASE("property: pulses preserve norm and trace") {
    SilenceWarnings quiet;
    const CouplingModel m = CouplingModel::from_carrier_rate(kOmegaZ, 0.3594, kTwoPi * 92e3, 40);
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> order(-3, 3);
    std::uniform_real_distribution<double> duration(0.0, 100e-6);
    std::uniform_real_distribution<double> phase(-pi, pi);
    double worst_norm = 0.0;
    double worst_trace = 0.0;
    double worst_herm = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const PulseSpec p{order(rng), duration(rng), phase(rng)};
        if (trial % 10 == 0) {
            const IonState rho = oracle::random_density(rng, 40, 12, 3);
            const IonState out = apply_pulse(rho, p, m);
            worst_trace = std::max(worst_trace, std::abs(out.rho().trace().real() - 1.0));
            worst_herm = std::max(worst_herm, (out.rho() - out.rho().adjoint()).cwiseAbs().maxCoeff());
        } else {
            const IonState psi = oracle::random_pure(rng, 40, 12);
            worst_norm = std::max(worst_norm, std::abs(apply_pulse(psi, p, m).norm() - 1.0));
        }
    }
    CHECK(worst_norm < 1e-12);
    CHECK(worst_trace < 1e-12);
    CHECK(worst_herm < 1e-12);
}

TEST_CASE("property: two π pulses give −identity on the coupled pair") {
    const CouplingModel m = default_model();
    std::mt19937_64 rng(5);
    for (int dn : {0, 1, 2, -1, -2}) {
        for (int ref : {0, 1, 2, 3}) {
            if (ref + dn < 0) continue;
            const double phase = std::uniform_real_distribution<double>(-pi, pi)(rng);
            const double a = std::sqrt(0.3);
            const double b = std::sqrt(0.7);
            const ComplexVector in =
                vec_of({{{Spin::Down, ref}, a}, {{Spin::Up, ref + dn}, b * std::exp(I * 0.3)}});
            IonState s = IonState::pure(in, 20);
            s = apply_area(s, dn, pi, phase, m, ref);
            s = apply_area(s, dn, pi, phase, m, ref);
            CAPTURE(dn);
            CAPTURE(ref);
            CHECK(max_diff(s.amplitudes(), -in) < 1e-13);
        }
    }
}

TEST_CASE("property: phase covariance") {
    const CouplingModel m = default_model();
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int trial = 0; trial < 50; ++trial) {
        const double phi = u(rng);
        const double delta = u(rng);
        const double t = std::abs(u(rng)) * 1e-5;
        const int dn = trial % 3;
        const IonState d = basis(Spin::Down, 1);
        const IonState a = apply_pulse(d, {dn, t, phi}, m);
        const IonState b = apply_pulse(d, {dn, t, phi + delta}, m);
        const BasisLabel target{Spin::Up, 1 + dn};
        CHECK(std::abs(b.amplitude(target) - std::exp(I * delta) * a.amplitude(target)) < 1e-14);
        CHECK(std::abs(b.amplitude({Spin::Down, 1}) - a.amplitude({Spin::Down, 1})) < 1e-15);
        for (int k = 0; k < a.dim(); ++k) {
            CHECK(std::abs(std::norm(a.amplitudes()(k)) - std::norm(b.amplitudes()(k))) < 1e-15);
        }
    }
}

TEST_CASE("property: CNOT twice restores populations") {
    const CouplingModel m = default_model();
    for (Spin s : {Spin::Down, Spin::Up}) {
        for (int n : {0, 2}) {
            const IonState in = basis(s, n);
            const IonState twice = cnot(cnot(in, m), m);
            CHECK(std::abs(twice.population({s, n}) - 1.0) < 1e-12);
            const Complex expected = n == 2 ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
            CHECK(std::abs(twice.amplitude({s, n}) - expected) < 1e-12);
        }
    }
}

TEST_CASE("property: carrier spin-flip symmetry") {
    const CouplingModel m = default_model();
    for (int n : {0, 2}) {
        const double sum = p_down(cnot(basis(Spin::Down, n), m)) + p_down(cnot(basis(Spin::Up, n), m));
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("preparation recipes") {
    const CouplingModel m = default_model();
    const NoiseConfig ideal;

    const IonState up0 = prep({PrepRecipe::Up0}, m, ideal);
    CHECK(std::abs(up0.population({Spin::Up, 0}) - 1.0) < 1e-14);

    const IonState down2 = prep({PrepRecipe::Down2}, m, ideal);
    CHECK(std::abs(p_down(down2) - 1.0) < 1e-12);
    CHECK(std::abs(down2.fock_population(2) - 1.0) < 1e-12);

    const IonState up2 = prep({PrepRecipe::Up2}, m, ideal);
    CHECK(std::abs(up2.population({Spin::Up, 2}) - 1.0) < 1e-14);

    const IonState fig2 = prep({PrepRecipe::Fig2Superposition}, m, ideal);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(max_diff(fig2.amplitudes(), vec_of({{{Spin::Down, 0}, r}, {{Spin::Up, 2}, -I * r}})) < 1e-15);

    CHECK(prep_sequence({PrepRecipe::Down0}, m).empty());
    CHECK(prep_sequence({PrepRecipe::Down2}, m).size() == 2);
}

TEST_CASE("phase-state depends linearly on φ with unit coefficient") {
    const CouplingModel m = default_model();
    const IonState ref = prep({PrepRecipe::PhaseState, 0.0}, m, {});
    const Complex a0 = ref.amplitude({Spin::Down, 0});
    const Complex a2 = ref.amplitude({Spin::Down, 2});
    CHECK(std::abs(std::abs(a0) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(std::abs(a2) - std::sqrt(0.5)) < 1e-12);
    CHECK(std::abs(p_down(ref) - 1.0) < 1e-12);
    const double offset = std::arg(a2 / a0);
    for (double phi : {-2.5, -1.0, 0.3, 1.7, 3.0}) {
        const IonState s = prep({PrepRecipe::PhaseState, phi}, m, {});
        const double rel = std::arg(s.amplitude({Spin::Down, 2}) / s.amplitude({Spin::Down, 0}));
        CHECK(std::abs(std::remainder(rel - offset - phi, 2.0 * pi)) < 1e-12);
    }
}

TEST_CASE("preparation error") {
    const CouplingModel m = default_model();
    NoiseConfig noise;
    noise.prep_error = 0.04;
    const IonState up0 = prep({PrepRecipe::Up0}, m, noise);
    CHECK_FALSE(up0.is_pure());
    CHECK(std::abs(up0.population({Spin::Down, 0}) - 0.04) < 1e-14);
    CHECK(std::abs(up0.population({Spin::Up, 0}) - 0.96) < 1e-14);

    int flipped = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const IonState shot = prep_sample({PrepRecipe::Up0}, m, noise, seed);
        CHECK(shot.is_pure());
        if (shot.population({Spin::Down, 0}) > 0.5) ++flipped;
    }
    // Binomial(2000, 0.04): mean 80, sd ≈ 8.8
    CHECK(flipped > 45);
    CHECK(flipped < 115);
    CHECK(prep_sample({PrepRecipe::Up0}, m, noise, 17).amplitudes() ==
          prep_sample({PrepRecipe::Up0}, m, noise, 17).amplitudes());
}

TEST_CASE("recipe names") {
    for (auto r : {PrepRecipe::Down0, PrepRecipe::Up0, PrepRecipe::Down2, PrepRecipe::Up2,
                   PrepRecipe::Fig2Superposition, PrepRecipe::PhaseState}) {
        CHECK(parse_recipe(recipe_name(r)) == r);
    }
    CHECK_THROWS_AS(parse_recipe("sideways"), ConfigError);
}

TEST_CASE("contrast decay channel") {
    NoiseConfig noise;
    const double r = 1.0 / std::sqrt(2.0);
    const IonState in = IonState::pure(vec_of({{{Spin::Down, 0}, r}, {{Spin::Up, 2}, r}}), 20);
    const IonState same = apply_contrast_decay(in, 1e-3, noise);
    CHECK((same.rho() - to_density(in).rho()).cwiseAbs().maxCoeff() == 0.0);

    noise.tau = 170e-6;
    const IonState out = apply_contrast_decay(in, noise.tau, noise);
    const int i = basis_index({Spin::Down, 0}, 20);
    const int j = basis_index({Spin::Up, 2}, 20);
    CHECK(std::abs(std::abs(out.rho()(i, j)) - 0.5 * std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(out.rho().trace().real() - 1.0) < 1e-15);
    CHECK(out.rho()(i, i) == to_density(in).rho()(i, i));

    const double s = 1.0 / std::sqrt(2.0);
    const IonState motional = IonState::pure(vec_of({{{Spin::Down, 0}, s}, {{Spin::Down, 2}, s}}), 20);
    const IonState kept = apply_contrast_decay(motional, noise.tau, noise);
    CHECK(std::abs(kept.rho()(0, 2) - Complex(0.5, 0.0)) < 1e-15);

    std::mt19937_64 rng(9);
    const IonState rho = apply_contrast_decay(oracle::random_density(rng, 20, 6, 4), 50e-6, noise);
    CHECK(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(rho.rho()).eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("noisy carrier reproduces the decaying Rabi closed form") {
    const CouplingModel m = default_model();
    NoiseConfig noise;
    noise.tau = 170e-6;
    for (int n : {0, 1, 2, 3}) {
        for (double t : {0.0, 3e-6, 10e-6, 47e-6, 120e-6}) {
            for (Spin s : {Spin::Down, Spin::Up}) {
                const IonState out = apply_pulse(basis(s, n), {0, t, 0.0}, m, noise);
                const double expected = oracle::rabi_block_p_down(m.rabi(n, n), t, noise.tau, s == Spin::Down);
                CHECK(std::abs(p_down(out) - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("noisy sequences equal the ideal ones when τ is infinite") {
    const CouplingModel m = default_model();
    const auto seq = prep_sequence({PrepRecipe::PhaseState, 0.8}, m);
    const IonState a = apply_sequence(basis(Spin::Down, 0), seq, m);
    IonState b = basis(Spin::Down, 0);
    for (const auto& p : seq) b = apply_pulse(b, p, m);
    CHECK(max_diff(a.amplitudes(), b.amplitudes()) == 0.0);
}

TEST_CASE("pulse JSON") {
    const CouplingModel m = default_model();
    const std::vector<PulseSpec> seq{{1, 3.25e-6, 0.5}, {-1, 1.0 / 3.0 * 1e-5, -2.0}, {0, 0.0, 0.0}};
    CHECK(pulses_from_json(pulses_to_json(seq)) == seq);

    const std::string by_area = R"([{"delta_n": 2, "area": 3.141592653589793, "reference_n": 0, "phase": 0}])";
    const auto resolved = pulses_from_json(by_area, &m);
    REQUIRE(resolved.size() == 1);
    CHECK(resolved[0] == pulse_for_area(2, pi, 0.0, m, 0));
    CHECK_THROWS_AS(pulses_from_json(by_area), ConfigError);
    CHECK_THROWS_AS(pulses_from_json(R"([{"delta_n": 0}])"), ConfigError);
    CHECK_THROWS_AS(pulses_from_json("{}"), ConfigError);
}
