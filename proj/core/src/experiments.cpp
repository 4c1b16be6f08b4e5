#include "ionlogic/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "ionlogic/errors.hpp"
#include "ionlogic/seeding.hpp"
#include "format.hpp"
#include "least_squares.hpp"

namespace ionlogic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<BasisLabel, 4> kTruthInputs{
    {{Spin::Down, 0}, {Spin::Up, 0}, {Spin::Down, 2}, {Spin::Up, 2}}};
constexpr std::array<double, 4> kTruthIdeal{1.0, 0.0, 0.0, 1.0};

PrepSpec prep_for(BasisLabel label) {
    if (label.n == 0) return {label.spin == Spin::Down ? PrepRecipe::Down0 : PrepRecipe::Up0, 0.0};
    return {label.spin == Spin::Down ? PrepRecipe::Down2 : PrepRecipe::Up2, 0.0};
}

}  // namespace

PEstimate measure(const IonState& state, const ReadoutConfig& readout, std::uint64_t seed) {
    const double p = std::clamp(p_down(state), 0.0, 1.0);
    if (readout.bypass) return {p, 0.0};
    const CountHistogram hist = simulate_histogram(p, readout.shots, readout.detector, seed);
    return estimate_p_down(hist, readout.detector);
}

void ScanCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i].x > points[i - 1].x)) {
            throw DomainError("scan abscissae must be strictly increasing");
        }
        if (!(points[i].p_down >= 0.0 && points[i].p_down <= 1.0)) {
            throw DomainError("scan estimate outside [0, 1]");
        }
        if (!(points[i].sigma >= 0.0)) throw DomainError("negative scan uncertainty");
    }
}

const FitParam& FitResult::at(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw Error("fit result has no parameter '" + name + "'");
    return it->second;
}

std::array<TruthRow, 4> run_truth_table(const CouplingModel& model, const NoiseConfig& noise,
                                        const ReadoutConfig& readout, std::uint64_t seed) {
    std::array<TruthRow, 4> rows;
    for (std::size_t i = 0; i < kTruthInputs.size(); ++i) {
        const IonState input = prep(prep_for(kTruthInputs[i]), model, noise);
        const IonState output = cnot(input, model, noise);
        const PEstimate est = measure(output, readout, derive_seed(seed, i));
        rows[i] = {kTruthInputs[i], kTruthIdeal[i], est.value, est.sigma};
    }
    return rows;
}

ScanCurve run_rabi_scan(const CouplingModel& model, const NoiseConfig& noise,
                        const ReadoutConfig& readout, const std::vector<double>& times,
                        std::uint64_t seed) {
    const IonState input = prep({PrepRecipe::Fig2Superposition, 0.0}, model, noise);
    ScanCurve curve;
    curve.points.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const IonState out = apply_pulse(input, PulseSpec{0, times[i], 0.0}, model, noise);
        const PEstimate est = measure(out, readout, derive_seed(seed, i));
        curve.points.push_back({times[i], est.value, est.sigma});
    }
    curve.validate();
    return curve;
}

double rabi_scan_closed_form(const CouplingModel& model, double tau, double t) {
    const double envelope = std::isfinite(tau) ? std::exp(-t / tau) : 1.0;
    return 0.5 + 0.25 * envelope *
                     (std::cos(2.0 * model.rabi(0, 0) * t) - std::cos(2.0 * model.rabi(2, 2) * t));
}

ScanCurve run_fringe_scan(const CouplingModel& model, const NoiseConfig& noise,
                          const ReadoutConfig& readout, const std::vector<double>& phases,
                          std::uint64_t seed, bool coherent) {
    // Analysis-pulse phase is fixed; any other constant only moves the fringe offset.
    const PulseSpec analysis = pulse_for_area(+2, kPi / 2.0, 0.0, model, 0);
    ScanCurve curve;
    curve.points.reserve(phases.size());
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const IonState input = prep({PrepRecipe::PhaseState, phases[i]}, model, noise);
        IonState gated = cnot(input, model, noise);
        if (!coherent) gated = dephase_motion(gated);
        const IonState out = apply_pulse(gated, analysis, model, noise);
        const PEstimate est = measure(out, readout, derive_seed(seed, i));
        curve.points.push_back({phases[i], est.value, est.sigma});
    }
    curve.validate();
    return curve;
}

namespace {

struct Weights {
    Eigen::VectorXd inv_sigma;
    bool weighted = false;
};

Weights weights_for(const ScanCurve& curve) {
    Weights w;
    w.inv_sigma = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(curve.size()));
    w.weighted = std::all_of(curve.points.begin(), curve.points.end(),
                             [](const ScanPoint& p) { return p.sigma > 0.0; });
    if (w.weighted) {
        for (std::size_t i = 0; i < curve.size(); ++i) w.inv_sigma(i) = 1.0 / curve.points[i].sigma;
    }
    return w;
}

struct Peak {
    double freq;  // cycles per unit of x
    double power;
};

// Hann-windowed periodogram peaks of the mean-subtracted data, strongest first.
std::vector<Peak> spectral_peaks(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index n = x.size();
    const double span = x(n - 1) - x(0);
    std::vector<double> gaps(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i + 1 < n; ++i) gaps[static_cast<std::size_t>(i)] = x(i + 1) - x(i);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double dt = gaps[gaps.size() / 2];

    const Eigen::VectorXd centered = y.array() - y.mean();
    Eigen::VectorXd tapered(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        tapered(i) = centered(i) * 0.5 * (1.0 - std::cos(2.0 * kPi * (x(i) - x(0)) / span));
    }

    const double df = 1.0 / (16.0 * span);
    const double fmin = 1.5 / span;
    const double fmax = 0.5 / dt;
    std::vector<double> freqs;
    std::vector<double> power;
    for (double f = fmin; f <= fmax; f += df) {
        std::complex<double> acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) acc += tapered(i) * std::polar(1.0, -2.0 * kPi * f * x(i));
        freqs.push_back(f);
        power.push_back(std::norm(acc));
    }

    std::vector<Peak> peaks;
    for (std::size_t k = 1; k + 1 < power.size(); ++k) {
        if (power[k] > power[k - 1] && power[k] >= power[k + 1]) {
            // Parabolic refinement on the three neighbouring samples.
            const double a = power[k - 1];
            const double b = power[k];
            const double c = power[k + 1];
            const double denom = a - 2.0 * b + c;
            const double shift = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
            peaks.push_back({freqs[k] + shift * df, b});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& l, const Peak& r) { return l.power > r.power; });
    return peaks;
}

}  // namespace

FitResult fit_double_sine_decay(const ScanCurve& curve) {
    curve.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(curve.size());
    if (n < 30) throw FitError("double-sine fit needs at least 30 points, got " + std::to_string(n));

    // Work in units of the scan span so all parameters are of order one.
    const double t0 = curve.points.front().x;
    const double span = curve.points.back().x - t0;
    Eigen::VectorXd u(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u(i) = (curve.points[static_cast<std::size_t>(i)].x - t0) / span;
        y(i) = curve.points[static_cast<std::size_t>(i)].p_down;
    }
    const Weights w = weights_for(curve);

    const std::vector<Peak> peaks = spectral_peaks(u, y);
    if (peaks.empty()) throw FitError("no oscillation found in the scan");
    const Peak first = peaks.front();
    const Peak* second = nullptr;
    for (std::size_t k = 1; k < peaks.size(); ++k) {
        if (std::abs(peaks[k].freq - first.freq) >= 2.0) {  // outside the Hann main lobe
            second = &peaks[k];
            break;
        }
    }
    if (second == nullptr || std::sqrt(second->power / first.power) < 0.1) {
        throw FitError("scan shows a single frequency component; two-frequency model is degenerate");
    }

    // Model evaluated on u = (t − t0)/span; x = [c, a, b, w1, w2, g].
    auto model_eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
        r.resize(n);
        jac.resize(n, 6);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = u(i);
            const double e = std::exp(-p(5) * t);
            const double c1 = std::cos(p(3) * t), s1 = std::sin(p(3) * t);
            const double c2 = std::cos(p(4) * t), s2 = std::sin(p(4) * t);
            const double osc = p(1) * c1 + p(2) * c2;
            const double f = p(0) + e * osc;
            const double ws = w.inv_sigma(i);
            r(i) = (y(i) - f) * ws;
            jac(i, 0) = -ws;
            jac(i, 1) = -ws * e * c1;
            jac(i, 2) = -ws * e * c2;
            jac(i, 3) = ws * e * p(1) * t * s1;
            jac(i, 4) = ws * e * p(2) * t * s2;
            jac(i, 5) = ws * t * e * osc;
        }
    };

    // Offsets and amplitudes are linear once frequencies and decay are fixed;
    // pick the best starting decay from a short ladder.
    const double w1_0 = 2.0 * kPi * std::max(first.freq, second->freq);
    const double w2_0 = 2.0 * kPi * std::min(first.freq, second->freq);
    Eigen::VectorXd best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (double g : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
        Eigen::MatrixXd design(n, 3);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double e = std::exp(-g * u(i));
            design(i, 0) = w.inv_sigma(i);
            design(i, 1) = w.inv_sigma(i) * e * std::cos(w1_0 * u(i));
            design(i, 2) = w.inv_sigma(i) * e * std::cos(w2_0 * u(i));
        }
        const Eigen::VectorXd rhs = y.cwiseProduct(w.inv_sigma);
        const Eigen::VectorXd lin = design.colPivHouseholderQr().solve(rhs);
        const double cost = (design * lin - rhs).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best.resize(6);
            best << lin(0), lin(1), lin(2), w1_0, w2_0, g;
        }
    }

    const detail::LmResult lm = detail::levenberg_marquardt(model_eval, best);
    if (!lm.converged || !lm.x.allFinite()) {
        throw FitError("double-sine fit did not converge after " + std::to_string(lm.iterations) +
                       " iterations (scaled gradient " + std::to_string(lm.gradient_norm) +
                       ", cost " + std::to_string(lm.cost) + ")");
    }

    Eigen::VectorXd p = lm.x;
    const int dof = static_cast<int>(n) - 6;
    const double scale = dof > 0 ? lm.cost / dof : 0.0;
    Eigen::MatrixXd cov = lm.jtj.completeOrthogonalDecomposition().pseudoInverse() * scale;
    if (p(3) < p(4)) {
        // Keep Ω1 > Ω2 by swapping the two oscillation components.
        Eigen::PermutationMatrix<6> perm;
        perm.indices() << 0, 2, 1, 4, 3, 5;
        p = perm.transpose() * p;
        cov = perm.transpose() * cov * perm;
    }
    auto sd = [&](int k) { return std::sqrt(std::max(0.0, cov(k, k))); };

    FitResult res;
    res.rss = lm.cost;
    res.dof = dof;
    res.iterations = lm.iterations;
    res.gradient_norm = lm.gradient_norm;
    res.converged = lm.converged;
    res.params["c"] = {p(0), sd(0)};
    res.params["a"] = {p(1), sd(1)};
    res.params["b"] = {p(2), sd(2)};
    // cos(w u) = cos(2Ω t) with u = t/span, so Ω = w / (2 span).
    res.params["Omega1"] = {p(3) / (2.0 * span), sd(3) / (2.0 * span)};
    res.params["Omega2"] = {p(4) / (2.0 * span), sd(4) / (2.0 * span)};
    const double g = p(5) / span;
    res.params["tau"] = {g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity(),
                         g > 0.0 ? sd(5) / span / (g * g) : std::numeric_limits<double>::infinity()};
    const double ratio = p(3) / p(4);
    const double var_ratio = (cov(3, 3) / (p(4) * p(4)) + cov(4, 4) * p(3) * p(3) / std::pow(p(4), 4) -
                              2.0 * cov(3, 4) * p(3) / std::pow(p(4), 3));
    res.params["ratio"] = {ratio, std::sqrt(std::max(0.0, var_ratio))};
    return res;
}

FitResult fit_fringe(const ScanCurve& curve) {
    curve.validate();
    const Eigen::Index n = static_cast<Eigen::Index>(curve.size());
    if (n < 3) throw FitError("fringe fit needs at least three points");
    const Weights w = weights_for(curve);
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pt = curve.points[static_cast<std::size_t>(i)];
        design(i, 0) = w.inv_sigma(i);
        design(i, 1) = w.inv_sigma(i) * std::cos(pt.x);
        design(i, 2) = w.inv_sigma(i) * std::sin(pt.x);
        rhs(i) = w.inv_sigma(i) * pt.p_down;
    }
    const Eigen::Matrix3d normal = design.transpose() * design;
    const Eigen::Vector3d beta = normal.ldlt().solve(design.transpose() * rhs);
    const double rss = (design * beta - rhs).squaredNorm();
    const int dof = static_cast<int>(n) - 3;
    const Eigen::Matrix3d cov = normal.inverse() * (dof > 0 ? rss / dof : 0.0);

    const double a = beta(1);
    const double b = beta(2);
    const double amp = std::hypot(a, b);
    const double contrast = 2.0 * amp;
    double var_c = 0.0;
    if (amp > 0.0) {
        var_c = 4.0 * (a * a * cov(1, 1) + b * b * cov(2, 2) + 2.0 * a * b * cov(1, 2)) / (amp * amp);
    } else {
        var_c = 4.0 * (cov(1, 1) + cov(2, 2)) / 2.0;
    }
    const double var_phase =
        amp > 0.0 ? (b * b * cov(1, 1) + a * a * cov(2, 2) - 2.0 * a * b * cov(1, 2)) / std::pow(amp, 4) : 0.0;

    FitResult res;
    res.rss = rss;
    res.dof = dof;
    res.converged = true;
    res.params["offset"] = {beta(0), std::sqrt(std::max(0.0, cov(0, 0)))};
    res.params["contrast"] = {std::clamp(contrast, 0.0, 1.0), std::sqrt(std::max(0.0, var_c))};
    res.params["contrast_raw"] = {contrast, std::sqrt(std::max(0.0, var_c))};
    res.params["phase"] = {std::atan2(b, a), std::sqrt(std::max(0.0, var_phase))};
    return res;
}

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw DomainError("grid needs step > 0 and stop ≥ start");
    const auto count = static_cast<std::size_t>(std::llround((stop - start) / step)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = start + static_cast<double>(i) * step;
    return grid;
}

std::string scan_to_csv(const ScanCurve& curve) {
    std::string out = "x,p_down,sigma\n";
    for (const auto& p : curve.points) {
        out += detail::fmt_double(p.x) + ',' + detail::fmt_double(p.p_down) + ',' +
               detail::fmt_double(p.sigma) + '\n';
    }
    return out;
}

std::string label_name(BasisLabel label) {
    return std::string(label.spin == Spin::Down ? "down" : "up") + std::to_string(label.n);
}

std::string truth_table_to_csv(const std::array<TruthRow, 4>& rows) {
    std::string out = "input,ideal,p_down,sigma\n";
    for (const auto& r : rows) {
        out += label_name(r.input) + ',' + detail::fmt_double(r.ideal) + ',' +
               detail::fmt_double(r.p_down) + ',' + detail::fmt_double(r.sigma) + '\n';
    }
    return out;
}

}  // namespace ionlogic
