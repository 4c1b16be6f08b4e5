#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ionlogic/errors.hpp"
#include "ionlogic/ionlogic.hpp"
#include "run_config.hpp"

namespace ionlogic::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Flags {
    std::string config_path;
    std::string omega_z;
    std::string omega_00;
    double eta = 0.0;
    double target_ratio = 0.0;
    std::string tau;
    double prep_error = 0.0;
    double lambda_bright = 0.0;
    double lambda_dark = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    int n_max = 0;
    bool ideal = false;
    std::string csv;
    std::string json;

    // subcommand options
    std::string sequence_path;
    std::string tmin = "0us";
    std::string tmax = "150us";
    std::string step = "1us";
    bool no_fit = false;
    int points = 32;
    bool incoherent = false;
    std::vector<int> levels{0, 1, 2, 3, 4};
    std::vector<double> speeds{0.005, 0.01, 0.02, 0.04, 0.08};
    double p = 0.5;
    std::string histogram_path;
    std::string ref_bright_path;
    std::string ref_dark_path;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config file or a previous run summary");
    sub->add_option("--omega-z", f.omega_z, "Trap frequency, e.g. 3.4MHz");
    sub->add_option("--omega-00", f.omega_00, "Carrier Rabi frequency Ω00, e.g. 92kHz");
    sub->add_option("--eta", f.eta, "Lamb-Dicke parameter");
    sub->add_option("--target-ratio", f.target_ratio, "Ω00/Ω22 used to derive eta");
    sub->add_option("--tau", f.tau, "Contrast-decay time, e.g. 170us; 'inf' disables");
    sub->add_option("--prep-error", f.prep_error, "Spin preparation error probability");
    sub->add_option("--lambda-bright", f.lambda_bright, "Mean bright counts per window");
    sub->add_option("--lambda-dark", f.lambda_dark, "Mean dark counts per window");
    sub->add_option("--shots", f.shots, "Shots per data point");
    sub->add_option("--seed", f.seed, "RNG seed (required unless --ideal)");
    sub->add_option("--n-max", f.n_max, "Fock truncation");
    sub->add_flag("--ideal", f.ideal, "No noise, exact readout");
    sub->add_option("--csv", f.csv, "Write the data table here ('-' for stdout)");
    sub->add_option("--json", f.json, "Write the run summary here ('-' for stdout)");
}

RunConfig resolve_config(const CLI::App& sub, const Flags& f) {
    RunConfig cfg;
    if (sub.count("--config") > 0) cfg = load_config_file(f.config_path, cfg);
    if (sub.count("--eta") > 0 && sub.count("--target-ratio") > 0) {
        throw ConfigError("give either --eta or --target-ratio, not both");
    }
    if (sub.count("--omega-z") > 0) cfg.omega_z_hz = parse_frequency(f.omega_z);
    if (sub.count("--omega-00") > 0) cfg.omega_00_hz = parse_frequency(f.omega_00);
    if (sub.count("--eta") > 0) {
        cfg.eta = f.eta;
        cfg.target_ratio.reset();
    }
    if (sub.count("--target-ratio") > 0) {
        cfg.target_ratio = f.target_ratio;
        cfg.eta.reset();
    }
    if (sub.count("--tau") > 0) {
        cfg.tau_s = f.tau == "inf" ? std::numeric_limits<double>::infinity() : parse_duration(f.tau);
    }
    if (sub.count("--prep-error") > 0) cfg.prep_error = f.prep_error;
    if (sub.count("--lambda-bright") > 0) cfg.lambda_bright = f.lambda_bright;
    if (sub.count("--lambda-dark") > 0) cfg.lambda_dark = f.lambda_dark;
    if (sub.count("--shots") > 0) cfg.shots = f.shots;
    if (sub.count("--seed") > 0) cfg.seed = f.seed;
    if (sub.count("--n-max") > 0) cfg.n_max = f.n_max;
    if (f.ideal) cfg.ideal = true;
    if (sub.count("--csv") > 0) cfg.csv_path = f.csv;
    if (sub.count("--json") > 0) cfg.json_path = f.json;
    cfg.resolve();
    return cfg;
}

void require_seed(const RunConfig& cfg, const char* command) {
    if (!cfg.ideal && !cfg.seed) {
        throw ConfigError(std::string(command) + " is stochastic: pass --seed or --ideal");
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) return;
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
    if (!f) throw Error("write to '" + path + "' failed");
}

std::string printf_string(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_to_json(const FitResult& fit) {
    json j;
    for (const auto& [name, p] : fit.params) {
        j["params"][name] = {{"value", number_or_null(p.value)}, {"sigma", number_or_null(p.sigma)}};
    }
    j["rss"] = fit.rss;
    j["dof"] = fit.dof;
    j["iterations"] = fit.iterations;
    j["gradient_norm"] = fit.gradient_norm;
    j["converged"] = fit.converged;
    return j;
}

json model_to_json(const CouplingModel& m) {
    return {{"eta", m.eta()},
            {"omega_z", m.omega_z()},
            {"omega_00", m.rabi(0, 0)},
            {"omega_22", m.rabi(2, 2)},
            {"carrier_ratio", m.carrier_ratio()},
            {"gate_time_s", gate_time(m)}};
}

json scan_to_json(const ScanCurve& curve) {
    json pts = json::array();
    for (const auto& p : curve.points) pts.push_back({p.x, p.p_down, p.sigma});
    return pts;
}

struct Outcome {
    std::string csv;
    json options;
    json results;
    std::string summary;
    int code = kOk;
};

Outcome truth_table(const RunConfig& cfg, const Flags& f) {
    require_seed(cfg, "truth-table");
    const CouplingModel model = cfg.model();
    const std::uint64_t seed = cfg.seed.value_or(0);
    Outcome o;
    std::array<TruthRow, 4> rows;
    if (!f.sequence_path.empty()) {
        const auto seq = pulses_from_json(read_file(f.sequence_path), &model);
        const NoiseConfig noise = cfg.noise();
        const std::array<std::pair<PrepRecipe, double>, 4> inputs{
            {{PrepRecipe::Down0, 1.0}, {PrepRecipe::Up0, 0.0}, {PrepRecipe::Down2, 0.0}, {PrepRecipe::Up2, 1.0}}};
        const std::array<BasisLabel, 4> labels{
            {{Spin::Down, 0}, {Spin::Up, 0}, {Spin::Down, 2}, {Spin::Up, 2}}};
        for (std::size_t i = 0; i < 4; ++i) {
            const IonState in = prep({inputs[i].first, 0.0}, model, noise);
            const PEstimate e = measure(apply_sequence(in, seq, model, noise), cfg.readout(), derive_seed(seed, i));
            rows[i] = {labels[i], inputs[i].second, e.value, e.sigma};
        }
        o.options["sequence"] = json::parse(pulses_to_json(seq));
    } else {
        rows = run_truth_table(model, cfg.noise(), cfg.readout(), seed);
    }
    o.csv = truth_table_to_csv(rows);
    json table = json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
        table.push_back({{"input", label_name(r.input)}, {"ideal", r.ideal}, {"p_down", r.p_down}, {"sigma", r.sigma}});
        worst = std::max(worst, std::abs(r.p_down - r.ideal));
    }
    o.results["model"] = model_to_json(model);
    o.results["truth_table"] = table;
    o.results["max_deviation"] = worst;
    o.results["reference_measured"] = kReferenceTruthTable;
    o.summary = printf_string(
        "truth-table: P(down) = (%.3f, %.3f, %.3f, %.3f) for (down0, up0, down2, up2); max deviation %.3f; "
        "measured reference (%.3f, %.3f, %.3f, %.3f)",
        rows[0].p_down, rows[1].p_down, rows[2].p_down, rows[3].p_down, worst, kReferenceTruthTable[0],
        kReferenceTruthTable[1], kReferenceTruthTable[2], kReferenceTruthTable[3]);
    return o;
}

Outcome rabi_scan(const RunConfig& cfg, const Flags& f) {
    require_seed(cfg, "rabi-scan");
    const CouplingModel model = cfg.model();
    const double tmin = parse_duration(f.tmin);
    const double tmax = parse_duration(f.tmax);
    const double step = parse_duration(f.step);
    const auto times = linear_grid(tmin, tmax, step);
    const ScanCurve curve = run_rabi_scan(model, cfg.noise(), cfg.readout(), times, cfg.seed.value_or(0));
    Outcome o;
    o.csv = scan_to_csv(curve);
    o.options = {{"tmin_s", tmin}, {"tmax_s", tmax}, {"step_s", step}, {"fit", !f.no_fit}};
    o.results["model"] = model_to_json(model);
    o.results["points"] = curve.size();
    o.results["p_down_at_gate_time"] =
        p_down(apply_pulse(prep({PrepRecipe::Fig2Superposition, 0.0}, model, cfg.noise()),
                           {0, gate_time(model), 0.0}, model, cfg.noise()));
    o.summary = printf_string("rabi-scan: %zu points", curve.size());
    if (f.no_fit) return o;
    try {
        const FitResult fit = fit_double_sine_decay(curve);
        o.results["fit"] = fit_to_json(fit);
        const auto& r = fit.at("ratio");
        const auto& tau = fit.at("tau");
        o.summary += printf_string(", fitted ratio = %.4f +/- %.4f (model %.4f)", r.value, r.sigma,
                                   model.carrier_ratio());
        if (tau.value < 1e3 * (tmax - tmin)) {
            o.summary += printf_string(", tau = %.1f +/- %.1f us", tau.value * 1e6, tau.sigma * 1e6);
        } else {
            o.summary += ", no decay resolved";
        }
    } catch (const FitError& e) {
        o.results["fit_error"] = e.what();
        o.summary += std::string(", fit failed: ") + e.what();
        o.code = kRuntimeError;
    }
    return o;
}

Outcome fringe_scan(const RunConfig& cfg, const Flags& f) {
    require_seed(cfg, "fringe-scan");
    if (f.points < 3) throw ConfigError("--points must be at least 3");
    const CouplingModel model = cfg.model();
    std::vector<double> phases;
    for (int i = 0; i < f.points; ++i) phases.push_back(2.0 * std::numbers::pi * i / f.points);
    const ScanCurve curve =
        run_fringe_scan(model, cfg.noise(), cfg.readout(), phases, cfg.seed.value_or(0), !f.incoherent);
    const FitResult fit = fit_fringe(curve);
    Outcome o;
    o.csv = scan_to_csv(curve);
    o.options = {{"points", f.points}, {"coherent", !f.incoherent}};
    o.results["model"] = model_to_json(model);
    o.results["fit"] = fit_to_json(fit);
    const auto& c = fit.at("contrast");
    o.summary = printf_string("fringe-scan (%s): contrast = %.4f +/- %.4f, phase = %.4f rad",
                              f.incoherent ? "incoherent" : "coherent", c.value, c.sigma, fit.at("phase").value);
    return o;
}

Outcome stark(const RunConfig& cfg, const Flags& f) {
    const CouplingModel model = cfg.model();
    const auto rows = shift_table(model, f.levels);
    Outcome o;
    o.csv = shift_table_csv(rows);
    o.options = {{"levels", f.levels}};
    double worst_diff = 0.0;
    double worst_rel = 0.0;
    json table = json::array();
    for (const auto& r : rows) {
        const double diff_pert = perturbative_shift(model, Spin::Up, r.n) - perturbative_shift(model, Spin::Down, r.n);
        table.push_back({{"level", r.n},
                         {"shift_pert", r.shift_pert},
                         {"shift_exact", r.shift_exact},
                         {"differential_pert", diff_pert},
                         {"differential_exact", r.differential_exact},
                         {"rel_err", r.rel_err}});
        worst_diff = std::max(worst_diff, std::abs(r.differential_exact));
        worst_rel = std::max(worst_rel, r.rel_err);
    }
    const double speed = model.omega_base() / model.omega_z();
    o.results["model"] = model_to_json(model);
    o.results["shifts"] = table;
    o.results["max_differential_over_omega_z"] = worst_diff / model.omega_z();
    o.results["max_rel_err"] = worst_rel;
    o.results["rel_err_bound"] = 5.0 * speed * speed;
    o.summary = printf_string(
        "stark: differential shift 0 (perturbative), max |exact| = %.2e omega_z; max perturbative vs exact "
        "rel. error %.2e (bound %.2e)",
        worst_diff / model.omega_z(), worst_rel, 5.0 * speed * speed);
    return o;
}

Outcome leakage(const RunConfig& cfg, const Flags& f) {
    const CouplingModel model = cfg.model();
    const auto pts = leakage_scan(model, f.speeds);
    Outcome o;
    o.csv = leakage_csv(pts);
    o.options = {{"speeds", f.speeds}};
    json table = json::array();
    for (const auto& p : pts) table.push_back({{"speed", p.speed}, {"leakage", p.leakage}});
    o.results["model"] = model_to_json(model);
    o.results["leakage"] = table;
    o.summary = printf_string("leakage: %zu speeds", pts.size());
    if (pts.size() >= 2) {
        const double k = power_law_exponent(pts);
        o.results["power_law_exponent"] = k;
        o.summary += printf_string(", power-law exponent %.2f", k);
    }
    return o;
}

CountHistogram load_histogram(const std::string& path) {
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return histogram_from_json(text);
    return histogram_from_csv(text);
}

Outcome readout_calib(const RunConfig& cfg, const Flags& f) {
    const DetectorModel det = cfg.detector();
    Outcome o;
    CountHistogram hist;
    if (!f.histogram_path.empty()) {
        hist = load_histogram(f.histogram_path);
        o.options["histogram"] = f.histogram_path;
    } else {
        if (!cfg.seed) throw ConfigError("readout-calib simulates a histogram: pass --seed or --histogram");
        if (!(f.p >= 0.0 && f.p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
        hist = simulate_histogram(f.p, cfg.shots, det, *cfg.seed);
        o.options["p"] = f.p;
    }
    const PEstimate est = estimate_p_down(hist, det);
    o.csv = histogram_to_csv(hist);
    o.results["histogram"] = json::parse(histogram_to_json(hist));
    o.results["estimate"] = {{"value", est.value}, {"sigma", est.sigma}};
    o.results["fisher_sigma"] = fisher_sigma(est.value, hist.total(), det);
    o.summary = printf_string("readout-calib: %llu shots, p_down = %.4f +/- %.4f",
                              static_cast<unsigned long long>(hist.total()), est.value, est.sigma);

    if (!f.ref_bright_path.empty() || !f.ref_dark_path.empty()) {
        if (f.ref_bright_path.empty() || f.ref_dark_path.empty()) {
            throw ConfigError("--ref-bright and --ref-dark go together");
        }
        const PEstimate ref = estimate_from_references(hist, load_histogram(f.ref_bright_path),
                                                       load_histogram(f.ref_dark_path));
        o.options["ref_bright"] = f.ref_bright_path;
        o.options["ref_dark"] = f.ref_dark_path;
        o.results["reference_estimate"] = {{"value", ref.value}, {"sigma", ref.sigma}};
        o.summary += printf_string(" (references: %.4f +/- %.4f)", ref.value, ref.sigma);
    }
    return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trapped-ion spin-motion CNOT simulator", "ionlogic"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Flags f;

    auto* tt = app.add_subcommand("truth-table", "CNOT truth table on the four basis inputs");
    add_common(tt, f);
    tt->add_option("--sequence", f.sequence_path, "Pulse-sequence JSON applied instead of the CNOT");

    auto* rs = app.add_subcommand("rabi-scan", "Carrier drive of the superposition input, with fit");
    add_common(rs, f);
    rs->add_option("--tmin", f.tmin, "First drive time")->capture_default_str();
    rs->add_option("--tmax", f.tmax, "Last drive time")->capture_default_str();
    rs->add_option("--step", f.step, "Time step")->capture_default_str();
    rs->add_flag("--no-fit", f.no_fit, "Skip the double-sine fit");

    auto* fs = app.add_subcommand("fringe-scan", "Phase scan through the gate and an analysis pulse");
    add_common(fs, f);
    fs->add_option("--points", f.points, "Phases per period")->capture_default_str();
    fs->add_flag("--incoherent", f.incoherent, "Dephase the motional coherence after the gate");

    auto* st = app.add_subcommand("stark", "Perturbative vs exact Stark shifts");
    add_common(st, f);
    st->add_option("--levels", f.levels, "Fock levels")->delimiter(',')->capture_default_str();

    auto* lk = app.add_subcommand("leakage", "Leakage out of the computational basis vs gate speed");
    add_common(lk, f);
    lk->add_option("--speeds", f.speeds, "Gate speeds Ω00/ω_z")->delimiter(',')->capture_default_str();

    auto* rc = app.add_subcommand("readout-calib", "Simulate or load a histogram and estimate P(down)");
    add_common(rc, f);
    rc->add_option("--p", f.p, "P(down) of the simulated histogram")->capture_default_str();
    rc->add_option("--histogram", f.histogram_path, "Histogram file (CSV bin,count or JSON)");
    rc->add_option("--ref-bright", f.ref_bright_path, "Bright reference histogram");
    rc->add_option("--ref-dark", f.ref_dark_path, "Dark reference histogram");

    if (argc > 1 && argv[1][0] != '-') {
        const std::string name = argv[1];
        bool known = false;
        for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == name;
        if (!known) {
            err << "ionlogic: unknown subcommand '" << name << "'\n" << app.help();
            return kConfigError;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        if (app.get_subcommands().empty()) err << app.help();
        return kConfigError;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    try {
        const RunConfig cfg = resolve_config(*sub, f);
        Outcome o;
        if (command == "truth-table") {
            o = truth_table(cfg, f);
        } else if (command == "rabi-scan") {
            o = rabi_scan(cfg, f);
        } else if (command == "fringe-scan") {
            o = fringe_scan(cfg, f);
        } else if (command == "stark") {
            o = stark(cfg, f);
        } else if (command == "leakage") {
            o = leakage(cfg, f);
        } else {
            o = readout_calib(cfg, f);
        }
        json summary;
        summary["command"] = command;
        summary["version"] = kVersion;
        summary["config"] = config_to_json(cfg);
        summary["options"] = o.options.is_null() ? json::object() : o.options;
        summary["results"] = o.results;
        emit(cfg.csv_path, o.csv, out);
        emit(cfg.json_path, summary.dump(2) + "\n", out);
        out << o.summary << '\n';
        return o.code;
    } catch (const ConfigError& e) {
        err << "ionlogic " << command << ": configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "ionlogic " << command << ": error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

}  // namespace ionlogic::cli
