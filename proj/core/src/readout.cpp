#include "ionlogic/readout.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ionlogic/errors.hpp"

namespace ionlogic {

namespace {

constexpr double kProbabilitySlack = 1e-9;
constexpr double kRootTol = 1e-13;

double log_poisson(double lambda, std::size_t k) {
    const double kk = static_cast<double>(k);
    if (lambda == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return kk * std::log(lambda) - lambda - std::lgamma(kk + 1.0);
}

// Per-bin log likelihood ratio log(f_b / f_d) with the multiplicity of the
// bin in the data. The score of the mixture log likelihood is
//   S(p) = Σ h_k (f_b − f_d) / (p f_b + (1 − p) f_d),
// evaluated stably from the ratio.
struct BinTerm {
    double log_ratio;
    double weight;
};

double score_term(double log_ratio, double p) {
    if (log_ratio >= 0.0) {
        const double a = std::exp(-log_ratio);  // f_d / f_b
        return (1.0 - a) / (p + (1.0 - p) * a);
    }
    const double b = std::exp(log_ratio);  // f_b / f_d
    return (b - 1.0) / (p * b + (1.0 - p));
}

double score(const std::vector<BinTerm>& terms, double p) {
    double s = 0.0;
    for (const auto& t : terms) s += t.weight * score_term(t.log_ratio, p);
    return s;
}

double observed_information(const std::vector<BinTerm>& terms, double p) {
    double info = 0.0;
    for (const auto& t : terms) {
        const double g = score_term(t.log_ratio, p);
        info += t.weight * g * g;
    }
    return info;
}

PEstimate mixture_mle(const std::vector<BinTerm>& terms) {
    double p;
    if (score(terms, 0.0) <= 0.0) {
        p = 0.0;
    } else if (score(terms, 1.0) >= 0.0) {
        p = 1.0;
    } else {
        // The log likelihood is concave in p, so the score is decreasing.
        double lo = 0.0;
        double hi = 1.0;
        while (hi - lo > kRootTol) {
            const double mid = 0.5 * (lo + hi);
            (score(terms, mid) > 0.0 ? lo : hi) = mid;
        }
        p = 0.5 * (lo + hi);
    }
    const double info = observed_information(terms, p);
    const double sigma = info > 0.0 ? std::min(0.5, 1.0 / std::sqrt(info)) : 0.5;
    return {p, sigma};
}

}  // namespace

CountHistogram::CountHistogram(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    for (auto c : counts_) total_ += c;
}

void CountHistogram::add(std::size_t photons, std::uint64_t times) {
    if (photons >= counts_.size()) counts_.resize(photons + 1, 0);
    counts_[photons] += times;
    total_ += times;
}

double CountHistogram::mean() const {
    if (total_ == 0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < counts_.size(); ++k) s += static_cast<double>(k) * counts_[k];
    return s / static_cast<double>(total_);
}

void DetectorModel::validate() const {
    if (!(lambda_dark >= 0.0)) throw ConfigError("lambda_dark must be non-negative");
    if (!(lambda_bright > lambda_dark)) throw ConfigError("lambda_bright must exceed lambda_dark");
}

CountHistogram simulate_histogram(double p_down, std::uint64_t shots, const DetectorModel& det,
                                  std::uint64_t seed) {
    det.validate();
    if (p_down < -kProbabilitySlack || p_down > 1.0 + kProbabilitySlack || std::isnan(p_down)) {
        throw DomainError("p_down outside [0, 1]");
    }
    if (shots == 0) throw DomainError("need at least one shot");
    p_down = std::clamp(p_down, 0.0, 1.0);

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bright(p_down);
    std::poisson_distribution<std::uint64_t> bright_counts(det.lambda_bright);
    std::poisson_distribution<std::uint64_t> dark_counts(std::max(det.lambda_dark, 1e-300));
    CountHistogram hist;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const std::uint64_t k = bright(rng) ? bright_counts(rng)
                                : det.lambda_dark > 0.0 ? dark_counts(rng)
                                                        : 0;
        hist.add(static_cast<std::size_t>(k));
    }
    return hist;
}

PEstimate estimate_p_down(const CountHistogram& hist, const DetectorModel& det) {
    if (hist.empty()) throw DomainError("empty histogram");
    if (det.lambda_bright == det.lambda_dark) {
        throw UnidentifiableError("bright and dark means coincide");
    }
    det.validate();
    std::vector<BinTerm> terms;
    for (std::size_t k = 0; k < hist.bins(); ++k) {
        if (hist.at(k) == 0) continue;
        const double lb = log_poisson(det.lambda_bright, k);
        const double ld = log_poisson(det.lambda_dark, k);
        const double ratio = std::isinf(ld) ? std::numeric_limits<double>::max() : lb - ld;
        terms.push_back({ratio, static_cast<double>(hist.at(k))});
    }
    return mixture_mle(terms);
}

PEstimate estimate_from_references(const CountHistogram& hist, const CountHistogram& ref_bright,
                                   const CountHistogram& ref_dark) {
    if (hist.empty()) throw DomainError("empty histogram");
    if (ref_bright.empty() || ref_dark.empty()) throw DomainError("empty reference histogram");
    const std::size_t bins = std::max({hist.bins(), ref_bright.bins(), ref_dark.bins()});

    bool supported = false;
    for (std::size_t k = 0; k < hist.bins(); ++k) {
        if (hist.at(k) > 0 && (ref_bright.at(k) > 0 || ref_dark.at(k) > 0)) supported = true;
    }
    if (!supported) {
        throw UnidentifiableError("histogram shares no bins with either reference");
    }

    const double nb = static_cast<double>(ref_bright.total() + bins);
    const double nd = static_cast<double>(ref_dark.total() + bins);
    std::vector<BinTerm> terms;
    bool informative = false;
    for (std::size_t k = 0; k < bins; ++k) {
        const double fb = (static_cast<double>(ref_bright.at(k)) + 1.0) / nb;
        const double fd = (static_cast<double>(ref_dark.at(k)) + 1.0) / nd;
        if (fb != fd) informative = true;
        if (hist.at(k) == 0) continue;
        terms.push_back({std::log(fb) - std::log(fd), static_cast<double>(hist.at(k))});
    }
    if (!informative) throw UnidentifiableError("reference histograms are indistinguishable");
    return mixture_mle(terms);
}

double fisher_sigma(double p, std::uint64_t shots, const DetectorModel& det) {
    det.validate();
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p outside [0, 1]");
    if (shots == 0) throw DomainError("need at least one shot");
    const auto kmax = static_cast<std::size_t>(det.lambda_bright + 20.0 * std::sqrt(det.lambda_bright) + 50.0);
    double info = 0.0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        const double fb = std::exp(log_poisson(det.lambda_bright, k));
        const double fd = std::exp(log_poisson(det.lambda_dark, k));
        const double mix = p * fb + (1.0 - p) * fd;
        if (mix > 0.0) info += (fb - fd) * (fb - fd) / mix;
    }
    return 1.0 / std::sqrt(static_cast<double>(shots) * info);
}

std::string histogram_to_csv(const CountHistogram& hist) {
    std::string out = "bin,count\n";
    std::size_t last = hist.bins();
    while (last > 0 && hist.at(last - 1) == 0) --last;
    for (std::size_t k = 0; k < last; ++k) {
        out += std::to_string(k) + ',' + std::to_string(hist.at(k)) + '\n';
    }
    return out;
}

CountHistogram histogram_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    CountHistogram hist;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("bin", 0) == 0) continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("histogram CSV row without comma: " + line);
        try {
            const long long bin = std::stoll(line.substr(0, comma));
            const long long count = std::stoll(line.substr(comma + 1));
            if (bin < 0 || count < 0) throw ConfigError("negative histogram entry");
            hist.add(static_cast<std::size_t>(bin), static_cast<std::uint64_t>(count));
        } catch (const std::logic_error&) {
            throw ConfigError("malformed histogram CSV row: " + line);
        }
    }
    return hist;
}

std::string histogram_to_json(const CountHistogram& hist) {
    nlohmann::json j;
    j["total"] = hist.total();
    j["counts"] = hist.counts();
    return j.dump();
}

CountHistogram histogram_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        CountHistogram hist(j.at("counts").get<std::vector<std::uint64_t>>());
        if (j.contains("total") && j.at("total").get<std::uint64_t>() != hist.total()) {
            throw ConfigError("histogram total does not match its counts");
        }
        return hist;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed histogram JSON: ") + e.what());
    }
}

}  // namespace ionlogic
