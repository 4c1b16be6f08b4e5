#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ionlogic {

/// Photon-count frequency table; bin k holds the number of shots that
/// recorded k photons.
class CountHistogram {
public:
    CountHistogram() = default;
    explicit CountHistogram(std::vector<std::uint64_t> counts);

    void add(std::size_t photons, std::uint64_t times = 1);

    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t at(std::size_t photons) const {
        return photons < counts_.size() ? counts_[photons] : 0;
    }
    std::size_t bins() const { return counts_.size(); }
    std::uint64_t total() const { return total_; }
    bool empty() const { return total_ == 0; }
    double mean() const;

    friend bool operator==(const CountHistogram&, const CountHistogram&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

/// Poisson fluorescence model: bright |↓⟩ and dark |↑⟩ mean counts per
/// detection window.
struct DetectorModel {
    double lambda_bright = 30.0;
    double lambda_dark = 2.0;
    double window = 200e-6;  // s, informational

    void validate() const;
};

inline constexpr int kDefaultShots = 200;

struct PEstimate {
    double value = 0.0;
    double sigma = 0.0;
};

/// Each shot is bright with probability p_down, then draws a Poisson count
/// with the matching mean. Deterministic per seed.
CountHistogram simulate_histogram(double p_down, std::uint64_t shots, const DetectorModel& det,
                                  std::uint64_t seed);

/// Maximum-likelihood weight of p·Poisson(λ_b) + (1 − p)·Poisson(λ_d) on
/// [0, 1], with σ from the observed Fisher information at the estimate.
PEstimate estimate_p_down(const CountHistogram& hist, const DetectorModel& det);

/// As estimate_p_down, with the bright/dark distributions taken from measured
/// reference histograms (add-one smoothing over the joint support).
PEstimate estimate_from_references(const CountHistogram& hist, const CountHistogram& ref_bright,
                                   const CountHistogram& ref_dark);

/// σ implied by the expected Fisher information of `shots` independent shots
/// at the true weight p.
double fisher_sigma(double p, std::uint64_t shots, const DetectorModel& det);

/// "bin,count" with one row per bin from 0 to the last non-empty bin.
std::string histogram_to_csv(const CountHistogram& hist);
CountHistogram histogram_from_csv(std::string_view text);
/// {"total": N, "counts": [...]}
std::string histogram_to_json(const CountHistogram& hist);
CountHistogram histogram_from_json(std::string_view text);

}  // namespace ionlogic
