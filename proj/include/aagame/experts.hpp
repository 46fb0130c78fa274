#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aagame/cohort.hpp"
#include "aagame/game.hpp"

namespace aagame {

// Log-linear decision rule u = v ln C + w ln I_p. The coefficient w is
// held doubled so that the grid {-2, -1, -1/2, 0, 1/2, 1, 2} is exact.
struct CombinationExpert {
    int v = 1;
    int doubled_w = 0;
    std::size_t peak = 0;  // 1-based; 0 for the CA125-only rule

    double w() const noexcept { return doubled_w / 2.0; }
    bool ca125_only() const noexcept { return doubled_w == 0; }

    // e.g. "v1_w-0.5_p3", or "v1_w0" for the CA125-only rule.
    std::string label() const;

    friend auto operator<=>(const CombinationExpert&, const CombinationExpert&) = default;
};

// Doubled w values paired with v = 1, ascending.
inline constexpr int kDoubledWeightsWithCa125[] = {-4, -2, -1, 1, 2, 4};
// With v = 0 only the sign of w changes the argmax, so two rules per peak.
inline constexpr int kDoubledWeightsPeakOnly[] = {-2, 2};

// For each peak: the six v=1 rules, then the two v=0 rules; the CA125-only
// rule last. Size 8 * num_peaks + 1.
std::vector<CombinationExpert> build_pool(std::size_t num_peaks);

// Index of `expert` in `pool`; throws InputError when absent.
std::size_t find_expert(std::span<const CombinationExpert> pool, const CombinationExpert& expert);

double expert_score(const CombinationExpert& expert, double ca125, double peak_intensity);

// Maximum rule over the three samples' scores.
Distribution expert_predict(const CombinationExpert& expert, const Triplet& triplet);
void expert_predict_into(const CombinationExpert& expert, const Triplet& triplet, std::span<double> out);

// Peak p gets weight d^-(p-1); the CA125-only rule gets 1. Unnormalized.
std::vector<double> power_law_prior(std::span<const CombinationExpert> pool, double d);

// Replaces zero intensities by half the smallest positive intensity of the
// same peak across the cohort (1 when the peak is never positive).
Cohort floor_zero_intensities(const Cohort& cohort);

}  // namespace aagame
