#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aagame/cohort.hpp"

namespace aagame {

// Synthetic triplet cohort with a planted, time-decaying disease signal.
//
// Log features are Gaussian. A case sample measured t months before
// diagnosis has ln CA125 raised, and ln I_p lowered for each informative
// peak, by signal_strength * max(0, 1 - t / signal_horizon). All draws
// come from one xoshiro256** stream seeded with `seed`, consumed in a
// fixed order (see generate()).
struct SynthConfig {
    std::size_t n_triplets = 179;
    std::size_t n_peaks = 67;
    double signal_strength = 2.0;
    double signal_horizon = 15.0;  // months
    std::vector<std::size_t> informative_peaks = {2, 3, 7};
    std::uint64_t seed = 0;

    // Throws ConfigError on n_triplets = 0, n_peaks = 0, a negative or
    // non-finite signal, a nonpositive horizon or an informative peak
    // outside 1..n_peaks.
    void validate() const;
};

// Log-scale location and spread of the features.
inline constexpr double kLogCa125Mean = 3.0;
inline constexpr double kLogCa125Sd = 0.8;
inline constexpr double kLogPeakMean = 6.0;
inline constexpr double kLogPeakSd = 0.8;

// Range of time to diagnosis, months.
inline constexpr double kMaxTimeToDiagnosis = 24.0;

Cohort generate(const SynthConfig& config);

}  // namespace aagame
