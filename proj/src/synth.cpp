#include "aagame/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aagame/errors.hpp"
#include "aagame/rng.hpp"

namespace aagame {

namespace {

// 104 case patients for 179 triplets in the reference cohort.
constexpr double kPatientsPerTriplet = 104.0 / 179.0;
constexpr int kSpanDays = 2557;          // 7 years
constexpr int kEarliestDiagnosisDay = 731;
constexpr double kDaysPerMonth = 30.4375;

std::string padded(std::size_t value, std::size_t width)
{
    std::string s = std::to_string(value);
    if (s.size() < width)
        s.insert(0, width - s.size(), '0');
    return s;
}

}  // namespace

void SynthConfig::validate() const
{
    if (n_triplets == 0)
        throw ConfigError("synthetic cohort needs at least one triplet");
    if (n_peaks == 0)
        throw ConfigError("synthetic cohort needs at least one peak");
    if (!(signal_strength >= 0.0) || !std::isfinite(signal_strength))
        throw ConfigError("signal strength must be finite and nonnegative");
    if (!(signal_horizon > 0.0) || !std::isfinite(signal_horizon))
        throw ConfigError("signal horizon must be positive");
    for (std::size_t p : informative_peaks)
        if (p == 0 || p > n_peaks)
            throw ConfigError("informative peak " + std::to_string(p) + " outside 1.." + std::to_string(n_peaks));
}

// Draw order: patient diagnosis days (one per patient); then per triplet:
// patient (for triplets beyond the first n_patients), time to diagnosis,
// case position, and for each of the three samples ln CA125 followed by
// the n_peaks log intensities.
Cohort generate(const SynthConfig& config)
{
    config.validate();
    Xoshiro256 rng(config.seed);
    const std::size_t n_patients =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(config.n_triplets * kPatientsPerTriplet)), 1,
                                config.n_triplets);
    const Date epoch{std::chrono::year_month_day{std::chrono::year{2001}, std::chrono::January, std::chrono::day{1}}};

    std::vector<int> diagnosis_day(n_patients);
    for (auto& day : diagnosis_day)
        day = kEarliestDiagnosisDay + static_cast<int>(rng.below(kSpanDays - kEarliestDiagnosisDay));

    std::vector<bool> informative(config.n_peaks, false);
    for (std::size_t p : config.informative_peaks)
        informative[p - 1] = true;

    const std::size_t width = std::max<std::size_t>(4, std::to_string(std::max(config.n_triplets, n_patients)).size());
    Cohort cohort;
    cohort.num_peaks = config.n_peaks;
    cohort.triplets.reserve(config.n_triplets);
    for (std::size_t i = 0; i < config.n_triplets; ++i) {
        const std::size_t patient = i < n_patients ? i : static_cast<std::size_t>(rng.below(n_patients));
        Triplet tr;
        tr.id = "T" + padded(i + 1, width);
        tr.time_to_diagnosis = kMaxTimeToDiagnosis * rng.uniform();
        tr.case_position = static_cast<std::size_t>(rng.below(3));
        const int offset = static_cast<int>(std::lround(tr.time_to_diagnosis * kDaysPerMonth));
        tr.measurement_date = epoch + std::chrono::days{diagnosis_day[patient] - offset};

        const double shift =
            config.signal_strength * std::max(0.0, 1.0 - tr.time_to_diagnosis / config.signal_horizon);
        for (std::size_t s = 0; s < 3; ++s) {
            const bool is_case = (s == tr.case_position);
            Sample& sample = tr.samples[s];
            sample.is_case = is_case;
            sample.patient_id = is_case ? "P" + padded(patient + 1, width)
                                        : "C" + padded(i + 1, width) + (s == (tr.case_position + 1) % 3 ? "a" : "b");
            double log_ca125 = kLogCa125Mean + kLogCa125Sd * rng.normal();
            if (is_case)
                log_ca125 += shift;
            sample.ca125 = std::exp(log_ca125);
            sample.peaks.resize(config.n_peaks);
            for (std::size_t p = 0; p < config.n_peaks; ++p) {
                double log_peak = kLogPeakMean + kLogPeakSd * rng.normal();
                if (is_case && informative[p])
                    log_peak -= shift;
                sample.peaks[p] = std::exp(log_peak);
            }
        }
        cohort.triplets.push_back(std::move(tr));
    }
    return cohort;
}

}  // namespace aagame
