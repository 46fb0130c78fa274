#include "aagame/experts.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "aagame/errors.hpp"

namespace aagame {

std::string CombinationExpert::label() const
{
    const std::string head = "v" + std::to_string(v) + "_w";
    if (ca125_only())
        return head + "0";
    std::string w_text = std::to_string(doubled_w / 2);
    if (doubled_w % 2 != 0)
        w_text = (doubled_w < 0 ? "-" : "") + std::to_string(std::abs(doubled_w) / 2) + ".5";
    return head + w_text + "_p" + std::to_string(peak);
}

std::vector<CombinationExpert> build_pool(std::size_t num_peaks)
{
    if (num_peaks == 0)
        throw ConfigError("expert pool needs at least one peak");
    std::vector<CombinationExpert> pool;
    pool.reserve(8 * num_peaks + 1);
    for (std::size_t p = 1; p <= num_peaks; ++p) {
        for (int dw : kDoubledWeightsWithCa125)
            pool.push_back({1, dw, p});
        for (int dw : kDoubledWeightsPeakOnly)
            pool.push_back({0, dw, p});
    }
    pool.push_back({1, 0, 0});
    return pool;
}

std::size_t find_expert(std::span<const CombinationExpert> pool, const CombinationExpert& expert)
{
    const auto it = std::find(pool.begin(), pool.end(), expert);
    if (it == pool.end())
        throw InputError("expert " + expert.label() + " is not in the pool");
    return static_cast<std::size_t>(it - pool.begin());
}

double expert_score(const CombinationExpert& expert, double ca125, double peak_intensity)
{
    double score = 0.0;
    if (expert.v != 0) {
        if (!(ca125 > 0.0))
            throw DataError("CA125 must be positive to take its logarithm");
        score += expert.v * std::log(ca125);
    }
    if (expert.doubled_w != 0) {
        if (!(peak_intensity > 0.0))
            throw DataError("peak " + std::to_string(expert.peak) + " intensity must be positive");
        score += expert.w() * std::log(peak_intensity);
    }
    return score;
}

void expert_predict_into(const CombinationExpert& expert, const Triplet& triplet, std::span<double> out)
{
    std::array<double, 3> scores{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& s = triplet.samples[i];
        double intensity = 0.0;
        if (!expert.ca125_only()) {
            if (expert.peak == 0 || expert.peak > s.peaks.size())
                throw DataError("triplet " + triplet.id + ": missing feature peak_" + std::to_string(expert.peak));
            intensity = s.peaks[expert.peak - 1];
        }
        try {
            scores[i] = expert_score(expert, s.ca125, intensity);
        } catch (const DataError& e) {
            throw DataError("triplet " + triplet.id + ", sample " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    max_rule(scores, out);
}

Distribution expert_predict(const CombinationExpert& expert, const Triplet& triplet)
{
    std::vector<double> out(3);
    expert_predict_into(expert, triplet, out);
    return Distribution(std::move(out));
}

std::vector<double> power_law_prior(std::span<const CombinationExpert> pool, double d)
{
    if (!(d >= 1.0) || !std::isfinite(d))
        throw ConfigError("power-law base must be >= 1, got " + std::to_string(d));
    std::vector<double> prior;
    prior.reserve(pool.size());
    for (const auto& e : pool) {
        const double tier = e.ca125_only() ? 0.0 : static_cast<double>(e.peak - 1);
        prior.push_back(std::pow(d, -tier));
    }
    return prior;
}

Cohort floor_zero_intensities(const Cohort& cohort)
{
    std::vector<double> smallest(cohort.num_peaks, std::numeric_limits<double>::infinity());
    for (const auto& t : cohort.triplets)
        for (const auto& s : t.samples)
            for (std::size_t p = 0; p < s.peaks.size() && p < cohort.num_peaks; ++p) {
                if (s.peaks[p] < 0.0)
                    throw DataError("triplet " + t.id + ": negative intensity for peak " + std::to_string(p + 1));
                if (s.peaks[p] > 0.0)
                    smallest[p] = std::min(smallest[p], s.peaks[p]);
            }
    Cohort out = cohort;
    for (auto& t : out.triplets)
        for (auto& s : t.samples)
            for (std::size_t p = 0; p < s.peaks.size() && p < cohort.num_peaks; ++p)
                if (s.peaks[p] == 0.0)
                    s.peaks[p] = std::isfinite(smallest[p]) ? smallest[p] / 2.0 : 1.0;
    return out;
}

}  // namespace aagame
