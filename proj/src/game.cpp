#include "aagame/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aagame/errors.hpp"

namespace aagame {

OutcomeSpace::OutcomeSpace(std::size_t size) : size_(size)
{
    if (size_ < 2)
        throw ConfigError("outcome space needs at least 2 outcomes, got " + std::to_string(size_));
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs))
{
    if (probs_.size() < 2)
        throw InputError("distribution needs at least 2 outcomes");
    double total = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0)
            throw InputError("distribution entries must be finite and nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance)
        throw InputError("distribution entries sum to " + std::to_string(total) + ", not 1");
    for (double& p : probs_)
        p /= total;
}

Distribution Distribution::uniform(OutcomeSpace space)
{
    return Distribution(std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())));
}

Distribution point_mass(std::size_t outcome, OutcomeSpace space)
{
    if (!space.contains(outcome))
        throw InputError("outcome " + std::to_string(outcome) + " outside space of size "
                         + std::to_string(space.size()));
    std::vector<double> probs(space.size(), 0.0);
    probs[outcome] = 1.0;
    return Distribution(std::move(probs));
}

double brier_loss(std::size_t outcome, std::span<const double> prediction)
{
    if (outcome >= prediction.size())
        throw InputError("outcome " + std::to_string(outcome) + " does not match prediction of size "
                         + std::to_string(prediction.size()));
    double loss = 0.0;
    for (std::size_t o = 0; o < prediction.size(); ++o) {
        const double diff = prediction[o] - (o == outcome ? 1.0 : 0.0);
        loss += diff * diff;
    }
    return loss;
}

double brier_loss(std::size_t outcome, const Distribution& prediction)
{
    return brier_loss(outcome, prediction.probs());
}

double half_loss(std::size_t outcome, const Distribution& prediction)
{
    return 0.5 * brier_loss(outcome, prediction);
}

void max_rule(std::span<const double> scores, std::span<double> out)
{
    if (scores.empty() || scores.size() != out.size())
        throw InputError("max_rule: score and output sizes differ or are empty");
    for (double s : scores)
        if (!std::isfinite(s))
            throw NumericError("max_rule: non-finite score");
    const double top = *std::max_element(scores.begin(), scores.end());
    std::size_t tied = 0;
    for (double s : scores)
        tied += (top - s <= kTieTolerance) ? 1 : 0;
    const double share = 1.0 / static_cast<double>(tied);
    for (std::size_t i = 0; i < scores.size(); ++i)
        out[i] = (top - scores[i] <= kTieTolerance) ? share : 0.0;
}

}  // namespace aagame
