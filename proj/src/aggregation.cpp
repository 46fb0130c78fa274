#include "aagame/aggregation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aagame/errors.hpp"

namespace aagame {

namespace {

void check_eta(double eta)
{
    if (!(eta > 0.0 && eta <= 1.0))
        throw ConfigError("learning rate must lie in (0, 1], got " + std::to_string(eta));
}

void check_expert_preds(const AggregatorState& state, std::span<const Distribution> expert_preds)
{
    if (expert_preds.empty())
        throw ConfigError("no expert predictions");
    if (expert_preds.size() != state.experts())
        throw ConfigError("got " + std::to_string(expert_preds.size()) + " expert predictions for "
                          + std::to_string(state.experts()) + " weights");
    for (const auto& pred : expert_preds)
        if (pred.size() != state.space().size())
            throw InputError("expert prediction size differs from the outcome space");
}

// Normalized copy of a prior, floored at kMinWeight.
void normalize_into(std::span<const double> prior, std::vector<double>& out)
{
    if (prior.empty())
        throw ConfigError("prior is empty");
    double total = 0.0;
    for (double w : prior) {
        if (!std::isfinite(w))
            throw NumericError("non-finite prior weight");
        if (!(w > 0.0))
            throw ConfigError("prior weights must be positive");
        total += w;
    }
    if (!std::isfinite(total))
        throw NumericError("prior weights overflow");
    out.resize(prior.size());
    for (std::size_t k = 0; k < prior.size(); ++k)
        out[k] = std::max(prior[k] / total, kMinWeight);
}

// Mixture sums sum_k w_k * factor[k] for every outcome of one step.
void mixture_sums(const FactorTable& factors, std::size_t step, std::span<const double> weights,
                  std::span<double> sums)
{
    for (std::size_t o = 0; o < factors.outcomes(); ++o) {
        const auto row = factors.row(step, o);
        double acc = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k)
            acc += weights[k] * row[k];
        sums[o] = acc;
    }
}

// Multiplies weights by this step's factors for `outcome`, divides by
// their total (which is sums[outcome]) and accumulates next step's sums in
// the same pass.
void update_and_mix(const FactorTable& factors, std::size_t step, std::size_t outcome,
                    std::span<double> weights, std::span<double> sums)
{
    const double inv_total = 1.0 / sums[outcome];
    const auto taken = factors.row(step, outcome);
    const std::size_t n = factors.outcomes();
    const std::size_t K = weights.size();
    if (n == 3) {
        const auto f0 = factors.row(step + 1, 0);
        const auto f1 = factors.row(step + 1, 1);
        const auto f2 = factors.row(step + 1, 2);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double w = std::max(weights[k] * taken[k] * inv_total, kMinWeight);
            weights[k] = w;
            s0 += w * f0[k];
            s1 += w * f1[k];
            s2 += w * f2[k];
        }
        sums[0] = s0;
        sums[1] = s1;
        sums[2] = s2;
        return;
    }
    for (std::size_t k = 0; k < K; ++k)
        weights[k] = std::max(weights[k] * taken[k] * inv_total, kMinWeight);
    mixture_sums(factors, step + 1, weights, sums);
}

template <class OnStep>
void online_pass(const FactorTable& factors, std::span<const double> prior,
                 std::span<const std::size_t> outcomes, PassOptions options,
                 std::vector<double>& weights, OnStep&& on_step)
{
    const std::size_t n = factors.outcomes();
    const std::size_t T = factors.steps();
    if (prior.size() != factors.experts())
        throw ConfigError("prior has " + std::to_string(prior.size()) + " entries for "
                          + std::to_string(factors.experts()) + " experts");
    if (outcomes.size() != T)
        throw InputError("outcome sequence length differs from the number of steps");
    for (std::size_t y : outcomes)
        if (y >= n)
            throw InputError("outcome " + std::to_string(y) + " out of range");
    if (n > 64)
        throw ConfigError("outcome spaces above 64 outcomes are not supported by the table pass");

    normalize_into(prior, weights);
    std::array<double, 64> sums{};
    std::array<double, 64> generalized{};
    std::array<double, 64> prediction{};
    const std::span<double> sums_v(sums.data(), n);
    const std::span<double> gen_v(generalized.data(), n);
    const std::span<double> pred_v(prediction.data(), n);
    const double eta = factors.eta();

    if (T > 0)
        mixture_sums(factors, 0, weights, sums_v);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t o = 0; o < n; ++o)
            gen_v[o] = -std::log(sums_v[o]) / eta;
        water_fill(gen_v, pred_v);
        if (options.categorical)
            max_rule(std::span<const double>(pred_v), pred_v);
        on_step(t, std::span<const double>(pred_v), outcomes[t]);
        if (t + 1 == T)
            break;
        if (options.reset_each_step) {
            normalize_into(prior, weights);
            mixture_sums(factors, t + 1, weights, sums_v);
        } else {
            update_and_mix(factors, t, outcomes[t], weights, sums_v);
        }
    }
}

}  // namespace

AggregatorState::AggregatorState(std::vector<double> prior, double eta, OutcomeSpace space)
    : eta_(eta), space_(space)
{
    check_eta(eta);
    normalize_into(prior, weights_);
}

AggregatorState AggregatorState::uniform(std::size_t experts, double eta, OutcomeSpace space)
{
    if (experts == 0)
        throw ConfigError("expert pool is empty");
    return AggregatorState(std::vector<double>(experts, 1.0), eta, space);
}

std::vector<double> generalized_prediction(const AggregatorState& state,
                                           std::span<const Distribution> expert_preds)
{
    check_expert_preds(state, expert_preds);
    const std::size_t K = state.experts();
    const double eta = state.eta();
    std::vector<double> exponents(K);
    std::vector<double> out(state.space().size());
    for (std::size_t o = 0; o < out.size(); ++o) {
        for (std::size_t k = 0; k < K; ++k)
            exponents[k] = std::log(state.weights()[k]) - eta * brier_loss(o, expert_preds[k]);
        const double top = *std::max_element(exponents.begin(), exponents.end());
        double acc = 0.0;
        for (double a : exponents)
            acc += std::exp(a - top);
        out[o] = -(top + std::log(acc)) / eta;
        if (!std::isfinite(out[o]))
            throw NumericError("generalized prediction is not finite");
    }
    return out;
}

double water_fill(std::span<const double> generalized, std::span<double> out)
{
    const std::size_t n = generalized.size();
    if (n == 0 || out.size() != n)
        throw InputError("water_fill: empty input or output size mismatch");
    for (double g : generalized)
        if (!std::isfinite(g))
            throw NumericError("generalized prediction has a non-finite entry");

    std::array<double, 64> small{};
    std::vector<double> large;
    std::span<double> sorted;
    if (n <= small.size()) {
        sorted = std::span<double>(small.data(), n);
    } else {
        large.resize(n);
        sorted = large;
    }
    std::copy(generalized.begin(), generalized.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.end());

    double prefix = 0.0;
    double s = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        prefix += sorted[m - 1];
        s = (2.0 + prefix) / static_cast<double>(m);
        if (m == n || s <= sorted[m])
            break;
    }
    for (std::size_t o = 0; o < n; ++o)
        out[o] = std::max(s - generalized[o], 0.0) / 2.0;
    return s;
}

Substitution substitute(std::span<const double> generalized)
{
    std::vector<double> probs(generalized.size());
    const double s = water_fill(generalized, probs);
    return {Distribution(std::move(probs)), s};
}

Distribution aa_step(const AggregatorState& state, std::span<const Distribution> expert_preds)
{
    const auto g = generalized_prediction(state, expert_preds);
    return substitute(g).prediction;
}

AggregatorState update_weights(const AggregatorState& state, std::size_t outcome,
                               std::span<const Distribution> expert_preds)
{
    check_expert_preds(state, expert_preds);
    if (!state.space().contains(outcome))
        throw InputError("outcome " + std::to_string(outcome) + " out of range");
    // Work relative to the largest factor so that tiny weights do not
    // round to zero before normalization.
    const std::size_t K = state.experts();
    std::vector<double> log_w(K);
    for (std::size_t k = 0; k < K; ++k)
        log_w[k] = std::log(state.weights()[k]) - state.eta() * brier_loss(outcome, expert_preds[k]);
    const double top = *std::max_element(log_w.begin(), log_w.end());
    for (double& lw : log_w)
        lw = std::exp(lw - top);
    return AggregatorState(std::move(log_w), state.eta(), state.space());
}

Distribution sharpen(const Distribution& prediction)
{
    std::vector<double> out(prediction.size());
    max_rule(prediction.probs(), out);
    return Distribution(std::move(out));
}

std::vector<StepRecord> run_online(std::span<const double> prior, double eta,
                                   std::span<const Event> events, bool categorical)
{
    check_eta(eta);
    if (events.empty())
        throw InputError("run_online needs at least one event");
    const std::size_t K = prior.size();
    if (K == 0)
        throw ConfigError("expert pool is empty");
    if (events.front().expert_preds.size() != K)
        throw ConfigError("prior has " + std::to_string(K) + " entries for "
                          + std::to_string(events.front().expert_preds.size()) + " experts");
    const std::size_t n = events.front().expert_preds.front().size();
    const OutcomeSpace space(n);

    LossTable losses(events.size(), n, K);
    std::vector<std::size_t> outcomes(events.size());
    for (std::size_t t = 0; t < events.size(); ++t) {
        const auto& ev = events[t];
        if (ev.expert_preds.size() != K)
            throw ConfigError("event " + std::to_string(t) + " has " + std::to_string(ev.expert_preds.size())
                              + " expert predictions for a prior of " + std::to_string(K));
        if (!space.contains(ev.outcome))
            throw InputError("event " + std::to_string(t) + " outcome out of range");
        outcomes[t] = ev.outcome;
        for (std::size_t o = 0; o < n; ++o) {
            auto row = losses.row(t, o);
            for (std::size_t k = 0; k < K; ++k) {
                if (ev.expert_preds[k].size() != n)
                    throw InputError("expert prediction size differs from the outcome space");
                row[k] = brier_loss(o, ev.expert_preds[k]);
            }
        }
    }

    const FactorTable factors(losses, eta);
    const auto preds = run_table(factors, prior, outcomes, PassOptions{categorical, false});

    std::vector<StepRecord> records;
    records.reserve(events.size());
    for (std::size_t t = 0; t < events.size(); ++t) {
        std::vector<double> probs(preds.begin() + static_cast<std::ptrdiff_t>(t * n),
                                  preds.begin() + static_cast<std::ptrdiff_t>((t + 1) * n));
        Distribution prediction(std::move(probs));
        const auto row = losses.row(t, outcomes[t]);
        const double learner_loss = brier_loss(outcomes[t], prediction);
        records.push_back(StepRecord{std::move(prediction), outcomes[t], learner_loss,
                                     std::vector<double>(row.begin(), row.end())});
    }
    return records;
}

LossTable::LossTable(std::size_t steps, std::size_t outcomes, std::size_t experts)
    : steps_(steps), outcomes_(outcomes), experts_(experts), data_(steps * outcomes * experts, 0.0)
{
    if (experts == 0)
        throw ConfigError("loss table needs at least one expert");
    (void)OutcomeSpace(outcomes);
}

FactorTable::FactorTable(const LossTable& losses, double eta)
    : eta_(eta),
      steps_(losses.steps()),
      outcomes_(losses.outcomes()),
      experts_(losses.experts()),
      data_(steps_ * outcomes_ * experts_)
{
    check_eta(eta);
    for (std::size_t t = 0; t < steps_; ++t)
        for (std::size_t o = 0; o < outcomes_; ++o) {
            const auto src = losses.row(t, o);
            double* dst = data_.data() + (t * outcomes_ + o) * experts_;
            for (std::size_t k = 0; k < experts_; ++k) {
                if (!std::isfinite(src[k]) || src[k] < 0.0)
                    throw NumericError("expert loss must be finite and nonnegative");
                dst[k] = std::exp(-eta * src[k]);
            }
        }
}

std::vector<double> run_table(const FactorTable& factors, std::span<const double> prior,
                              std::span<const std::size_t> outcomes, PassOptions options)
{
    const std::size_t n = factors.outcomes();
    std::vector<double> preds(factors.steps() * n);
    std::vector<double> weights;
    online_pass(factors, prior, outcomes, options, weights,
                [&](std::size_t t, std::span<const double> pred, std::size_t) {
                    std::copy(pred.begin(), pred.end(), preds.begin() + static_cast<std::ptrdiff_t>(t * n));
                });
    return preds;
}

double half_loss_sum(const FactorTable& factors, std::span<const double> prior,
                     std::span<const std::size_t> outcomes, PassOptions options,
                     std::vector<double>& scratch)
{
    double total = 0.0;
    online_pass(factors, prior, outcomes, options, scratch,
                [&](std::size_t, std::span<const double> pred, std::size_t y) {
                    total += 0.5 * brier_loss(y, pred);
                });
    return total;
}

}  // namespace aagame
