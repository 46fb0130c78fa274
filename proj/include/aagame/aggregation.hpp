#pragma once

// Strong Aggregating Algorithm for the Brier game.
//
// Each round the learner mixes the experts' losses into a generalized
// prediction
//
//     G(o) = -(1/eta) ln sum_k w_k exp(-eta * brier(o, expert_k))
//
// and maps G back to a probability measure by solving
//
//     sum_o (s - G(o))^+ = 2,    prediction{o} = (s - G(o))^+ / 2.
//
// Weights are then multiplied by exp(-eta * brier(outcome, expert_k)).
// With eta = 1 and a uniform prior the cumulative loss never exceeds the
// best expert's by more than ln K.
//
// Weights are kept normalized to sum 1. Predictions do not depend on a
// common scale, and normalization keeps the mixture sum inside
// [exp(-2 eta), 1] so it can neither overflow nor underflow.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aagame/game.hpp"

namespace aagame {

// Smallest weight an expert can hold after normalization.
inline constexpr double kMinWeight = 2.2250738585072014e-308;

class AggregatorState {
public:
    // Normalizes `prior`. Throws ConfigError for K = 0, a nonpositive
    // entry or eta outside (0, 1]; NumericError for non-finite entries.
    AggregatorState(std::vector<double> prior, double eta, OutcomeSpace space);

    static AggregatorState uniform(std::size_t experts, double eta, OutcomeSpace space);

    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t experts() const noexcept { return weights_.size(); }
    double eta() const noexcept { return eta_; }
    OutcomeSpace space() const noexcept { return space_; }

private:
    std::vector<double> weights_;
    double eta_;
    OutcomeSpace space_;
};

struct Substitution {
    Distribution prediction;
    double s;
};

// G(o) for every outcome, evaluated with a max-shifted log-sum-exp.
std::vector<double> generalized_prediction(const AggregatorState& state,
                                           std::span<const Distribution> expert_preds);

// Exact water-filling solve of sum_o (s - G(o))^+ = 2.
Substitution substitute(std::span<const double> generalized);

// Same solve without allocation; writes the prediction into `out` and
// returns s. `out` must have the size of `generalized`.
double water_fill(std::span<const double> generalized, std::span<double> out);

Distribution aa_step(const AggregatorState& state, std::span<const Distribution> expert_preds);

AggregatorState update_weights(const AggregatorState& state, std::size_t outcome,
                               std::span<const Distribution> expert_preds);

// Maximum rule: uniform over the argmax set of the prediction.
Distribution sharpen(const Distribution& prediction);

struct StepRecord {
    Distribution prediction;
    std::size_t outcome;
    double learner_loss;
    std::vector<double> expert_losses;
};

struct Event {
    std::vector<Distribution> expert_preds;
    std::size_t outcome;
};

// Protocol loop. With `categorical` the emitted prediction is sharpened;
// the weights always follow the experts' raw losses.
std::vector<StepRecord> run_online(std::span<const double> prior, double eta,
                                   std::span<const Event> events, bool categorical);

// Per-step expert losses brier(o, expert_k) laid out as [step][outcome][expert].
class LossTable {
public:
    LossTable(std::size_t steps, std::size_t outcomes, std::size_t experts);

    std::size_t steps() const noexcept { return steps_; }
    std::size_t outcomes() const noexcept { return outcomes_; }
    std::size_t experts() const noexcept { return experts_; }

    std::span<double> row(std::size_t step, std::size_t outcome) noexcept
    {
        return {data_.data() + (step * outcomes_ + outcome) * experts_, experts_};
    }
    std::span<const double> row(std::size_t step, std::size_t outcome) const noexcept
    {
        return {data_.data() + (step * outcomes_ + outcome) * experts_, experts_};
    }

private:
    std::size_t steps_;
    std::size_t outcomes_;
    std::size_t experts_;
    std::vector<double> data_;
};

// exp(-eta * loss) for every entry of a LossTable. Depends only on the
// experts' predictions, so one table serves every relabeling of the data.
class FactorTable {
public:
    FactorTable(const LossTable& losses, double eta);

    double eta() const noexcept { return eta_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t outcomes() const noexcept { return outcomes_; }
    std::size_t experts() const noexcept { return experts_; }

    std::span<const double> row(std::size_t step, std::size_t outcome) const noexcept
    {
        return {data_.data() + (step * outcomes_ + outcome) * experts_, experts_};
    }

private:
    double eta_;
    std::size_t steps_;
    std::size_t outcomes_;
    std::size_t experts_;
    std::vector<double> data_;
};

struct PassOptions {
    bool categorical = false;
    // Restart from the prior at every step instead of carrying weights.
    bool reset_each_step = false;
};

// Runs the AA over a whole factor table and returns the learner's
// predictions flattened as [step][outcome]. `prior` need not be normalized.
std::vector<double> run_table(const FactorTable& factors, std::span<const double> prior,
                              std::span<const std::size_t> outcomes, PassOptions options);

// Sum of the learner's half losses over a factor table. `scratch` is
// resized as needed and may be reused across calls.
double half_loss_sum(const FactorTable& factors, std::span<const double> prior,
                     std::span<const std::size_t> outcomes, PassOptions options,
                     std::vector<double>& scratch);

}  // namespace aagame
