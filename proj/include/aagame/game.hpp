#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aagame {

// Tolerance on the sum-to-one constraint of a Distribution.
inline constexpr double kSimplexTolerance = 1e-9;

// Two values within this distance of the maximum are treated as tied by
// the maximum rule.
inline constexpr double kTieTolerance = 1e-12;

// Finite outcome space {0, ..., size-1}.
class OutcomeSpace {
public:
    explicit OutcomeSpace(std::size_t size);

    std::size_t size() const noexcept { return size_; }

    bool contains(std::size_t outcome) const noexcept { return outcome < size_; }

    friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;

private:
    std::size_t size_;
};

// Probability measure on a finite outcome space. Validated and renormalized
// once at construction; immutable afterwards.
class Distribution {
public:
    explicit Distribution(std::vector<double> probs);

    static Distribution uniform(OutcomeSpace space);

    std::size_t size() const noexcept { return probs_.size(); }
    OutcomeSpace space() const { return OutcomeSpace(probs_.size()); }

    double operator[](std::size_t outcome) const noexcept { return probs_[outcome]; }
    std::span<const double> probs() const noexcept { return probs_; }

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> probs_;
};

Distribution point_mass(std::size_t outcome, OutcomeSpace space);

// Brier loss: sum over o of (prediction{o} - [o == outcome])^2.
double brier_loss(std::size_t outcome, const Distribution& prediction);
double brier_loss(std::size_t outcome, std::span<const double> prediction);

// Half the Brier loss; counts errors exactly for strict predictions.
double half_loss(std::size_t outcome, const Distribution& prediction);

// Maximum rule over arbitrary scores: uniform weight on every entry within
// kTieTolerance of the maximum, zero elsewhere. Writes into `out`.
void max_rule(std::span<const double> scores, std::span<double> out);

}  // namespace aagame
