#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "aagame/aggregation.hpp"
#include "aagame/cohort.hpp"
#include "aagame/experts.hpp"
#include "aagame/rng.hpp"

namespace aagame {

// Tolerance of the "E <= E_0" comparison; half losses are fractional
// under ties.
inline constexpr double kStatisticTolerance = 1e-9;

struct GridSpec {
    std::vector<double> d_values;
    std::vector<double> eta_values;

    // d in {1.1, 1.2, ..., 2.0}, eta in {0.1, 0.15, ..., 1.0}.
    static GridSpec defaults();

    // Throws ConfigError unless both lists are nonempty, every d >= 1 and
    // every eta lies in (0, 1].
    void validate() const;
    std::size_t cells() const noexcept { return d_values.size() * eta_values.size(); }
};

// How err(tau; d, eta) is attributed: one online pass over the window in
// chronological order, or a fresh aggregator for every triplet.
enum class ErrMode { windowed, per_triplet };

// Label-independent precomputation for one window: the experts'
// predictions and losses. Experts whose predictions agree on every triplet
// evolve identically and are merged into one class (their prior weights
// add up), which changes nothing but the cost.
class WindowGame {
public:
    WindowGame(const Cohort& window, std::span<const CombinationExpert> pool, ErrMode mode = ErrMode::windowed);

    std::size_t size() const noexcept { return window_.size(); }
    const Cohort& window() const noexcept { return window_; }
    ErrMode mode() const noexcept { return mode_; }
    std::span<const CombinationExpert> pool() const noexcept { return pool_; }

    // Case positions in chronological order.
    std::span<const std::size_t> observed() const noexcept { return observed_; }

    std::size_t classes() const noexcept { return losses_.experts(); }
    const LossTable& class_losses() const noexcept { return losses_; }
    std::vector<double> class_prior(std::span<const double> expert_prior) const;

    // Sum over the window of one expert's half losses under `outcomes`.
    double expert_errors(std::size_t expert, std::span<const std::size_t> outcomes) const;

    // Categorical AA half-loss sum with the power-law prior.
    double err(double d, double eta, std::span<const std::size_t> outcomes) const;

private:
    Cohort window_;
    ErrMode mode_;
    std::vector<CombinationExpert> pool_;
    std::vector<std::size_t> observed_;
    std::vector<std::size_t> class_of_;
    LossTable losses_;
};

struct GridMin {
    double e;
    double d;
    double eta;
};

// Caches per-d priors and per-eta factor tables of one window.
class GridEvaluator {
public:
    GridEvaluator(const WindowGame& game, const GridSpec& grid);

    double cell(std::size_t d_index, std::size_t eta_index, std::span<const std::size_t> outcomes,
                std::vector<double>& scratch) const;

    // Exhaustive minimum; ties go to the smaller d, then the smaller eta.
    GridMin min(std::span<const std::size_t> outcomes, std::vector<double>& scratch) const;

private:
    const WindowGame* game_;
    GridSpec grid_;
    std::vector<std::vector<double>> priors_;
    std::vector<FactorTable> factors_;
};

// Err(S; d, eta): half losses of the categorical AA over the window.
double err_window(const Cohort& window, double d, double eta, std::span<const CombinationExpert> pool,
                  ErrMode mode = ErrMode::windowed);

GridMin min_err_grid(const Cohort& window, const GridSpec& grid, std::span<const CombinationExpert> pool,
                     ErrMode mode = ErrMode::windowed);

// Uniformly random case position for each triplet, drawn in stored order.
std::vector<std::size_t> draw_case_positions(std::size_t triplets, Xoshiro256& rng);

// Moves each triplet's case designation to a uniformly random position.
Cohort permute_labels(const Cohort& window, Xoshiro256& rng);

// Generator used for Monte-Carlo trial `trial` under `seed`.
inline Xoshiro256 trial_rng(std::uint64_t seed, std::uint64_t trial) { return Xoshiro256(derive_seed(seed, trial)); }

struct PValueReport {
    double t = 0.0;
    std::size_t window_size = 0;
    double e0 = 0.0;
    std::size_t q = 0;
    std::size_t n_trials = 0;
    double p_value = 1.0;
};

// Test statistic over a relabeling (smaller means better prediction).
// Must be safe to call concurrently.
using Statistic = std::function<double(std::span<const std::size_t>)>;

// Monte-Carlo permutation p-value (Q + 1) / (N + 1), where Q counts trials
// whose statistic is <= the observed one.
PValueReport permutation_pvalue(std::span<const std::size_t> observed, const Statistic& statistic,
                                std::size_t n_trials, std::uint64_t seed, unsigned threads = 1);

// p-value of the grid-minimized categorical AA error.
PValueReport pvalue(const Cohort& window, const GridSpec& grid, std::span<const CombinationExpert> pool,
                    std::size_t n_trials, std::uint64_t seed, unsigned threads = 1,
                    ErrMode mode = ErrMode::windowed);

struct SweepConfig {
    GridSpec grid = GridSpec::defaults();
    double d = 1.2;
    double eta = 0.65;
    double theta = 6.0;
    WindowBounds bounds = WindowBounds::half_open;
    ErrMode mode = ErrMode::windowed;
    bool with_pvalues = true;
    std::size_t n_trials = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// One row of the windowed report. Empty optionals are written as NA.
struct WindowRow {
    double t = 0.0;
    std::size_t window_size = 0;
    std::optional<double> ca125_e, ca125_p;
    std::optional<double> aa_e, aa_p;
    std::optional<double> min_e, min_p;
    std::optional<double> c3_1_e, c3_2_e, peak3_p;
    std::optional<double> c2_e, peak2_p;
};

std::vector<WindowRow> window_sweep(const Cohort& cohort, std::span<const double> t_values,
                                    std::span<const CombinationExpert> pool, const SweepConfig& config);

// t,window_size,ca125_e,ca125_p,aa_e,aa_p,min_e,min_p,c3_1_e,c3_2_e,peak3_p,c2_e,peak2_p
void write_window_table(std::span<const WindowRow> rows, std::ostream& out);
// t,method,error_fraction
void write_error_fractions(std::span<const WindowRow> rows, std::ostream& out);
// t,method,log10_p
void write_log_pvalues(std::span<const WindowRow> rows, std::ostream& out);

// Shortest round-trip decimal text.
std::string format_number(double value);

}  // namespace aagame
