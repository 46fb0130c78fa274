#include "aagame/stats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "aagame/errors.hpp"
#include "aagame/parallel.hpp"

namespace aagame {

GridSpec GridSpec::defaults()
{
    GridSpec grid;
    for (int i = 11; i <= 20; ++i)
        grid.d_values.push_back(i / 10.0);
    for (int i = 2; i <= 20; ++i)
        grid.eta_values.push_back(i / 20.0);
    return grid;
}

void GridSpec::validate() const
{
    if (d_values.empty() || eta_values.empty())
        throw ConfigError("grid needs at least one d and one eta");
    for (double d : d_values)
        if (!(d >= 1.0) || !std::isfinite(d))
            throw ConfigError("grid d values must be >= 1, got " + format_number(d));
    for (double eta : eta_values)
        if (!(eta > 0.0 && eta <= 1.0))
            throw ConfigError("grid eta values must lie in (0, 1], got " + format_number(eta));
}

WindowGame::WindowGame(const Cohort& window, std::span<const CombinationExpert> pool, ErrMode mode)
    : window_(order_chronological(window)), mode_(mode), pool_(pool.begin(), pool.end()), losses_(1, 3, 1)
{
    if (window_.empty())
        throw InputError("window contains no triplets");
    if (pool_.empty())
        throw ConfigError("expert pool is empty");
    const std::size_t T = window_.size();
    for (const auto& tr : window_.triplets)
        observed_.push_back(tr.case_position);

    // Group experts by their full prediction sequence.
    std::map<std::vector<double>, std::size_t> classes;
    std::vector<std::vector<double>> class_preds;
    class_of_.reserve(pool_.size());
    std::vector<double> key(T * 3);
    for (const auto& expert : pool_) {
        for (std::size_t t = 0; t < T; ++t)
            expert_predict_into(expert, window_.triplets[t], std::span<double>(key.data() + 3 * t, 3));
        const auto [it, fresh] = classes.emplace(key, class_preds.size());
        if (fresh)
            class_preds.push_back(key);
        class_of_.push_back(it->second);
    }

    losses_ = LossTable(T, 3, class_preds.size());
    for (std::size_t c = 0; c < class_preds.size(); ++c)
        for (std::size_t t = 0; t < T; ++t) {
            const std::span<const double> pred(class_preds[c].data() + 3 * t, 3);
            for (std::size_t o = 0; o < 3; ++o)
                losses_.row(t, o)[c] = brier_loss(o, pred);
        }
}

std::vector<double> WindowGame::class_prior(std::span<const double> expert_prior) const
{
    if (expert_prior.size() != pool_.size())
        throw ConfigError("prior has " + std::to_string(expert_prior.size()) + " entries for "
                          + std::to_string(pool_.size()) + " experts");
    std::vector<double> prior(classes(), 0.0);
    for (std::size_t k = 0; k < pool_.size(); ++k)
        prior[class_of_[k]] += expert_prior[k];
    return prior;
}

double WindowGame::expert_errors(std::size_t expert, std::span<const std::size_t> outcomes) const
{
    if (expert >= pool_.size())
        throw InputError("expert index out of range");
    if (outcomes.size() != size())
        throw InputError("outcome sequence length differs from the window size");
    const std::size_t c = class_of_[expert];
    double total = 0.0;
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        if (outcomes[t] >= 3)
            throw InputError("outcome out of range");
        total += 0.5 * losses_.row(t, outcomes[t])[c];
    }
    return total;
}

double WindowGame::err(double d, double eta, std::span<const std::size_t> outcomes) const
{
    const auto prior = class_prior(power_law_prior(pool_, d));
    const FactorTable factors(losses_, eta);
    std::vector<double> scratch;
    return half_loss_sum(factors, prior, outcomes, PassOptions{true, mode_ == ErrMode::per_triplet}, scratch);
}

GridEvaluator::GridEvaluator(const WindowGame& game, const GridSpec& grid) : game_(&game), grid_(grid)
{
    grid_.validate();
    for (double d : grid_.d_values)
        priors_.push_back(game.class_prior(power_law_prior(game.pool(), d)));
    for (double eta : grid_.eta_values)
        factors_.emplace_back(game.class_losses(), eta);
}

double GridEvaluator::cell(std::size_t d_index, std::size_t eta_index, std::span<const std::size_t> outcomes,
                           std::vector<double>& scratch) const
{
    return half_loss_sum(factors_.at(eta_index), priors_.at(d_index), outcomes,
                         PassOptions{true, game_->mode() == ErrMode::per_triplet}, scratch);
}

GridMin GridEvaluator::min(std::span<const std::size_t> outcomes, std::vector<double>& scratch) const
{
    GridMin best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t di = 0; di < grid_.d_values.size(); ++di)
        for (std::size_t ei = 0; ei < grid_.eta_values.size(); ++ei) {
            const double e = cell(di, ei, outcomes, scratch);
            if (e < best.e)
                best = {e, grid_.d_values[di], grid_.eta_values[ei]};
        }
    return best;
}

double err_window(const Cohort& window, double d, double eta, std::span<const CombinationExpert> pool, ErrMode mode)
{
    const WindowGame game(window, pool, mode);
    return game.err(d, eta, game.observed());
}

GridMin min_err_grid(const Cohort& window, const GridSpec& grid, std::span<const CombinationExpert> pool,
                     ErrMode mode)
{
    const WindowGame game(window, pool, mode);
    const GridEvaluator evaluator(game, grid);
    std::vector<double> scratch;
    return evaluator.min(game.observed(), scratch);
}

std::vector<std::size_t> draw_case_positions(std::size_t triplets, Xoshiro256& rng)
{
    std::vector<std::size_t> positions(triplets);
    for (auto& p : positions)
        p = static_cast<std::size_t>(rng.below(3));
    return positions;
}

Cohort permute_labels(const Cohort& window, Xoshiro256& rng)
{
    Cohort out = window;
    const auto positions = draw_case_positions(out.size(), rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& tr = out.triplets[i];
        tr.case_position = positions[i];
        for (std::size_t s = 0; s < 3; ++s)
            tr.samples[s].is_case = (s == positions[i]);
    }
    return out;
}

PValueReport permutation_pvalue(std::span<const std::size_t> observed, const Statistic& statistic,
                                std::size_t n_trials, std::uint64_t seed, unsigned threads)
{
    if (observed.empty())
        throw InputError("window contains no triplets");
    if (n_trials == 0)
        throw InputError("need at least one Monte-Carlo trial");
    PValueReport report;
    report.window_size = observed.size();
    report.n_trials = n_trials;
    report.e0 = statistic(observed);
    std::vector<unsigned char> hit(n_trials, 0);
    parallel_for(n_trials, threads, [&](std::size_t j) {
        auto rng = trial_rng(seed, j);
        const auto labels = draw_case_positions(observed.size(), rng);
        hit[j] = statistic(labels) <= report.e0 + kStatisticTolerance ? 1 : 0;
    });
    report.q = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    report.p_value = static_cast<double>(report.q + 1) / static_cast<double>(n_trials + 1);
    return report;
}

namespace {

Statistic grid_statistic(const GridEvaluator& evaluator)
{
    return [&evaluator](std::span<const std::size_t> outcomes) {
        thread_local std::vector<double> scratch;
        return evaluator.min(outcomes, scratch).e;
    };
}

Statistic best_of_statistic(const WindowGame& game, std::vector<std::size_t> experts)
{
    return [&game, experts = std::move(experts)](std::span<const std::size_t> outcomes) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k : experts)
            best = std::min(best, game.expert_errors(k, outcomes));
        return best;
    };
}

std::optional<std::size_t> index_of(std::span<const CombinationExpert> pool, const CombinationExpert& e)
{
    const auto it = std::find(pool.begin(), pool.end(), e);
    if (it == pool.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - pool.begin());
}

std::vector<std::size_t> peak_rules(std::span<const CombinationExpert> pool, std::size_t peak)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < pool.size(); ++k)
        if (pool[k].v == 1 && !pool[k].ca125_only() && pool[k].peak == peak)
            out.push_back(k);
    return out;
}

void write_cell(std::ostream& out, const std::optional<double>& value)
{
    out << ',';
    if (value)
        out << format_number(*value);
    else
        out << "NA";
}

}  // namespace

PValueReport pvalue(const Cohort& window, const GridSpec& grid, std::span<const CombinationExpert> pool,
                    std::size_t n_trials, std::uint64_t seed, unsigned threads, ErrMode mode)
{
    const WindowGame game(window, pool, mode);
    const GridEvaluator evaluator(game, grid);
    return permutation_pvalue(game.observed(), grid_statistic(evaluator), n_trials, seed, threads);
}

std::vector<WindowRow> window_sweep(const Cohort& cohort, std::span<const double> t_values,
                                    std::span<const CombinationExpert> pool, const SweepConfig& config)
{
    config.grid.validate();
    if (pool.empty())
        throw ConfigError("expert pool is empty");
    std::vector<std::size_t> everyone(pool.size());
    for (std::size_t k = 0; k < pool.size(); ++k)
        everyone[k] = k;
    const auto ca125 = index_of(pool, CombinationExpert{1, 0, 0});
    const auto c3_1 = index_of(pool, CombinationExpert{1, -2, 3});
    const auto c3_2 = index_of(pool, CombinationExpert{1, -1, 3});
    const auto c2 = index_of(pool, CombinationExpert{1, -2, 2});
    const auto peak3 = peak_rules(pool, 3);
    const auto peak2 = peak_rules(pool, 2);

    std::vector<WindowRow> rows;
    rows.reserve(t_values.size());
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        WindowRow row;
        row.t = t_values[i];
        const Cohort window = select_window(cohort, row.t, config.theta, config.bounds);
        row.window_size = window.size();
        if (window.empty()) {
            rows.push_back(row);
            continue;
        }
        const WindowGame game(window, pool, config.mode);
        const auto obs = game.observed();
        const std::uint64_t seed = derive_seed(config.seed, i);
        const auto p_of = [&](const Statistic& stat) -> std::optional<double> {
            if (!config.with_pvalues)
                return std::nullopt;
            return permutation_pvalue(obs, stat, config.n_trials, seed, config.threads).p_value;
        };

        if (ca125) {
            row.ca125_e = game.expert_errors(*ca125, obs);
            row.ca125_p = p_of(best_of_statistic(game, {*ca125}));
        }
        row.aa_e = game.err(config.d, config.eta, obs);
        if (config.with_pvalues) {
            const GridEvaluator evaluator(game, config.grid);
            row.aa_p = p_of(grid_statistic(evaluator));
        }
        const auto all = best_of_statistic(game, everyone);
        row.min_e = all(obs);
        row.min_p = p_of(all);
        if (c3_1)
            row.c3_1_e = game.expert_errors(*c3_1, obs);
        if (c3_2)
            row.c3_2_e = game.expert_errors(*c3_2, obs);
        if (!peak3.empty())
            row.peak3_p = p_of(best_of_statistic(game, peak3));
        if (c2)
            row.c2_e = game.expert_errors(*c2, obs);
        if (!peak2.empty())
            row.peak2_p = p_of(best_of_statistic(game, peak2));
        rows.push_back(row);
    }
    return rows;
}

std::string format_number(double value)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

void write_window_table(std::span<const WindowRow> rows, std::ostream& out)
{
    out << "t,window_size,ca125_e,ca125_p,aa_e,aa_p,min_e,min_p,c3_1_e,c3_2_e,peak3_p,c2_e,peak2_p\n";
    for (const auto& r : rows) {
        out << format_number(r.t) << ',' << r.window_size;
        for (const auto* v : {&r.ca125_e, &r.ca125_p, &r.aa_e, &r.aa_p, &r.min_e, &r.min_p, &r.c3_1_e, &r.c3_2_e,
                              &r.peak3_p, &r.c2_e, &r.peak2_p})
            write_cell(out, *v);
        out << '\n';
    }
}

void write_error_fractions(std::span<const WindowRow> rows, std::ostream& out)
{
    out << "t,method,error_fraction\n";
    for (const auto& r : rows) {
        const std::pair<const char*, const std::optional<double>*> methods[] = {
            {"ca125", &r.ca125_e}, {"aa", &r.aa_e},     {"min", &r.min_e},
            {"c3_1", &r.c3_1_e},   {"c3_2", &r.c3_2_e}, {"c2", &r.c2_e}};
        for (const auto& [name, value] : methods) {
            out << format_number(r.t) << ',' << name;
            if (*value && r.window_size > 0)
                write_cell(out, **value / static_cast<double>(r.window_size));
            else
                write_cell(out, std::nullopt);
            out << '\n';
        }
    }
}

void write_log_pvalues(std::span<const WindowRow> rows, std::ostream& out)
{
    out << "t,method,log10_p\n";
    for (const auto& r : rows) {
        const std::pair<const char*, const std::optional<double>*> methods[] = {
            {"ca125", &r.ca125_p}, {"aa", &r.aa_p}, {"min", &r.min_p}, {"peak3", &r.peak3_p}, {"peak2", &r.peak2_p}};
        for (const auto& [name, value] : methods) {
            out << format_number(r.t) << ',' << name;
            if (*value)
                write_cell(out, std::log10(**value));
            else
                write_cell(out, std::nullopt);
            out << '\n';
        }
    }
}

}  // namespace aagame
