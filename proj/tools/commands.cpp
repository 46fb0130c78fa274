#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "aagame/aggregation.hpp"
#include "aagame/cohort.hpp"
#include "aagame/errors.hpp"
#include "aagame/experts.hpp"
#include "aagame/stats.hpp"
#include "aagame/synth.hpp"

namespace aagame::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    // cohort source
    std::string input;
    bool synth = false;
    SynthConfig synth_config;
    std::uint64_t seed = 0;
    std::string out_file;
    std::string out_dir;
    // learner
    double eta = 1.0;
    std::string prior = "uniform";
    bool categorical = false;
    // windows and Monte Carlo
    double t_start = 0.0;
    double t_end = 16.0;
    double theta = 6.0;
    bool closed_windows = false;
    bool per_triplet = false;
    std::vector<double> grid_d = GridSpec::defaults().d_values;
    std::vector<double> grid_eta = GridSpec::defaults().eta_values;
    std::size_t trials = 10000;
    unsigned threads = 1;
};

void add_synth_options(CLI::App& app, Options& o)
{
    app.add_option("--triplets", o.synth_config.n_triplets, "Synthetic triplet count")->capture_default_str();
    app.add_option("--peaks", o.synth_config.n_peaks, "Synthetic peak count")->capture_default_str();
    app.add_option("--signal", o.synth_config.signal_strength, "Planted log-scale signal strength")
        ->capture_default_str();
    app.add_option("--horizon", o.synth_config.signal_horizon, "Months after which the signal vanishes")
        ->capture_default_str();
    app.add_option("--informative", o.synth_config.informative_peaks, "Informative peak indices")
        ->delimiter(',')
        ->capture_default_str();
}

void add_source_options(CLI::App& app, Options& o)
{
    auto* input = app.add_option("--input", o.input, "Cohort CSV file");
    auto* synth = app.add_flag("--synth", o.synth, "Generate a synthetic cohort instead of reading --input");
    input->excludes(synth);
    synth->excludes(input);
    add_synth_options(app, o);
}

void add_window_options(CLI::App& app, Options& o, bool with_trials)
{
    app.add_option("--t-start", o.t_start, "First window start (months)")->capture_default_str();
    app.add_option("--t-end", o.t_end, "Last window start (months)")->capture_default_str();
    app.add_option("--theta", o.theta, "Window length (months)")->capture_default_str();
    app.add_flag("--closed-windows", o.closed_windows, "Use [t, t+theta] instead of [t, t+theta)");
    app.add_flag("--per-triplet", o.per_triplet, "Restart the aggregator on every triplet");
    app.add_option("--grid-d", o.grid_d, "Grid of power-law bases")->delimiter(',');
    app.add_option("--grid-eta", o.grid_eta, "Grid of learning rates")->delimiter(',');
    if (with_trials) {
        app.add_option("--trials", o.trials, "Monte-Carlo trials per p-value")->capture_default_str();
        app.add_option("--threads", o.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    }
}

double parse_prior(const std::string& text)
{
    if (text == "uniform")
        return 1.0;
    if (text.starts_with("power:")) {
        const std::string value = text.substr(6);
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == value.size() && used > 0)
            return d;
    }
    throw ConfigError("--prior must be 'uniform' or 'power:<d>', got '" + text + "'");
}

Cohort obtain_cohort(const Options& o)
{
    if (o.synth == !o.input.empty())
        throw ConfigError("exactly one of --input or --synth is required");
    Cohort cohort;
    if (o.synth) {
        SynthConfig cfg = o.synth_config;
        cfg.seed = o.seed;
        cohort = generate(cfg);
    } else {
        cohort = load_cohort(o.input);
    }
    if (cohort.empty())
        throw DataError("cohort has no triplets");
    return floor_zero_intensities(cohort);
}

fs::path prepare_out_dir(const Options& o)
{
    if (o.out_dir.empty())
        throw ConfigError("--out-dir is required");
    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw DataError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    return out;
}

std::vector<double> window_starts(const Options& o)
{
    if (!(o.t_end >= o.t_start) || o.t_start < 0.0)
        throw ConfigError("--t-start must be >= 0 and <= --t-end");
    std::vector<double> ts;
    const auto count = static_cast<std::size_t>(std::floor(o.t_end - o.t_start + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i)
        ts.push_back(o.t_start + static_cast<double>(i));
    return ts;
}

SweepConfig sweep_config(const Options& o, bool with_pvalues)
{
    SweepConfig cfg;
    cfg.grid = GridSpec{o.grid_d, o.grid_eta};
    cfg.grid.validate();
    cfg.d = parse_prior(o.prior);
    cfg.eta = o.eta;
    if (!(cfg.eta > 0.0 && cfg.eta <= 1.0))
        throw ConfigError("--eta must lie in (0, 1]");
    if (!(o.theta > 0.0))
        throw ConfigError("--theta must be positive");
    cfg.theta = o.theta;
    cfg.bounds = o.closed_windows ? WindowBounds::closed : WindowBounds::half_open;
    cfg.mode = o.per_triplet ? ErrMode::per_triplet : ErrMode::windowed;
    cfg.with_pvalues = with_pvalues;
    if (with_pvalues && o.trials == 0)
        throw ConfigError("--trials must be positive");
    cfg.n_trials = o.trials;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    return cfg;
}

void cmd_synth(const Options& o, std::ostream& out)
{
    if (o.out_file.empty())
        throw ConfigError("--out is required");
    SynthConfig cfg = o.synth_config;
    cfg.seed = o.seed;
    const Cohort cohort = generate(cfg);
    save_cohort(cohort, o.out_file);
    out << "wrote " << cohort.size() << " triplets to " << o.out_file << '\n';
}

// Per-step L_N^k - L_N for every expert, plus the learner's own column.
void cmd_run(const Options& o, std::ostream& out)
{
    const double d = parse_prior(o.prior);
    const Cohort cohort = order_chronological(obtain_cohort(o));
    const auto pool = build_pool(cohort.num_peaks);
    const auto prior = power_law_prior(pool, d);
    const fs::path dir = prepare_out_dir(o);

    std::vector<Event> events;
    events.reserve(cohort.size());
    for (const auto& tr : cohort.triplets) {
        Event ev{{}, tr.case_position};
        ev.expert_preds.reserve(pool.size());
        for (const auto& e : pool)
            ev.expert_preds.push_back(expert_predict(e, tr));
        events.push_back(std::move(ev));
    }
    const auto records = run_online(prior, o.eta, events, o.categorical);

    const fs::path path = dir / "cumulative_loss.csv";
    auto file = open_output(path);
    file << "step,triplet_id,aa";
    for (const auto& e : pool)
        file << ',' << e.label();
    file << '\n';
    double learner = 0.0;
    std::vector<double> experts(pool.size(), 0.0);
    for (std::size_t t = 0; t < records.size(); ++t) {
        learner += records[t].learner_loss;
        file << (t + 1) << ',' << cohort.triplets[t].id << ',' << format_number(learner - learner);
        for (std::size_t k = 0; k < pool.size(); ++k) {
            experts[k] += records[t].expert_losses[k];
            file << ',' << format_number(experts[k] - learner);
        }
        file << '\n';
    }
    out << "wrote " << records.size() << " steps to " << path.string() << '\n';
}

void cmd_windows(const Options& o, std::ostream& out)
{
    const auto cfg = sweep_config(o, true);
    const auto ts = window_starts(o);
    const Cohort cohort = obtain_cohort(o);
    const auto pool = build_pool(cohort.num_peaks);
    const fs::path dir = prepare_out_dir(o);
    const auto rows = window_sweep(cohort, ts, pool, cfg);
    auto table = open_output(dir / "table.csv");
    write_window_table(rows, table);
    auto fractions = open_output(dir / "error_fractions.csv");
    write_error_fractions(rows, fractions);
    out << "wrote " << rows.size() << " windows to " << dir.string() << '\n';
}

void cmd_pvalues(const Options& o, std::ostream& out)
{
    const auto cfg = sweep_config(o, true);
    const auto ts = window_starts(o);
    const Cohort cohort = obtain_cohort(o);
    const auto pool = build_pool(cohort.num_peaks);
    const fs::path dir = prepare_out_dir(o);
    const auto rows = window_sweep(cohort, ts, pool, cfg);
    auto file = open_output(dir / "log_pvalues.csv");
    write_log_pvalues(rows, file);
    out << "wrote p-values for " << rows.size() << " windows to " << dir.string() << '\n';
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Aggregating Algorithm for triplet-wise Brier forecasting"};
    app.require_subcommand(1);
    Options o;

    auto* synth = app.add_subcommand("synth", "Write a synthetic cohort CSV");
    synth->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    synth->add_option("--out", o.out_file, "Output CSV path")->required();
    add_synth_options(*synth, o);

    auto* run_cmd = app.add_subcommand("run", "Cumulative losses of the AA and every expert");
    add_source_options(*run_cmd, o);
    run_cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    run_cmd->add_option("--eta", o.eta, "Learning rate")->capture_default_str();
    run_cmd->add_option("--prior", o.prior, "uniform | power:<d>")->capture_default_str();
    run_cmd->add_flag("--categorical", o.categorical, "Sharpen the learner's predictions");
    run_cmd->add_option("--out-dir", o.out_dir, "Output directory")->required();

    auto* windows = app.add_subcommand("windows", "Windowed error table and error fractions");
    auto* pvalues = app.add_subcommand("pvalues", "Permutation p-values per window and method");
    for (auto* sub : {windows, pvalues}) {
        add_source_options(*sub, o);
        sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
        sub->add_option("--eta", o.eta, "Learning rate for the fixed-parameter AA")->default_str("0.65");
        sub->add_option("--prior", o.prior, "uniform | power:<d> for the fixed-parameter AA")
            ->default_str("power:1.2");
        add_window_options(*sub, o, true);
        sub->add_option("--out-dir", o.out_dir, "Output directory")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*synth) {
            cmd_synth(o, out);
        } else if (*run_cmd) {
            cmd_run(o, out);
        } else {
            const auto* sub = *windows ? windows : pvalues;
            if (sub->count("--eta") == 0)
                o.eta = 0.65;
            if (sub->count("--prior") == 0)
                o.prior = "power:1.2";
            if (*windows)
                cmd_windows(o, out);
            else
                cmd_pvalues(o, out);
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitOk;
}

}  // namespace aagame::cli
