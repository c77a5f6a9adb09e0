#include "seqdetect/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <set>

#include "seqdetect/brownian.hpp"
#include "seqdetect/detectors.hpp"
#include "seqdetect/diagnostics.hpp"
#include "seqdetect/errors.hpp"
#include "seqdetect/fisher_asn.hpp"
#include "seqdetect/montecarlo.hpp"
#include "seqdetect/random.hpp"
#include "seqdetect/sequential.hpp"
#include "seqdetect/signal_chain.hpp"

namespace seqdetect {

namespace {

using R = ColumnType;

const std::map<std::string, CsvSchema, std::less<>>& schemas()
{
    static const std::map<std::string, CsvSchema, std::less<>> table = {
        {"simulate", {{"index", R::integer}, {"inphase", R::real}, {"quadrature", R::real}}},
        {"fixed",
         {{"family", R::text},
          {"n", R::integer},
          {"statistic", R::real},
          {"threshold", R::real},
          {"decision", R::text},
          {"n_required", R::integer}}},
        {"sprt",
         {{"decision", R::text},
          {"n_stop", R::integer},
          {"final_llr", R::real},
          {"log_upper", R::real},
          {"log_lower", R::real}}},
        {"tsprt",
         {{"decision", R::text},
          {"n_stop", R::integer},
          {"final_llr", R::real},
          {"log_upper", R::real},
          {"log_lower", R::real},
          {"n_max", R::integer},
          {"predicted_n", R::real}}},
        {"rse-sweep",
         {{"snr", R::real},
          {"alpha", R::real},
          {"beta", R::real},
          {"n_fixed", R::integer},
          {"asn_h0", R::real},
          {"asn_h0_stderr", R::real},
          {"asn_h1", R::real},
          {"asn_h1_stderr", R::real},
          {"rse_h0", R::real},
          {"rse_h0_stderr", R::real},
          {"rse_h1", R::real},
          {"rse_h1_stderr", R::real},
          {"wald_rse_h0", R::real},
          {"wald_rse_h1", R::real},
          {"alpha_hat", R::real},
          {"alpha_hat_stderr", R::real},
          {"beta_hat", R::real},
          {"beta_hat_stderr", R::real},
          {"truncated_h0", R::integer},
          {"truncated_h1", R::integer}}},
        {"predict-hist",
         {{"trial", R::integer},
          {"predicted_n", R::real},
          {"observed_n", R::real},
          {"short_truncated", R::integer},
          {"long_truncated", R::integer}}},
        {"fisher-asn",
         {{"snr", R::real},
          {"asn_chi2", R::real},
          {"asn_fisher", R::real},
          {"ratio", R::real},
          {"residual_estimate", R::real}}},
    };
    return table;
}

std::string fmt(double v)
{
    return format_double(v);
}

std::string fmt(std::int64_t v)
{
    return std::to_string(v);
}

CsvTable make_table(std::string_view subcommand)
{
    CsvTable table;
    for (const ColumnSpec& c : csv_schema(subcommand))
        table.header.push_back(c.name);
    table.metadata.emplace_back("subcommand", std::string(subcommand));
    return table;
}

std::vector<TestStrength> parse_strengths(const Config& cfg, const std::string& key)
{
    const auto raw = cfg.raw(key);
    if (!raw)
        return {TestStrength(0.01, 0.01), TestStrength(0.02, 0.02), TestStrength(0.05, 0.05)};
    std::vector<TestStrength> out;
    std::string_view rest = *raw;
    while (true) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
            const double p = parse_double(item, key);
            out.emplace_back(p, p);
        } else {
            out.emplace_back(parse_double(item.substr(0, colon), key), parse_double(item.substr(colon + 1), key));
        }
        if (comma == std::string_view::npos)
            break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

// Everything a subcommand needs, resolved from the config and the overrides.
struct Settings {
    ExperimentConfig experiment;
    Hypothesis hyp = Hypothesis::H1;
    Family family = Family::chi2;
    std::int64_t simulate_n = 1000;
    std::optional<std::string> fixed_input;
    std::optional<std::string> sprt_input;
    std::optional<std::int64_t> sprt_n_max;
    std::vector<double> sweep_snr;
    std::vector<TestStrength> sweep_strengths;
    std::int64_t n_max_short = 1000;
    std::int64_t n_max_long = 5000;
    std::vector<double> fisher_snr;
    SeriesOrder order;
};

Settings resolve(const CliOptions& options, const Config& cfg)
{
    std::set<std::string> allowed(known_config_keys().begin(), known_config_keys().end());
    cfg.reject_unknown(allowed);

    Settings s;
    ChainParams& c = s.experiment.chain;
    c.carrier_freq = cfg.get_double("chain.carrier_freq", c.carrier_freq);
    c.amplitude = cfg.get_double("chain.amplitude", c.amplitude);
    c.phase = cfg.get_double("chain.phase", c.phase);
    c.freq_shift = cfg.get_double("chain.freq_shift", c.freq_shift);
    c.skip_period = cfg.get_double("chain.skip_period", c.skip_period);
    c.relax_rate = cfg.get_double("chain.relax_rate", c.relax_rate);
    c.sample_period = cfg.get_double("chain.sample_period", c.sample_period);
    c.noise_var = cfg.get_double("chain.noise_var", c.noise_var);
    c.signal_var = cfg.get_double("chain.signal_var", c.signal_var);
    c.cutoff = cfg.get_double("chain.cutoff", c.cutoff);

    s.experiment.model = HypothesisModel(cfg.get_double("model.noise_var", 1.0), cfg.get_double("model.snr", 0.1));
    s.experiment.strength = TestStrength(cfg.get_double("test.alpha", 0.02), cfg.get_double("test.beta", 0.02));
    s.family = parse_family(cfg.get_string("test.family", "chi2"));

    s.experiment.n_trials = options.trials.value_or(cfg.get_int("experiment.trials", 1000));
    s.experiment.n_max = cfg.get_int("experiment.n_max", 100000);
    s.experiment.master_seed = options.seed.value_or(cfg.get_uint("experiment.seed", 1));
    s.experiment.mode = parse_mode(cfg.get_string("experiment.mode", "direct_gaussian"));
    s.experiment.threads = static_cast<unsigned>(cfg.get_int("experiment.threads", 0));
    s.hyp = parse_hypothesis(cfg.get_string("experiment.hypothesis", "H1"));
    s.experiment.validate();

    s.simulate_n = cfg.get_int("simulate.n", 1000);
    s.fixed_input = cfg.raw("fixed.input");
    s.sprt_input = cfg.raw("sprt.input");
    if (cfg.contains("sprt.n_max"))
        s.sprt_n_max = cfg.get_int("sprt.n_max", 0);
    s.sweep_snr = cfg.get_doubles("sweep.snr_grid", {0.1});
    s.sweep_strengths = parse_strengths(cfg, "sweep.strengths");
    s.n_max_short = cfg.get_int("predict.n_max_short", 1000);
    s.n_max_long = cfg.get_int("predict.n_max_long", 5000);
    s.fisher_snr = cfg.get_doubles("fisher.snr_grid", {1e-4, 3e-4, 1e-3, 3e-3, 1e-2});
    s.order.M = static_cast<int>(cfg.get_int("fisher.M", 6));
    s.order.K = static_cast<int>(cfg.get_int("fisher.K", 6));
    s.order.validate();
    if (s.simulate_n < 1)
        throw DomainError("simulate.n must be >= 1");
    return s;
}

void add_experiment_metadata(CsvTable& table, const Settings& s)
{
    const ExperimentConfig& e = s.experiment;
    table.metadata.emplace_back("seed", std::to_string(e.master_seed));
    table.metadata.emplace_back("mode", std::string(to_string(e.mode)));
    table.metadata.emplace_back("snr", fmt(e.model.snr()));
    table.metadata.emplace_back("alpha", fmt(e.strength.alpha()));
    table.metadata.emplace_back("beta", fmt(e.strength.beta()));
    if (e.mode == Mode::full_chain) {
        const ChainParams chain = with_post_filter_snr(e.chain, e.model.snr());
        table.metadata.emplace_back("chain_signal_var", fmt(chain.signal_var));
        table.metadata.emplace_back("pre_filter_snr", fmt(chain.signal_var / chain.noise_var));
        table.metadata.emplace_back("post_filter_noise_var", fmt(post_filter_noise_var(chain)));
        table.metadata.emplace_back("post_filter_snr_estimate",
                                    fmt(estimate_post_filter_snr(chain, 20000, derive_seed(e.master_seed, 7, 0))));
    }
}

// Channel samples as seen by the detectors: i.i.d. Gaussians from the model,
// or the calibrated chain.
Channels simulate_channels(const Settings& s, std::int64_t n)
{
    const ExperimentConfig& e = s.experiment;
    if (e.mode == Mode::full_chain) {
        const ChainParams chain = with_post_filter_snr(e.chain, e.model.snr());
        return generate_observation(chain, s.hyp, static_cast<std::size_t>(n), e.master_seed);
    }
    Channels ch;
    Engine in_engine(derive_seed(e.master_seed, 1, 0));
    Engine q_engine(derive_seed(e.master_seed, 2, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sd_i = std::sqrt(e.model.variance(s.hyp));
    const double sd_q = std::sqrt(e.model.noise_var());
    for (std::int64_t i = 0; i < n; ++i) {
        ch.inphase.push_back(sd_i * normal(in_engine));
        ch.quadrature.push_back(sd_q * normal(q_engine));
    }
    return ch;
}

CsvTable cmd_simulate(const Settings& s)
{
    CsvTable table = make_table("simulate");
    add_experiment_metadata(table, s);
    table.metadata.emplace_back("hypothesis", std::string(to_string(s.hyp)));
    const Channels ch = simulate_channels(s, s.simulate_n);
    for (std::size_t i = 0; i < ch.inphase.size(); ++i)
        table.add_row({std::to_string(i), fmt(ch.inphase[i]), fmt(ch.quadrature[i])});
    return table;
}

CsvTable cmd_fixed(const Settings& s)
{
    CsvTable table = make_table("fixed");
    Channels ch;
    if (s.fixed_input) {
        const CsvTable input = read_csv_file(*s.fixed_input);
        validate_csv(input, csv_schema("simulate"));
        for (const auto& row : input.rows) {
            ch.inphase.push_back(parse_double(row[1], "inphase"));
            ch.quadrature.push_back(parse_double(row[2], "quadrature"));
        }
        table.metadata.emplace_back("input", *s.fixed_input);
    } else {
        add_experiment_metadata(table, s);
        table.metadata.emplace_back("hypothesis", std::string(to_string(s.hyp)));
        ch = simulate_channels(s, s.simulate_n);
    }
    if (ch.inphase.empty())
        throw ArgumentError("fixed test needs at least one observation");
    const auto n = static_cast<std::int64_t>(ch.inphase.size());
    const HypothesisModel model = effective_model(s.experiment);
    const double statistic = s.family == Family::chi2 ? energy(ch.inphase) : fisher_ratio(ch.inphase, ch.quadrature);
    const FixedDecision d = fixed_test(statistic, s.experiment.strength, n, s.family, model);
    const std::int64_t required = required_sample_size(s.experiment.strength, model.snr(), s.family);
    table.add_row({std::string(to_string(s.family)), fmt(n), fmt(d.statistic), fmt(d.threshold),
                   std::string(to_string(d.decision)), fmt(required)});
    return table;
}

// Increments from a CSV with an `increment` column, or generated.
std::function<std::optional<double>()> increment_source(const Settings& s, std::vector<double>& storage,
                                                        std::unique_ptr<IncrementStream>& stream, CsvTable& table)
{
    if (s.sprt_input) {
        const CsvTable input = read_csv_file(*s.sprt_input);
        validate_csv(input, {{"increment", R::real}});
        for (const auto& row : input.rows)
            storage.push_back(parse_double(row[0], "increment"));
        table.metadata.emplace_back("input", *s.sprt_input);
        auto index = std::make_shared<std::size_t>(0);
        return [&storage, index]() -> std::optional<double> {
            if (*index == storage.size())
                return std::nullopt;
            return storage[(*index)++];
        };
    }
    add_experiment_metadata(table, s);
    table.metadata.emplace_back("hypothesis", std::string(to_string(s.hyp)));
    stream = default_stream_factory(s.experiment)(s.hyp, trial_seed(s.experiment.master_seed, s.hyp, 0));
    return [&stream]() -> std::optional<double> { return stream->next(); };
}

CsvTable cmd_sprt(const Settings& s)
{
    CsvTable table = make_table("sprt");
    std::vector<double> storage;
    std::unique_ptr<IncrementStream> stream;
    auto source = increment_source(s, storage, stream, table);
    const Boundaries bounds = wald_boundaries(s.experiment.strength);
    const SprtOutcome o = sprt_run(source, bounds, s.sprt_n_max);
    table.add_row({std::string(to_string(o.decision)), fmt(o.n_stop), fmt(o.final_llr), fmt(bounds.log_upper()),
                   fmt(bounds.log_lower())});
    return table;
}

CsvTable cmd_tsprt(const Settings& s)
{
    CsvTable table = make_table("tsprt");
    std::vector<double> storage;
    std::unique_ptr<IncrementStream> stream;
    auto source = increment_source(s, storage, stream, table);
    const Boundaries bounds = wald_boundaries(s.experiment.strength);
    const Predictor predictor{chi2_bm_params(s.experiment.model.snr(), s.hyp), s.hyp};
    const TsprtOutcome o = tsprt_run(source, bounds, s.experiment.n_max, predictor);
    table.add_row({std::string(to_string(o.base.decision)), fmt(o.base.n_stop), fmt(o.base.final_llr),
                   fmt(bounds.log_upper()), fmt(bounds.log_lower()), fmt(s.experiment.n_max),
                   fmt(o.predicted_n.value_or(std::nan("")))});
    return table;
}

CsvTable cmd_rse_sweep(const Settings& s)
{
    CsvTable table = make_table("rse-sweep");
    add_experiment_metadata(table, s);
    table.metadata.emplace_back("trials", std::to_string(s.experiment.n_trials));
    table.metadata.emplace_back("n_max", std::to_string(s.experiment.n_max));
    for (const RseRow& r : rse_sweep(s.experiment, s.sweep_snr, s.sweep_strengths)) {
        table.add_row({fmt(r.snr), fmt(r.alpha), fmt(r.beta), fmt(r.n_fixed), fmt(r.asn_h0.mean_n),
                       fmt(r.asn_h0.stderr_n), fmt(r.asn_h1.mean_n), fmt(r.asn_h1.stderr_n), fmt(r.rse_h0),
                       fmt(r.rse_h0_stderr), fmt(r.rse_h1), fmt(r.rse_h1_stderr), fmt(r.wald_rse_h0),
                       fmt(r.wald_rse_h1), fmt(r.asn_h0.empirical_alpha), fmt(r.asn_h0.error_stderr),
                       fmt(r.asn_h1.empirical_beta), fmt(r.asn_h1.error_stderr), fmt(r.asn_h0.n_truncated),
                       fmt(r.asn_h1.n_truncated)});
    }
    return table;
}

CsvTable cmd_predict_hist(const Settings& s)
{
    CsvTable table = make_table("predict-hist");
    add_experiment_metadata(table, s);
    table.metadata.emplace_back("hypothesis", std::string(to_string(s.hyp)));
    table.metadata.emplace_back("n_max_short", std::to_string(s.n_max_short));
    table.metadata.emplace_back("n_max_long", std::to_string(s.n_max_long));
    for (const PredictionPair& p : prediction_histograms(s.experiment, s.n_max_short, s.n_max_long, s.hyp)) {
        table.add_row({fmt(p.trial), fmt(p.predicted_n), fmt(p.observed_n), fmt(static_cast<std::int64_t>(p.short_truncated)),
                       fmt(static_cast<std::int64_t>(p.long_truncated))});
    }
    return table;
}

CsvTable cmd_fisher_asn(const Settings& s)
{
    CsvTable table = make_table("fisher-asn");
    table.metadata.emplace_back("alpha", fmt(s.experiment.strength.alpha()));
    table.metadata.emplace_back("beta", fmt(s.experiment.strength.beta()));
    table.metadata.emplace_back("hypothesis", std::string(to_string(s.hyp)));
    table.metadata.emplace_back("series_order", "M=" + std::to_string(s.order.M) + " K=" + std::to_string(s.order.K));
    for (const AsnComparison& c : asn_ratio_curve(s.experiment.strength, s.fisher_snr, s.order, s.hyp))
        table.add_row({fmt(c.snr), fmt(c.asn_chi2), fmt(c.asn_fisher), fmt(c.ratio), fmt(c.residual_estimate)});
    return table;
}

}  // namespace

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = {"simulate", "fixed",        "sprt",      "tsprt",
                                                   "rse-sweep", "predict-hist", "fisher-asn"};
    return names;
}

const CsvSchema& csv_schema(std::string_view subcommand)
{
    const auto it = schemas().find(subcommand);
    if (it == schemas().end())
        throw ArgumentError("unknown subcommand '" + std::string(subcommand) + "'");
    return it->second;
}

const std::vector<std::string>& known_config_keys()
{
    static const std::vector<std::string> keys = {
        "chain.carrier_freq",   "chain.amplitude",     "chain.phase",         "chain.freq_shift",
        "chain.skip_period",    "chain.relax_rate",    "chain.sample_period", "chain.noise_var",
        "chain.signal_var",     "chain.cutoff",        "model.noise_var",     "model.snr",
        "test.alpha",           "test.beta",           "test.family",         "experiment.trials",
        "experiment.n_max",     "experiment.seed",     "experiment.mode",     "experiment.threads",
        "experiment.hypothesis", "simulate.n",         "fixed.input",         "sprt.input",
        "sprt.n_max",           "sweep.snr_grid",      "sweep.strengths",     "predict.n_max_short",
        "predict.n_max_long",   "fisher.snr_grid",     "fisher.M",            "fisher.K",
    };
    return keys;
}

CsvTable execute(const CliOptions& options, const Config& config)
{
    (void)csv_schema(options.subcommand);
    const Settings s = resolve(options, config);
    const std::string& cmd = options.subcommand;
    if (cmd == "simulate")
        return cmd_simulate(s);
    if (cmd == "fixed")
        return cmd_fixed(s);
    if (cmd == "sprt")
        return cmd_sprt(s);
    if (cmd == "tsprt")
        return cmd_tsprt(s);
    if (cmd == "rse-sweep")
        return cmd_rse_sweep(s);
    if (cmd == "predict-hist")
        return cmd_predict_hist(s);
    return cmd_fisher_asn(s);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Fixed-size and sequential detection of a variance change in Gaussian noise", "seqdetect"};
    CliOptions options;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_path;
    std::int64_t trials = 0;
    app.add_option("command", options.subcommand, "Subcommand")
        ->required()
        ->check(CLI::IsMember(subcommands()));
    auto* config_opt = app.add_option("--config", config_path, "Configuration file");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides experiment.seed)");
    auto* out_opt = app.add_option("--out", out_path, "Output CSV path (default: stdout)");
    auto* trials_opt = app.add_option("--trials", trials, "Trial count (overrides experiment.trials)")
                           ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", options.quiet, "Suppress warnings");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return static_cast<int>(ExitCode::ok);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::parse_error);
    }
    if (*config_opt)
        options.config_path = config_path;
    if (*seed_opt)
        options.seed = seed;
    if (*out_opt)
        options.out_path = out_path;
    if (*trials_opt)
        options.trials = trials;

    std::optional<ScopedWarningHandler> silence;
    if (options.quiet)
        silence.emplace(WarningHandler{});

    try {
        const Config config = options.config_path ? Config::load(*options.config_path) : Config{};
        const CsvTable table = execute(options, config);
        if (options.out_path)
            write_csv_file(*options.out_path, table);
        else
            write_csv(out, table);
        return static_cast<int>(ExitCode::ok);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::io_error);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::parse_error);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::domain_error);
    }
}

}  // namespace seqdetect
