#include "seqdetect/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "seqdetect/errors.hpp"
#include "seqdetect/random.hpp"

namespace seqdetect {

namespace {

class GaussianIncrements final : public IncrementStream {
public:
    GaussianIncrements(const HypothesisModel& model, Hypothesis hyp, std::uint64_t seed)
        : model_(model), sd_(std::sqrt(model.variance(hyp))), engine_(seed)
    {
    }

    double next() override { return chi2_llr_increment(sd_ * normal_(engine_), model_); }

private:
    HypothesisModel model_;
    double sd_;
    Engine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

class ChainIncrements final : public IncrementStream {
public:
    ChainIncrements(const ChainParams& chain, const HypothesisModel& model, Hypothesis hyp, std::uint64_t seed)
        : model_(model), stream_(chain, hyp, seed)
    {
    }

    double next() override { return chi2_llr_increment(stream_.next_inphase(), model_); }

private:
    HypothesisModel model_;
    ObservationStream stream_;
};

unsigned worker_count(unsigned requested, std::int64_t n_trials)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::int64_t>(n, n_trials));
}

// Runs body(i) for i in [0, n) on `workers` threads; the first exception is
// rethrown after all threads join.
template <class Body>
void parallel_for(std::int64_t n, unsigned workers, Body&& body)
{
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::int64_t> cursor{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::int64_t i = cursor++; i < n; i = cursor++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    cursor = n;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

double quantile_sorted(const std::vector<double>& sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(Mode m) noexcept
{
    return m == Mode::direct_gaussian ? "direct_gaussian" : "full_chain";
}

Mode parse_mode(std::string_view text)
{
    if (text == "direct_gaussian")
        return Mode::direct_gaussian;
    if (text == "full_chain")
        return Mode::full_chain;
    throw ArgumentError("unknown mode '" + std::string(text) + "' (expected direct_gaussian or full_chain)");
}

void ExperimentConfig::validate() const
{
    if (n_trials < 1)
        throw DomainError("n_trials must be >= 1");
    if (n_max < 1)
        throw DomainError("n_max must be >= 1");
    if (mode == Mode::full_chain)
        chain.validate();
}

std::uint64_t trial_seed(std::uint64_t master_seed, Hypothesis hyp, std::int64_t index) noexcept
{
    return derive_seed(master_seed, hyp == Hypothesis::H0 ? 100 : 101, static_cast<std::uint64_t>(index));
}

HypothesisModel effective_model(const ExperimentConfig& config)
{
    if (config.mode == Mode::direct_gaussian)
        return config.model;
    const ChainParams chain = with_post_filter_snr(config.chain, config.model.snr());
    return HypothesisModel(post_filter_noise_var(chain), config.model.snr());
}

StreamFactory default_stream_factory(const ExperimentConfig& config)
{
    const HypothesisModel model = effective_model(config);
    if (config.mode == Mode::direct_gaussian) {
        return [model](Hypothesis hyp, std::uint64_t seed) -> std::unique_ptr<IncrementStream> {
            return std::make_unique<GaussianIncrements>(model, hyp, seed);
        };
    }
    const ChainParams chain = with_post_filter_snr(config.chain, config.model.snr());
    return [chain, model](Hypothesis hyp, std::uint64_t seed) -> std::unique_ptr<IncrementStream> {
        return std::make_unique<ChainIncrements>(chain, model, hyp, seed);
    };
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config, Hypothesis hyp, const StreamFactory& factory)
{
    config.validate();
    const StreamFactory make = factory ? factory : default_stream_factory(config);
    const Boundaries bounds = wald_boundaries(config.strength);
    const Predictor predictor{chi2_bm_params(effective_model(config).snr(), hyp), hyp};

    std::vector<TrialResult> results(static_cast<std::size_t>(config.n_trials));
    parallel_for(config.n_trials, worker_count(config.threads, config.n_trials), [&](std::int64_t i) {
        const std::unique_ptr<IncrementStream> stream = make(hyp, trial_seed(config.master_seed, hyp, i));
        TrialResult& r = results[static_cast<std::size_t>(i)];
        r.outcome = tsprt_run([&]() -> std::optional<double> { return stream->next(); }, bounds, config.n_max);
        if (r.outcome.base.decision == Decision::truncated) {
            try {
                r.outcome.predicted_n = predict_stopping(r.outcome.base.final_llr, r.outcome.base.n_stop,
                                                         predictor.bm, bounds, predictor.hyp);
            } catch (const PredictionUndefinedError&) {
                r.prediction_failed = true;
            }
        }
    });
    return results;
}

AsnEstimate summarize(std::span<const TrialResult> trials, Hypothesis hyp)
{
    AsnEstimate est{};
    est.n_trials = static_cast<std::int64_t>(trials.size());
    std::vector<double> n_values;
    n_values.reserve(trials.size());
    std::int64_t errors = 0;
    for (const TrialResult& t : trials) {
        const SprtOutcome& base = t.outcome.base;
        if (base.decision == Decision::truncated) {
            ++est.n_truncated;
            if (t.outcome.predicted_n)
                n_values.push_back(*t.outcome.predicted_n);
            else
                ++est.n_prediction_failed;
            continue;
        }
        ++est.n_decided;
        n_values.push_back(static_cast<double>(base.n_stop));
        const Decision wrong = hyp == Hypothesis::H0 ? Decision::accept_h1 : Decision::accept_h0;
        if (base.decision == wrong)
            ++errors;
    }
    if (n_values.empty())
        throw EstimationFailedError("no trial produced a stopping number (all truncated without prediction)");
    est.mean_n = sample_mean(n_values);
    est.stderr_n = n_values.size() > 1 ? sample_stddev(n_values) / std::sqrt(static_cast<double>(n_values.size())) : 0.0;
    if (est.n_decided > 0) {
        const double rate = static_cast<double>(errors) / static_cast<double>(est.n_decided);
        (hyp == Hypothesis::H0 ? est.empirical_alpha : est.empirical_beta) = rate;
        est.error_stderr = std::sqrt(rate * (1.0 - rate) / static_cast<double>(est.n_decided));
    }
    return est;
}

AsnEstimate estimate_asn(const ExperimentConfig& config, Hypothesis hyp, const StreamFactory& factory)
{
    const std::vector<TrialResult> trials = run_trials(config, hyp, factory);
    return summarize(trials, hyp);
}

std::vector<RseRow> rse_sweep(const ExperimentConfig& base, std::span<const double> snr_grid,
                              std::span<const TestStrength> strengths, const StreamFactory& factory)
{
    if (snr_grid.empty() || strengths.empty())
        throw ArgumentError("snr grid and strength list must not be empty");
    std::vector<RseRow> rows;
    for (double snr : snr_grid) {
        for (const TestStrength& strength : strengths) {
            ExperimentConfig config = base;
            config.model = HypothesisModel(base.model.noise_var(), snr);
            config.strength = strength;
            RseRow row{};
            row.snr = snr;
            row.alpha = strength.alpha();
            row.beta = strength.beta();
            row.n_fixed = required_sample_size(strength, snr, Family::chi2);
            row.asn_h0 = estimate_asn(config, Hypothesis::H0, factory);
            row.asn_h1 = estimate_asn(config, Hypothesis::H1, factory);
            const double n_fixed = static_cast<double>(row.n_fixed);
            row.rse_h0 = rse(n_fixed, row.asn_h0.mean_n);
            row.rse_h1 = rse(n_fixed, row.asn_h1.mean_n);
            // delta method: sd(N/m) ~ N sd(m) / m^2
            row.rse_h0_stderr = row.rse_h0 * row.asn_h0.stderr_n / row.asn_h0.mean_n;
            row.rse_h1_stderr = row.rse_h1 * row.asn_h1.stderr_n / row.asn_h1.mean_n;
            row.wald_rse_h0 = rse(n_fixed, chi2_wald_asn(strength, snr, Hypothesis::H0));
            row.wald_rse_h1 = rse(n_fixed, chi2_wald_asn(strength, snr, Hypothesis::H1));
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<PredictionPair> prediction_histograms(const ExperimentConfig& config, std::int64_t n_max_short,
                                                  std::int64_t n_max_long, Hypothesis hyp,
                                                  const StreamFactory& factory)
{
    if (n_max_short < 1 || n_max_short >= n_max_long)
        throw DomainError("need 1 <= n_max_short < n_max_long");
    ExperimentConfig short_config = config;
    short_config.n_max = n_max_short;
    ExperimentConfig long_config = config;
    long_config.n_max = n_max_long;
    const std::vector<TrialResult> short_runs = run_trials(short_config, hyp, factory);
    const std::vector<TrialResult> long_runs = run_trials(long_config, hyp, factory);

    const auto stopping = [](const TrialResult& r) {
        if (r.outcome.base.decision != Decision::truncated)
            return static_cast<double>(r.outcome.base.n_stop);
        if (!r.outcome.predicted_n)
            throw EstimationFailedError("truncated trial without a defined prediction");
        return *r.outcome.predicted_n;
    };
    std::vector<PredictionPair> pairs;
    pairs.reserve(short_runs.size());
    for (std::size_t i = 0; i < short_runs.size(); ++i) {
        pairs.push_back({static_cast<std::int64_t>(i), stopping(short_runs[i]), stopping(long_runs[i]),
                         short_runs[i].outcome.base.decision == Decision::truncated,
                         long_runs[i].outcome.base.decision == Decision::truncated});
    }
    return pairs;
}

double sample_mean(std::span<const double> x)
{
    if (x.empty())
        throw ArgumentError("empty sample");
    double sum = 0.0;
    for (double v : x)
        sum += v;
    return sum / static_cast<double>(x.size());
}

double sample_stddev(std::span<const double> x)
{
    if (x.size() < 2)
        throw ArgumentError("standard deviation needs at least two values");
    const double mean = sample_mean(x);
    double ss = 0.0;
    for (double v : x)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double sample_skewness(std::span<const double> x)
{
    if (x.size() < 3)
        throw ArgumentError("skewness needs at least three values");
    const double mean = sample_mean(x);
    double m2 = 0.0;
    double m3 = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    if (m2 == 0.0)
        return 0.0;
    return m3 / std::pow(m2, 1.5);
}

BootstrapInterval bootstrap_skewness_difference(std::span<const double> a, std::span<const double> b,
                                                std::int64_t resamples, double level, std::uint64_t seed)
{
    if (a.size() != b.size() || a.size() < 3)
        throw ArgumentError("paired samples must have equal length >= 3");
    if (resamples < 2)
        throw DomainError("need at least two bootstrap resamples");
    if (!(level > 0.5 && level < 1.0))
        throw DomainError("confidence level must lie in (0.5, 1)");
    Engine engine(seed);
    std::uniform_int_distribution<std::size_t> pick(0, a.size() - 1);
    std::vector<double> ra(a.size());
    std::vector<double> rb(b.size());
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(resamples));
    for (std::int64_t r = 0; r < resamples; ++r) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::size_t j = pick(engine);
            ra[i] = a[j];
            rb[i] = b[j];
        }
        diffs.push_back(sample_skewness(ra) - sample_skewness(rb));
    }
    std::sort(diffs.begin(), diffs.end());
    return {sample_skewness(a) - sample_skewness(b), quantile_sorted(diffs, 1.0 - level),
            quantile_sorted(diffs, level)};
}

}  // namespace seqdetect
