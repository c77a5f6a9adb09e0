#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "seqdetect/brownian.hpp"
#include "seqdetect/detectors.hpp"
#include "seqdetect/distributions.hpp"
#include "seqdetect/signal_chain.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

enum class Mode {
    direct_gaussian,  // i.i.d. zero-mean Gaussians at the model variance
    full_chain,       // post-filter in-phase samples of the simulated chain
};

std::string_view to_string(Mode m) noexcept;
Mode parse_mode(std::string_view text);

struct ExperimentConfig {
    ChainParams chain{};
    // LLR model. In full_chain mode only its snr is used: the chain is
    // calibrated to that post-filter snr and the noise variance is taken from
    // the filter gain.
    HypothesisModel model{1.0, 1.0};
    TestStrength strength{0.02, 0.02};
    std::int64_t n_trials = 1000;
    std::int64_t n_max = 100000;
    std::uint64_t master_seed = 1;
    Mode mode = Mode::direct_gaussian;
    unsigned threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

/// Source of chi2 LLR increments for one trial.
class IncrementStream {
public:
    virtual ~IncrementStream() = default;
    virtual double next() = 0;
};

/// Builds the stream of one trial from the true hypothesis and the trial seed.
using StreamFactory = std::function<std::unique_ptr<IncrementStream>(Hypothesis, std::uint64_t)>;

/// Default factory for config.mode.
StreamFactory default_stream_factory(const ExperimentConfig& config);

/// Seed of trial `index` under hypothesis `hyp`. Depends only on the master
/// seed, the hypothesis and the index, never on scheduling.
std::uint64_t trial_seed(std::uint64_t master_seed, Hypothesis hyp, std::int64_t index) noexcept;

/// LLR model actually used by the increments of `config`.
HypothesisModel effective_model(const ExperimentConfig& config);

struct TrialResult {
    TsprtOutcome outcome;
    bool prediction_failed = false;
};

/// Run config.n_trials truncated SPRTs under `hyp`, in parallel, and return
/// them in trial order. Truncated runs carry a predicted stopping number
/// from the Brownian approximation of the chi2 LLR.
std::vector<TrialResult> run_trials(const ExperimentConfig& config, Hypothesis hyp,
                                    const StreamFactory& factory = {});

struct AsnEstimate {
    double mean_n;
    double stderr_n;
    double empirical_alpha;  // P(accept H1) among decided H0 trials; 0 for an H1 run
    double empirical_beta;   // P(accept H0) among decided H1 trials; 0 for an H0 run
    double error_stderr;     // binomial standard error of the relevant rate
    std::int64_t n_trials;
    std::int64_t n_decided;
    std::int64_t n_truncated;
    std::int64_t n_prediction_failed;  // truncated trials left out of mean_n
};

/// ASN estimate: the mean stopping number over all trials, using the
/// predicted stopping number for truncated ones. Throws
/// EstimationFailedError when no trial contributes.
AsnEstimate estimate_asn(const ExperimentConfig& config, Hypothesis hyp, const StreamFactory& factory = {});
AsnEstimate summarize(std::span<const TrialResult> trials, Hypothesis hyp);

struct RseRow {
    double snr;
    double alpha;
    double beta;
    std::int64_t n_fixed;
    AsnEstimate asn_h0;
    AsnEstimate asn_h1;
    double rse_h0;
    double rse_h1;
    double rse_h0_stderr;
    double rse_h1_stderr;
    double wald_rse_h0;
    double wald_rse_h1;
};

/// For each (snr, strength): fixed chi2 sample size, Monte Carlo ASN under
/// both hypotheses, empirical and Wald RSE. Rows are ordered snr-major.
std::vector<RseRow> rse_sweep(const ExperimentConfig& base, std::span<const double> snr_grid,
                              std::span<const TestStrength> strengths, const StreamFactory& factory = {});

struct PredictionPair {
    std::int64_t trial;
    double predicted_n;  // short budget: n_stop, or the prediction when truncated
    double observed_n;   // long budget: n_stop, or the prediction when still truncated
    bool short_truncated;
    bool long_truncated;
};

/// Seed-matched runs of the same trials with budgets n_max_short and
/// n_max_long; the stopping numbers of both are paired per trial.
std::vector<PredictionPair> prediction_histograms(const ExperimentConfig& config, std::int64_t n_max_short,
                                                  std::int64_t n_max_long, Hypothesis hyp = Hypothesis::H1,
                                                  const StreamFactory& factory = {});

double sample_mean(std::span<const double> x);
double sample_stddev(std::span<const double> x);
/// Moment skewness m3 / m2^(3/2).
double sample_skewness(std::span<const double> x);

struct BootstrapInterval {
    double estimate;
    double lower;
    double upper;
};

/// Paired percentile bootstrap of skewness(a) - skewness(b), resampling trial
/// indices jointly. lower and upper are the one-sided percentile bounds at
/// confidence `level` (the 1-level and level quantiles of the replicates).
BootstrapInterval bootstrap_skewness_difference(std::span<const double> a, std::span<const double> b,
                                                std::int64_t resamples, double level, std::uint64_t seed);

}  // namespace seqdetect
