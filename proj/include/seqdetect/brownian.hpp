#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <span>

#include "seqdetect/distributions.hpp"
#include "seqdetect/sequential.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

/// Per-sample drift and variance of the Brownian motion that approximates
/// the cumulative LLR.
struct BrownianParams {
    double mu;
    double sigma2;
};

/// Moments of the chi2 SPRT increment a x^2 - log(1+snr)/2,
/// a = snr / (2 sigma^2 (1 + snr)):
///   H0: mu = snr/(2(1+snr)) - log(1+snr)/2,  sigma2 = snr^2 / (2 (1+snr)^2)
///   H1: mu = snr/2 - log(1+snr)/2,            sigma2 = snr^2 / 2
/// The drifts are evaluated through log1pmx so they keep full relative
/// precision as snr -> 0, where both behave like -+snr^2/4.
BrownianParams chi2_bm_params(double snr, Hypothesis hyp);

/// Linear extrapolation of the Brownian mean path from (n_max, final_llr) to
/// the boundary the drift points at: log A under H1, log B under H0.
/// Throws PredictionUndefinedError when the drift points away from it.
double predict_stopping(double final_llr, std::int64_t n_max, const BrownianParams& bm, const Boundaries& bounds,
                        Hypothesis hyp);

struct Predictor {
    BrownianParams bm;
    Hypothesis hyp;
};

struct TsprtOutcome {
    SprtOutcome base;
    std::optional<double> predicted_n;  // only for truncated runs with a predictor
};

/// Truncated SPRT: sprt_run with a hard budget of n_max increments. A
/// truncated run carries a predicted stopping number when `predictor` is set.
template <class Source>
    requires std::invocable<Source&>
TsprtOutcome tsprt_run(Source&& next, const Boundaries& bounds, std::int64_t n_max,
                       std::optional<Predictor> predictor = std::nullopt)
{
    if (n_max < 1)
        throw DomainError("n_max must be >= 1");
    TsprtOutcome out{sprt_run(std::forward<Source>(next), bounds, n_max), std::nullopt};
    if (out.base.decision == Decision::truncated && predictor)
        out.predicted_n = predict_stopping(out.base.final_llr, out.base.n_stop, predictor->bm, bounds, predictor->hyp);
    return out;
}

TsprtOutcome tsprt_run(std::span<const double> increments, const Boundaries& bounds, std::int64_t n_max,
                       std::optional<Predictor> predictor = std::nullopt);

/// Wald's ASN of the chi2 SPRT at the Wald boundaries, taking L = 1 - alpha
/// under H0 and L = beta under H1 and the drifts of chi2_bm_params.
double chi2_wald_asn(const TestStrength& strength, double snr, Hypothesis hyp);

}  // namespace seqdetect
