#include "seqdetect/brownian.hpp"

#include <cmath>

#include "seqdetect/errors.hpp"
#include "seqdetect/special_functions.hpp"

namespace seqdetect {

BrownianParams chi2_bm_params(double snr, Hypothesis hyp)
{
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be positive and finite");
    if (hyp == Hypothesis::H1) {
        // snr/2 - log1p(snr)/2 = -log1pmx(snr)/2
        return {-0.5 * special::log1pmx(snr), 0.5 * snr * snr};
    }
    // With u = snr/(1+snr): u/2 + log(1-u)/2 = log1pmx(-u)/2
    const double u = snr / (1.0 + snr);
    return {0.5 * special::log1pmx(-u), 0.5 * u * u};
}

double predict_stopping(double final_llr, std::int64_t n_max, const BrownianParams& bm, const Boundaries& bounds,
                        Hypothesis hyp)
{
    if (n_max < 1)
        throw DomainError("n_max must be >= 1");
    if (bm.mu == 0.0 || !std::isfinite(bm.mu))
        throw PredictionUndefinedError("Brownian drift is zero");
    const double target = hyp == Hypothesis::H1 ? bounds.log_upper() : bounds.log_lower();
    const double remaining = target - final_llr;
    if (remaining == 0.0)
        return static_cast<double>(n_max);
    if ((remaining > 0.0) != (bm.mu > 0.0))
        throw PredictionUndefinedError("drift points away from the boundary of the assumed hypothesis");
    return static_cast<double>(n_max) + remaining / bm.mu;
}

TsprtOutcome tsprt_run(std::span<const double> increments, const Boundaries& bounds, std::int64_t n_max,
                       std::optional<Predictor> predictor)
{
    std::size_t i = 0;
    return tsprt_run(
        [&]() -> std::optional<double> {
            if (i == increments.size())
                return std::nullopt;
            return increments[i++];
        },
        bounds, n_max, predictor);
}

double chi2_wald_asn(const TestStrength& strength, double snr, Hypothesis hyp)
{
    const Boundaries bounds = wald_boundaries(strength);
    const double oc = hyp == Hypothesis::H1 ? strength.beta() : 1.0 - strength.alpha();
    const WaldAsn asn = asn_approx(oc, bounds, chi2_bm_params(snr, hyp).mu);
    if (asn.degenerate)
        throw DomainError("Wald ASN numerator vanishes");
    return asn.value;
}

}  // namespace seqdetect
