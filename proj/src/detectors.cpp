#include "seqdetect/detectors.hpp"

#include <cmath>

#include "seqdetect/errors.hpp"

namespace seqdetect {

HypothesisModel::HypothesisModel(double noise_var, double snr) : noise_var_(noise_var), snr_(snr)
{
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw DomainError("noise variance must be positive");
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be positive");
}

double energy(std::span<const double> x)
{
    double sum = 0.0;
    for (double v : x)
        sum += v * v;
    return sum;
}

double chi2_llr(double energy, std::int64_t n, const HypothesisModel& model)
{
    if (!(energy >= 0.0))
        throw DomainError("energy must be >= 0");
    if (n < 1)
        throw DomainError("sample count must be >= 1");
    const double snr = model.snr();
    return snr / (1.0 + snr) * energy / (2.0 * model.noise_var()) - 0.5 * static_cast<double>(n) * std::log1p(snr);
}

double chi2_llr_increment(double x, const HypothesisModel& model)
{
    const double snr = model.snr();
    return snr / (1.0 + snr) * x * x / (2.0 * model.noise_var()) - 0.5 * std::log1p(snr);
}

double fisher_ratio(std::span<const double> inphase, std::span<const double> quadrature)
{
    if (inphase.empty() || inphase.size() != quadrature.size())
        throw ArgumentError("channels must have equal, nonzero lengths");
    const double denominator = energy(quadrature);
    if (!(denominator > 0.0))
        throw DegenerateInputError("quadrature energy is zero");
    return energy(inphase) / denominator;
}

double fisher_llr(double x, std::int64_t n, double snr)
{
    if (!(x > 0.0))
        throw DomainError("energy ratio must be > 0");
    if (n < 1)
        throw DomainError("sample count must be >= 1");
    if (!(snr > 0.0))
        throw DomainError("snr must be > 0");
    const double dn = static_cast<double>(n);
    // log(1+x) - log(1+snr+x) = -log1p(snr / (1+x)), stable for small snr.
    return 0.5 * dn * std::log1p(snr) - dn * std::log1p(snr / (1.0 + x));
}

FixedDecision fixed_test(double statistic, const TestStrength& strength, std::int64_t n, Family family,
                         const HypothesisModel& model)
{
    if (!(statistic >= 0.0))
        throw DomainError("test statistic must be >= 0");
    double threshold = fixed_threshold(family, n, strength.alpha());
    if (family == Family::chi2)
        threshold *= model.noise_var();
    return {statistic > threshold ? Decision::accept_h1 : Decision::accept_h0, statistic, threshold, n};
}

}  // namespace seqdetect
