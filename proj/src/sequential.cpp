#include "seqdetect/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "root_finding.hpp"
#include "seqdetect/diagnostics.hpp"

namespace seqdetect {

Boundaries::Boundaries(double log_upper, double log_lower) : log_upper_(log_upper), log_lower_(log_lower)
{
    if (!(log_upper > 0.0) || !std::isfinite(log_upper))
        throw DomainError("upper boundary A must exceed 1");
    if (!(log_lower < 0.0) || !std::isfinite(log_lower))
        throw DomainError("lower boundary B must lie in (0, 1)");
}

double Boundaries::upper() const
{
    return std::exp(log_upper_);
}

double Boundaries::lower() const
{
    return std::exp(log_lower_);
}

Boundaries wald_boundaries(const TestStrength& strength)
{
    const double alpha = strength.alpha();
    const double beta = strength.beta();
    if (alpha >= 0.05 || beta >= 0.05)
        warn("Wald boundary approximation is unreliable for error probabilities >= 0.05 (alpha="
             + std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
    // log((1-beta)/alpha) and log(beta/(1-alpha)), with log1p for the 1 - p terms
    const double log_a = std::log1p(-beta) - std::log(alpha);
    const double log_b = std::log(beta) - std::log1p(-alpha);
    if (log_a < 1e-3 || log_b > -1e-3)
        warn("SPRT boundaries are nearly degenerate (A and B close to 1)");
    return Boundaries(log_a, log_b);
}

SprtOutcome sprt_run(std::span<const double> increments, const Boundaries& bounds, std::optional<std::int64_t> n_max)
{
    std::size_t i = 0;
    return sprt_run(
        [&]() -> std::optional<double> {
            if (i == increments.size())
                return std::nullopt;
            return increments[i++];
        },
        bounds, n_max);
}

double h_solve(double theta, const HypothesisModel& model)
{
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw DomainError("true variance must be positive and finite");
    const double v0 = model.noise_var();
    const double v1 = model.h1_var();
    const double log_ratio = std::log1p(model.snr());  // log(v1 / v0)
    const double k = theta * (1.0 / v0 - 1.0 / v1);

    // The h-equation reduces to  -h log(v1/v0) - log(1 - h k) = 0  on h < 1/k.
    // Dividing out the trivial root h = 0 leaves
    //   q(h) = -log(1 - h k) / h - log(v1/v0),
    // which is increasing (secant slope of a convex function through the
    // origin), tends to -log(v1/v0) as h -> -inf and to +inf as h -> 1/k.
    const auto q = [&](double h) {
        if (h == 0.0)
            return k - log_ratio;
        return -std::log1p(-h * k) / h - log_ratio;
    };
    const double q0 = k - log_ratio;
    if (q0 == 0.0)
        return 0.0;

    double lo = 0.0;
    double hi = 0.0;
    if (q0 < 0.0) {
        lo = 0.0;
        hi = 1.0 / k;
    } else {
        hi = 0.0;
        lo = -1.0;
        while (q(lo) >= 0.0) {
            lo *= 2.0;
            if (!std::isfinite(lo) || lo < -1e300)
                throw NoRootError("h-equation has no sign change for theta=" + std::to_string(theta));
        }
    }
    const double h = detail::bisect_increasing(q, lo, hi, 1e-15);
    if (!std::isfinite(h))
        throw NoRootError("h-equation root finding failed for theta=" + std::to_string(theta));
    return h;
}

double oc_value(double h, const Boundaries& bounds)
{
    const double la = bounds.log_upper();
    const double lb = bounds.log_lower();
    if (std::abs(h) * std::max(la, -lb) < 1e-10)
        return la / (la - lb);
    // (A^h - 1) / (A^h - B^h); each term written to avoid overflow for large |h|.
    if (h > 0.0) {
        // divide through by A^h
        const double num = -std::expm1(-h * la);
        const double den = -std::expm1(h * (lb - la));
        return num / den;
    }
    // h < 0: divide through by B^h
    const double num = std::exp(h * (la - lb)) - std::exp(-h * lb);
    const double den = std::expm1(h * (la - lb));
    return num / den;
}

OcPoint oc_point(double theta, const HypothesisModel& model, const Boundaries& bounds)
{
    const double h = h_solve(theta, model);
    return {theta, h, oc_value(h, bounds)};
}

double wald_numerator(double oc, const Boundaries& bounds)
{
    if (!(oc >= 0.0 && oc <= 1.0))
        throw DomainError("operating characteristic must lie in [0, 1]");
    return oc * bounds.log_lower() + (1.0 - oc) * bounds.log_upper();
}

WaldAsn asn_approx(double oc, const Boundaries& bounds, double expected_increment)
{
    if (expected_increment == 0.0 || !std::isfinite(expected_increment))
        throw SingularAsnError("expected LLR increment is zero; ASN is undefined at the indifference point");
    const double numerator = wald_numerator(oc, bounds);
    const double scale = std::max(bounds.log_upper(), -bounds.log_lower());
    if (std::abs(numerator) <= 1e-12 * scale)
        return {0.0, true};
    const double value = numerator / expected_increment;
    if (!(value > 0.0))
        throw DomainError("expected increment has the wrong sign for this operating characteristic");
    return {value, false};
}

double rse(double n_fixed, double asn)
{
    if (!(n_fixed > 0.0) || !(asn > 0.0))
        throw DomainError("sample sizes must be positive");
    return n_fixed / asn;
}

}  // namespace seqdetect
