#include "seqdetect/fisher_asn.hpp"

#include <cmath>
#include <string>

#include "seqdetect/brownian.hpp"
#include "seqdetect/diagnostics.hpp"
#include "seqdetect/errors.hpp"
#include "seqdetect/sequential.hpp"

namespace seqdetect {

namespace {

constexpr double kSeriesSnrLimit = 0.1;
constexpr std::int64_t kFisherSearchCap = 1'000'000'000'000;

void warn_series_range(double snr)
{
    if (snr > kSeriesSnrLimit)
        warn("small-snr series used outside its validity range (snr=" + std::to_string(snr) + " > 0.1)");
}

void check_inputs(std::int64_t n, double snr)
{
    if (n < 1)
        throw DomainError("sample count must be >= 1");
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be >= 0 and finite");
}

// Inner series without the range warning; the callers below warn once.
SeriesValue e1_series(int m, std::int64_t n, double snr, int k_max)
{
    const double half = 0.5 * static_cast<double>(n);
    const double full = static_cast<double>(n);
    // term_0 = C A_m(N, 1) = E0{(1+x)^-m}; the ratio of successive terms is
    //   -snr (m+k)/(k+1) (N/2+k)/(N+m+k).
    double term = e0_inverse_moment(m, n);
    double sum = term;
    for (int k = 0; k < k_max; ++k) {
        term *= -snr * (m + k) / (k + 1.0) * (half + k) / (full + m + k);
        sum += term;
    }
    return {sum, std::abs(term)};
}

SeriesValue llr_series(std::int64_t n, double snr, Hypothesis hyp, const SeriesOrder& order)
{
    const double dn = static_cast<double>(n);
    // log(1 + snr y) = sum_m (-1)^(m+1) snr^m y^m / m with y = 1/(1+x)
    double sum = 0.0;
    double residual = 0.0;
    double snr_pow = 1.0;
    for (int m = 1; m <= order.M; ++m) {
        snr_pow *= snr;
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        double moment = 0.0;
        if (hyp == Hypothesis::H0) {
            moment = e0_inverse_moment(m, n);
        } else {
            const SeriesValue inner = e1_series(m, n, snr, order.K);
            moment = inner.value;
            residual += snr_pow / m * inner.residual;
        }
        const double term = sign * snr_pow / m * moment;
        sum += term;
        if (m == order.M)
            residual += std::abs(term);
    }
    return {0.5 * dn * std::log1p(snr) - dn * sum, dn * residual};
}

}  // namespace

void SeriesOrder::validate() const
{
    if (M < 1)
        throw DomainError("series order M must be >= 1");
    if (K < 0)
        throw DomainError("series order K must be >= 0");
}

double log_a_integral(int m, std::int64_t n, int b)
{
    if (n < 1)
        throw DomainError("N must be >= 1");
    const double half = 0.5 * static_cast<double>(n);
    const double x1 = half - b + 1.0;
    const double x2 = half + m;
    const double x3 = static_cast<double>(n) + m - b + 1.0;
    if (!(x1 > 0.0) || !(x2 > 0.0) || !(x3 > 0.0))
        throw DomainError("A_m(N, b) needs positive Gamma arguments (m=" + std::to_string(m) + ", N="
                          + std::to_string(n) + ", b=" + std::to_string(b) + ")");
    return std::lgamma(x1) + std::lgamma(x2) - std::lgamma(x3);
}

double a_integral(int m, std::int64_t n, int b)
{
    return std::exp(log_a_integral(m, n, b));
}

double e0_inverse_moment(int m, std::int64_t n)
{
    if (m < 0)
        throw DomainError("moment order must be >= 0");
    if (n < 1)
        throw DomainError("N must be >= 1");
    const double half = 0.5 * static_cast<double>(n);
    const double full = static_cast<double>(n);
    double value = 1.0;
    for (int j = 0; j < m; ++j)
        value *= (half + j) / (full + j);
    return value;
}

SeriesValue e1_inverse_moment(int m, std::int64_t n, double snr, const SeriesOrder& order)
{
    order.validate();
    check_inputs(n, snr);
    if (m < 1)
        throw DomainError("moment order must be >= 1");
    warn_series_range(snr);
    return e1_series(m, n, snr, order.K);
}

SeriesValue expected_fisher_llr(std::int64_t n, double snr, Hypothesis hyp, const SeriesOrder& order)
{
    order.validate();
    check_inputs(n, snr);
    warn_series_range(snr);
    return llr_series(n, snr, hyp, order);
}

FisherAsn fisher_asn(const TestStrength& strength, double snr, Hypothesis hyp, const SeriesOrder& order)
{
    order.validate();
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be positive and finite");
    warn_series_range(snr);

    const Boundaries bounds = wald_boundaries(strength);
    const double oc = hyp == Hypothesis::H1 ? strength.beta() : 1.0 - strength.alpha();
    // Oriented so the target is positive under either hypothesis.
    const double sign = hyp == Hypothesis::H1 ? 1.0 : -1.0;
    const double target = sign * wald_numerator(oc, bounds);
    if (!(target > 0.0))
        throw DomainError("Wald numerator has the wrong sign for this hypothesis");
    const auto reaches = [&](std::int64_t n) { return sign * llr_series(n, snr, hyp, order).value >= target; };

    std::int64_t below = 0;
    std::int64_t above = 1;
    while (!reaches(above)) {
        below = above;
        above *= 2;
        if (above > kFisherSearchCap)
            throw InfeasibleError("Fisher ASN search exceeded " + std::to_string(kFisherSearchCap) + " samples",
                                  kFisherSearchCap);
    }
    while (above - below > 1) {
        const std::int64_t mid = below + (above - below) / 2;
        if (reaches(mid))
            above = mid;
        else
            below = mid;
    }
    const SeriesValue at = llr_series(above, snr, hyp, order);
    return {2.0 * static_cast<double>(above), above, at.residual};
}

std::vector<AsnComparison> asn_ratio_curve(const TestStrength& strength, std::span<const double> snr_grid,
                                           const SeriesOrder& order, Hypothesis hyp)
{
    if (snr_grid.empty())
        throw ArgumentError("snr grid must not be empty");
    std::vector<AsnComparison> rows;
    rows.reserve(snr_grid.size());
    for (double snr : snr_grid) {
        const double chi2 = chi2_wald_asn(strength, snr, hyp);
        const FisherAsn fisher = fisher_asn(strength, snr, hyp, order);
        rows.push_back({snr, chi2, fisher.asn, fisher.asn / chi2, fisher.residual});
    }
    return rows;
}

}  // namespace seqdetect
