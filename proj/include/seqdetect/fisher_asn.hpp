#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqdetect/distributions.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

/// Truncation orders of the small-snr expansions: M terms of the Taylor
/// series of the LLR in snr, K + 1 terms of the inner series of each H1
/// inverse moment.
struct SeriesOrder {
    int M = 6;
    int K = 6;

    void validate() const;
};

/// A series value with the magnitude of its last retained term(s) as a
/// truncation-error estimate.
struct SeriesValue {
    double value;
    double residual;
};

/// A_m(N, b) = integral_0^inf exp(-(N+m-b) y) (e^y - 1)^(N/2-b) dy
///           = Gamma(N/2-b+1) Gamma(N/2+m) / Gamma(N+m-b+1).
/// Throws DomainError when a Gamma argument is nonpositive.
double a_integral(int m, std::int64_t n, int b);
double log_a_integral(int m, std::int64_t n, int b);

/// E0{(1+x)^-m} for x ~ F(N, N):  Gamma(N) Gamma(N/2+m) / (Gamma(N/2) Gamma(N+m)),
/// evaluated as prod_{j<m} (N/2 + j) / (N + j).
double e0_inverse_moment(int m, std::int64_t n);

/// E1{(1+x)^-m} for x ~ (1+snr) F(N, N), as the truncated series
///   sum_{k=0}^{K} (-1)^k Gamma(m+k)/(Gamma(m) k!) snr^k C A_m(N, 1-k),
/// C = Gamma(N)/Gamma(N/2)^2. Warns when snr > 0.1.
SeriesValue e1_inverse_moment(int m, std::int64_t n, double snr, const SeriesOrder& order = {});

/// Expected Fisher LLR of N-sample channels under `hyp`, from the order-M
/// Taylor expansion of the LLR in snr and the inverse moments above.
SeriesValue expected_fisher_llr(std::int64_t n, double snr, Hypothesis hyp, const SeriesOrder& order = {});

struct FisherAsn {
    double asn;                  // total observations, both channels
    std::int64_t n_per_channel;  // smallest N whose expected LLR reaches the Wald numerator
    double residual;             // series residual at that N
};

/// ASN of the Fisher SPRT. The LLR is not a sum of i.i.d. increments, so the
/// ASN is the smallest per-channel length N at which the expected LLR under
/// `hyp` reaches Wald's expected terminal value. Each step consumes one
/// in-phase and one quadrature sample, so asn = 2 N.
FisherAsn fisher_asn(const TestStrength& strength, double snr, Hypothesis hyp = Hypothesis::H1,
                     const SeriesOrder& order = {});

struct AsnComparison {
    double snr;
    double asn_chi2;
    double asn_fisher;
    double ratio;
    double residual_estimate;
};

/// Wald ASN of the chi2 SPRT and fisher_asn over an snr grid.
std::vector<AsnComparison> asn_ratio_curve(const TestStrength& strength, std::span<const double> snr_grid,
                                           const SeriesOrder& order = {}, Hypothesis hyp = Hypothesis::H1);

}  // namespace seqdetect
