#pragma once

#include <cstdint>

#include "seqdetect/types.hpp"

namespace seqdetect {

/// sigma^2 * chi^2_N: the law of the energy of N i.i.d. N(0, sigma^2) samples.
class ScaledChi2 {
public:
    ScaledChi2(std::int64_t df, double scale);

    std::int64_t df() const noexcept { return df_; }
    double scale() const noexcept { return scale_; }
    double mean() const noexcept { return static_cast<double>(df_) * scale_; }
    double variance() const noexcept { return 2.0 * static_cast<double>(df_) * scale_ * scale_; }

private:
    std::int64_t df_;
    double scale_;
};

/// sigma^2 * F(N, N): the law of a ratio of two N-sample energies whose
/// variances differ by the factor sigma^2 (= 1 + snr under H1).
class ScaledFisherF {
public:
    ScaledFisherF(std::int64_t df, double scale);

    std::int64_t df() const noexcept { return df_; }
    double scale() const noexcept { return scale_; }

private:
    std::int64_t df_;
    double scale_;
};

/// Target error pair (P_fa, P_mis) = (alpha, beta).
class TestStrength {
public:
    TestStrength(double alpha, double beta);

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }

    friend bool operator==(const TestStrength&, const TestStrength&) = default;

private:
    double alpha_;
    double beta_;
};

double pdf(const ScaledChi2& dist, double x);
double cdf(const ScaledChi2& dist, double x);
/// Survival function 1 - cdf, accurate in the upper tail.
double ccdf(const ScaledChi2& dist, double x);
double quantile(const ScaledChi2& dist, double p);
/// x such that ccdf(x) = q.
double upper_quantile(const ScaledChi2& dist, double q);

double pdf(const ScaledFisherF& dist, double x);
double cdf(const ScaledFisherF& dist, double x);
double ccdf(const ScaledFisherF& dist, double x);
double quantile(const ScaledFisherF& dist, double p);
double upper_quantile(const ScaledFisherF& dist, double q);

/// Threshold on the raw statistic (unit H0 scale) giving false-alarm alpha
/// with an N-sample statistic of the given family.
double fixed_threshold(Family family, std::int64_t n, double alpha);

/// Miss probability of the N-sample one-sided test at false-alarm alpha when
/// H1 inflates the scale by (1 + snr). Uses F1(t) = F0(t / (1 + snr)).
double miss_probability(Family family, std::int64_t n, double alpha, double snr);

inline constexpr std::int64_t kDefaultSampleSizeCap = 100'000'000;

/// Smallest N whose alpha-level test has miss probability <= beta.
/// Throws InfeasibleError when N would exceed `cap`.
std::int64_t required_sample_size(const TestStrength& strength, double snr, Family family,
                                  std::int64_t cap = kDefaultSampleSizeCap);

}  // namespace seqdetect
