#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "seqdetect/detectors.hpp"
#include "seqdetect/errors.hpp"

using namespace seqdetect;

namespace {

double log_chi2_density(double e, std::int64_t n, double var)
{
    boost::math::chi_squared_distribution<double> d(static_cast<double>(n));
    return std::log(boost::math::pdf(d, e / var)) - std::log(var);
}

double log_fisher_density(double x, std::int64_t n, double scale)
{
    boost::math::fisher_f_distribution<double> d(static_cast<double>(n), static_cast<double>(n));
    return std::log(boost::math::pdf(d, x / scale)) - std::log(scale);
}

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double var)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(var));
    std::vector<double> x(n);
    for (double& v : x)
        v = normal(rng);
    return x;
}

}  // namespace

TEST(Detectors, Examples)
{
    const std::vector<double> x = {1.0, -2.0, 2.0};
    EXPECT_DOUBLE_EQ(energy(x), 9.0);
    EXPECT_EQ(energy(std::vector<double>{}), 0.0);
    const HypothesisModel unit(1.0, 1.0);
    EXPECT_NEAR(chi2_llr(4.0, 2, unit), 0.306853, 1e-6);
    EXPECT_NEAR(fisher_llr(1.0, 2, 1.0), -0.117783, 1e-6);
    EXPECT_NEAR(chi2_llr_increment(2.0, unit), chi2_llr(4.0, 1, unit), 1e-15);
    const std::vector<double> q = {1.0, 1.0, 1.0};
    EXPECT_DOUBLE_EQ(fisher_ratio(x, q), 3.0);
}

TEST(Detectors, Chi2LlrIsLogDensityRatio)
{
    for (double snr : {0.01, 0.3, 1.0, 4.0})
        for (double nv : {0.5, 2.0})
            for (std::int64_t n : {1, 7, 64})
                for (double e : {0.3, 5.0, 80.0}) {
                    const HypothesisModel m(nv, snr);
                    const double oracle = log_chi2_density(e, n, m.h1_var()) - log_chi2_density(e, n, nv);
                    EXPECT_NEAR(chi2_llr(e, n, m), oracle, 1e-10 * (1 + std::abs(oracle)));
                }
}

TEST(Detectors, FisherLlrIsLogDensityRatio)
{
    for (double snr : {0.01, 0.3, 1.0, 4.0})
        for (std::int64_t n : {2, 9, 50})
            for (double x : {0.2, 1.0, 1.7, 5.0}) {
                const double oracle = log_fisher_density(x, n, 1.0 + snr) - log_fisher_density(x, n, 1.0);
                EXPECT_NEAR(fisher_llr(x, n, snr), oracle, 1e-9 * (1 + std::abs(oracle)));
            }
}

TEST(Detectors, Chi2ZeroCrossing)
{
    for (double snr : {0.1, 1.0, 3.0}) {
        const HypothesisModel m(2.0, snr);
        const std::int64_t n = 10;
        const double e0 = static_cast<double>(n) * m.noise_var() * (1 + snr) * std::log1p(snr) / snr;
        EXPECT_NEAR(chi2_llr(e0, n, m), 0.0, 1e-12);
        EXPECT_LT(chi2_llr(0.99 * e0, n, m), 0.0);
        EXPECT_GT(chi2_llr(1.01 * e0, n, m), 0.0);
    }
}

TEST(Detectors, LlrsIncreaseWithStatistic)
{
    const HypothesisModel m(1.0, 0.5);
    double prev_c = -INFINITY;
    double prev_f = -INFINITY;
    for (double s = 0.25; s < 20.0; s += 0.25) {
        const double c = chi2_llr(s, 5, m);
        const double f = fisher_llr(s, 5, 0.5);
        EXPECT_GT(c, prev_c);
        EXPECT_GT(f, prev_f);
        prev_c = c;
        prev_f = f;
    }
    // Fisher LLR is bounded above by (N/2) log(1 + snr) as x -> inf
    EXPECT_LT(fisher_llr(1e12, 5, 0.5), 2.5 * std::log1p(0.5));
}

TEST(Detectors, DomainErrors)
{
    EXPECT_THROW(HypothesisModel(0.0, 1.0), DomainError);
    EXPECT_THROW(HypothesisModel(1.0, 0.0), DomainError);
    const HypothesisModel m(1.0, 1.0);
    EXPECT_THROW(chi2_llr(-1.0, 2, m), DomainError);
    EXPECT_THROW(chi2_llr(1.0, 0, m), DomainError);
    EXPECT_THROW(fisher_llr(-0.5, 2, 1.0), DomainError);
    const std::vector<double> a = {1.0};
    const std::vector<double> zero = {0.0};
    const std::vector<double> two = {1.0, 1.0};
    EXPECT_THROW(fisher_ratio(a, zero), DegenerateInputError);
    EXPECT_THROW(fisher_ratio(a, two), ArgumentError);
}

TEST(Detectors, EnergyUnderH0FollowsScaledChi2)
{
    // Kolmogorov-Smirnov against the Boost chi-square law
    std::mt19937_64 rng(99);
    const std::int64_t n = 6;
    const double var = 1.7;
    const std::size_t draws = 20000;
    std::vector<double> u(draws);
    boost::math::chi_squared_distribution<double> d(static_cast<double>(n));
    for (double& v : u) {
        const auto x = gaussian(rng, n, var);
        v = boost::math::cdf(d, energy(x) / var);
    }
    std::sort(u.begin(), u.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        ks = std::max(ks, std::abs(u[i] - static_cast<double>(i) / draws));
        ks = std::max(ks, std::abs(u[i] - static_cast<double>(i + 1) / draws));
    }
    // 1% critical value 1.63 / sqrt(n)
    EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(draws)));
}

TEST(Detectors, FixedTestErrorRates)
{
    // Sizes from the frozen sample-size grid at alpha = beta = 0.02, snr = 1
    struct Case {
        Family family;
        std::int64_t n;
    };
    std::mt19937_64 rng(4242);
    const HypothesisModel m(1.3, 1.0);
    const TestStrength s(0.02, 0.02);
    const int trials = 20000;
    const double tol = 3.0 * std::sqrt(0.02 * 0.98 / trials);
    for (const Case c : {Case{Family::chi2, 72}, Case{Family::fisher, 142}}) {
        int false_alarms = 0;
        int misses = 0;
        for (int t = 0; t < trials; ++t)
            for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
                const auto in = gaussian(rng, c.n, m.variance(h));
                double stat = energy(in);
                if (c.family == Family::fisher)
                    stat = fisher_ratio(in, gaussian(rng, c.n, m.noise_var()));
                const FixedDecision d = fixed_test(stat, s, c.n, c.family, m);
                if (h == Hypothesis::H0)
                    false_alarms += d.decision == Decision::accept_h1;
                else
                    misses += d.decision == Decision::accept_h0;
            }
        EXPECT_NEAR(false_alarms / double(trials), 0.02, tol) << to_string(c.family);
        EXPECT_LE(misses / double(trials), 0.02 + tol) << to_string(c.family);
    }
}
