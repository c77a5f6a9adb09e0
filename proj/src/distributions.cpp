#include "seqdetect/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqdetect/errors.hpp"
#include "seqdetect/special_functions.hpp"

namespace seqdetect {

namespace {

void check_df_scale(std::int64_t df, double scale)
{
    if (df < 1)
        throw DomainError("degrees of freedom must be >= 1, got " + std::to_string(df));
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw DomainError("scale must be positive and finite");
}

void check_support(double x)
{
    if (std::isnan(x) || x < 0.0)
        throw DomainError("argument must be >= 0");
}

void check_open_probability(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("probability must lie in (0, 1)");
}

double half_df(std::int64_t df)
{
    return 0.5 * static_cast<double>(df);
}

}  // namespace

ScaledChi2::ScaledChi2(std::int64_t df, double scale) : df_(df), scale_(scale)
{
    check_df_scale(df, scale);
}

ScaledFisherF::ScaledFisherF(std::int64_t df, double scale) : df_(df), scale_(scale)
{
    check_df_scale(df, scale);
}

TestStrength::TestStrength(double alpha, double beta) : alpha_(alpha), beta_(beta)
{
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw DomainError("error probabilities must lie in (0, 1)");
    if (!(alpha + beta < 1.0))
        throw DomainError("alpha + beta must be < 1");
}

// ---- scaled chi-square ------------------------------------------------------

double pdf(const ScaledChi2& dist, double x)
{
    check_support(x);
    const double two_s = 2.0 * dist.scale();
    return special::gamma_p_derivative(half_df(dist.df()), x / two_s) / two_s;
}

double cdf(const ScaledChi2& dist, double x)
{
    check_support(x);
    return special::gamma_p(half_df(dist.df()), x / (2.0 * dist.scale()));
}

double ccdf(const ScaledChi2& dist, double x)
{
    check_support(x);
    return special::gamma_q(half_df(dist.df()), x / (2.0 * dist.scale()));
}

double quantile(const ScaledChi2& dist, double p)
{
    check_open_probability(p);
    return 2.0 * dist.scale() * special::gamma_p_inv(half_df(dist.df()), p);
}

double upper_quantile(const ScaledChi2& dist, double q)
{
    check_open_probability(q);
    return 2.0 * dist.scale() * special::gamma_q_inv(half_df(dist.df()), q);
}

// ---- scaled Fisher-F with equal degrees of freedom ----------------------------
//
// With u = x / scale and t = u / (1 + u), F(N, N) maps onto Beta(N/2, N/2), so
// the CDF is I_t(N/2, N/2) and the survival function is I_{1-t}(N/2, N/2).

double pdf(const ScaledFisherF& dist, double x)
{
    check_support(x);
    const double s = dist.scale();
    const double t = x / (s + x);
    const double one_minus_t = s / (s + x);
    const double a = half_df(dist.df());
    return special::ibeta_derivative(a, a, t) * one_minus_t * one_minus_t / s;
}

double cdf(const ScaledFisherF& dist, double x)
{
    check_support(x);
    if (std::isinf(x))
        return 1.0;
    const double a = half_df(dist.df());
    return special::ibeta(a, a, x / (dist.scale() + x));
}

double ccdf(const ScaledFisherF& dist, double x)
{
    check_support(x);
    if (std::isinf(x))
        return 0.0;
    const double a = half_df(dist.df());
    return special::ibeta(a, a, dist.scale() / (dist.scale() + x));
}

double quantile(const ScaledFisherF& dist, double p)
{
    check_open_probability(p);
    const double a = half_df(dist.df());
    if (p > 0.5) {
        // 1 - t by symmetry, to keep the upper tail free of cancellation
        const double u = special::ibetac_inv(a, a, p);
        return dist.scale() * (1.0 - u) / u;
    }
    const double t = special::ibeta_inv(a, a, p);
    return dist.scale() * t / (1.0 - t);
}

double upper_quantile(const ScaledFisherF& dist, double q)
{
    check_open_probability(q);
    const double a = half_df(dist.df());
    // ccdf(x) = I_s(a, a) with s = scale / (scale + x)
    if (q > 0.5) {
        // 1 - s = x / (scale + x) by symmetry
        const double t = special::ibetac_inv(a, a, q);
        return dist.scale() * t / (1.0 - t);
    }
    const double s = special::ibeta_inv(a, a, q);
    return dist.scale() * (1.0 - s) / s;
}

// ---- fixed sample size ---------------------------------------------------------

double fixed_threshold(Family family, std::int64_t n, double alpha)
{
    if (family == Family::chi2)
        return upper_quantile(ScaledChi2(n, 1.0), alpha);
    return upper_quantile(ScaledFisherF(n, 1.0), alpha);
}

double miss_probability(Family family, std::int64_t n, double alpha, double snr)
{
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be positive and finite");
    const double threshold = fixed_threshold(family, n, alpha);
    // F1(t) = F0(t / (1 + snr)): only the unit-scale H0 law is evaluated.
    const double reduced = threshold / (1.0 + snr);
    if (family == Family::chi2)
        return cdf(ScaledChi2(n, 1.0), reduced);
    return cdf(ScaledFisherF(n, 1.0), reduced);
}

std::int64_t required_sample_size(const TestStrength& strength, double snr, Family family, std::int64_t cap)
{
    if (cap < 1)
        throw DomainError("sample size cap must be >= 1");
    const auto meets = [&](std::int64_t n) { return miss_probability(family, n, strength.alpha(), snr) <= strength.beta(); };

    const auto infeasible_error = [&] {
        return InfeasibleError("required sample size exceeds the cap of " + std::to_string(cap)
                                   + " at snr=" + std::to_string(snr),
                               cap);
    };
    if (meets(1))
        return 1;
    if (cap == 1)
        throw infeasible_error();

    // Exponential search for a feasible upper bracket, then bisection. The
    // miss probability is nonincreasing in N.
    std::int64_t infeasible = 1;
    std::int64_t feasible = 2;
    while (!meets(feasible)) {
        if (feasible >= cap)
            throw infeasible_error();
        infeasible = feasible;
        feasible = std::min(feasible * 2, cap);
    }
    while (feasible - infeasible > 1) {
        const std::int64_t mid = infeasible + (feasible - infeasible) / 2;
        if (meets(mid))
            feasible = mid;
        else
            infeasible = mid;
    }
    return feasible;
}

}  // namespace seqdetect
