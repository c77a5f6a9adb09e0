#include "seqdetect/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "root_finding.hpp"
#include "seqdetect/errors.hpp"

namespace seqdetect::special {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

long iteration_budget(double scale)
{
    return 1000 + static_cast<long>(100.0 * std::sqrt(scale));
}

// x^a e^-x / Gamma(a)
double gamma_prefix(double a, double x)
{
    if (x <= 0.0)
        return 0.0;
    if (a < 10.0)
        return std::exp(a * std::log(x) - x - std::lgamma(a));
    return std::sqrt(a / (2.0 * std::numbers::pi))
           * std::exp(a * log1pmx((x - a) / a) - stirling_remainder(a));
}

// P(a, x) by the power series; valid (fast) for x < a + 1.
double gamma_p_series(double a, double x)
{
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    const long budget = iteration_budget(a);
    for (long n = 0; n < budget; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            return sum * gamma_prefix(a, x);
    }
    throw ConvergenceError("gamma_p series failed to converge for a=" + std::to_string(a));
}

// Q(a, x) by Legendre's continued fraction (modified Lentz); x >= a + 1.
double gamma_q_fraction(double a, double x)
{
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    const long budget = iteration_budget(a);
    for (long i = 1; i < budget; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return gamma_prefix(a, x) * h;
    }
    throw ConvergenceError("gamma_q continued fraction failed to converge for a=" + std::to_string(a));
}

void check_gamma_args(double a, double x)
{
    if (!(a > 0.0) || std::isnan(x) || x < 0.0)
        throw DomainError("incomplete gamma requires a > 0 and x >= 0");
}

// x^a (1-x)^b / B(a, b)
double beta_prefix(double a, double b, double x)
{
    if (x <= 0.0 || x >= 1.0)
        return 0.0;
    if (std::min(a, b) < 10.0) {
        const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
        return std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    }
    const double total = a + b;
    const double mode = a / total;
    const double t1 = (x - mode) / mode;
    const double t2 = (mode - x) / (1.0 - mode);
    const double expo = a * log1pmx(t1) + b * log1pmx(t2) + stirling_remainder(total)
                        - stirling_remainder(a) - stirling_remainder(b);
    return std::sqrt(a * b / (2.0 * std::numbers::pi * total)) * std::exp(expo);
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_fraction(double a, double b, double x)
{
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    const long budget = iteration_budget(a + b);
    for (long m = 1; m < budget; ++m) {
        const double dm = static_cast<double>(m);
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h;
    }
    throw ConvergenceError("incomplete beta continued fraction failed to converge");
}

void check_beta_args(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0) || std::isnan(x) || x < 0.0 || x > 1.0)
        throw DomainError("incomplete beta requires a, b > 0 and 0 <= x <= 1");
}

struct BetaPair {
    double lower;
    double upper;
};

BetaPair ibeta_pair(double a, double b, double x)
{
    check_beta_args(a, b, x);
    if (x == 0.0)
        return {0.0, 1.0};
    if (x == 1.0)
        return {1.0, 0.0};
    const double prefix = beta_prefix(a, b, x);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        const double lower = prefix * beta_fraction(a, b, x) / a;
        return {lower, 1.0 - lower};
    }
    const double upper = prefix * beta_fraction(b, a, 1.0 - x) / b;
    return {1.0 - upper, upper};
}

void check_probability(double p, const char* name)
{
    if (std::isnan(p) || p < 0.0 || p > 1.0)
        throw DomainError(std::string(name) + ": probability must lie in [0, 1]");
}

// Wilson-Hilferty starting point for the gamma quantile.
double gamma_quantile_guess(double a, double p)
{
    const double z = normal_quantile(std::clamp(p, 1e-300, 1.0 - 1e-16));
    const double s = 1.0 / (9.0 * a);
    const double cube = 1.0 - s + z * std::sqrt(s);
    if (cube > 0.0 && a > 0.5)
        return a * cube * cube * cube;
    // small-x asymptote P(a, x) ~ x^a / Gamma(a + 1)
    return std::exp((std::log(std::max(p, 1e-300)) + std::lgamma(a + 1.0)) / a);
}

// Find x where P(a, x) crosses the target, with g increasing in x.
template <class G>
double gamma_invert(double a, double guess, G&& g)
{
    double hi = std::max(2.0 * guess, a + 10.0 * std::sqrt(a) + 10.0);
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw ConvergenceError("gamma quantile bracket diverged");
    }
    return detail::newton_bracketed(g, [a](double x) { return gamma_p_derivative(a, x); }, 0.0, hi,
                                    guess);
}

double beta_quantile_guess(double a, double b, double p)
{
    const double total = a + b;
    const double mean = a / total;
    const double sd = std::sqrt(a * b / (total * total * (total + 1.0)));
    const double z = normal_quantile(std::clamp(p, 1e-300, 1.0 - 1e-16));
    return std::clamp(mean + z * sd, 1e-12, 1.0 - 1e-12);
}

}  // namespace

double log1pmx(double x)
{
    if (!(x >= -1.0))
        throw DomainError("log1pmx requires x >= -1");
    if (x == -1.0)
        return -kInf;
    if (std::abs(x) > 0.25)
        return std::log1p(x) - x;
    double power = x;
    double sum = 0.0;
    for (int k = 2; k < 200; ++k) {
        power *= -x;
        const double term = power / k;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum))
            break;
    }
    return sum;
}

double stirling_remainder(double a)
{
    if (a < 10.0)
        return std::lgamma(a) - ((a - 0.5) * std::log(a) - a + kLogSqrt2Pi);
    const double inv = 1.0 / a;
    const double inv2 = inv * inv;
    // Bernoulli-number series B_2k / (2k (2k-1) a^(2k-1))
    return inv
           * (1.0 / 12.0
              + inv2
                    * (-1.0 / 360.0
                       + inv2
                             * (1.0 / 1260.0
                                + inv2
                                      * (-1.0 / 1680.0
                                         + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 / 156.0))))));
}

double gamma_p(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return gamma_p_series(a, x);
    return 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double gamma_p_derivative(double a, double x)
{
    check_gamma_args(a, x);
    if (x == 0.0) {
        if (a < 1.0)
            return kInf;
        return a == 1.0 ? 1.0 : 0.0;
    }
    return gamma_prefix(a, x) / x;
}

double gamma_p_inv(double a, double p)
{
    check_gamma_args(a, 0.0);
    check_probability(p, "gamma_p_inv");
    if (p == 0.0)
        return 0.0;
    if (p == 1.0)
        return kInf;
    if (p > 0.5)
        return gamma_q_inv(a, 1.0 - p);
    return gamma_invert(a, gamma_quantile_guess(a, p), [a, p](double x) { return gamma_p(a, x) - p; });
}

double gamma_q_inv(double a, double q)
{
    check_gamma_args(a, 0.0);
    check_probability(q, "gamma_q_inv");
    if (q == 1.0)
        return 0.0;
    if (q == 0.0)
        return kInf;
    if (q > 0.5)
        return gamma_p_inv(a, 1.0 - q);
    return gamma_invert(a, gamma_quantile_guess(a, 1.0 - q),
                        [a, q](double x) { return q - gamma_q(a, x); });
}

double ibeta(double a, double b, double x)
{
    return ibeta_pair(a, b, x).lower;
}

double ibetac(double a, double b, double x)
{
    return ibeta_pair(a, b, x).upper;
}

double ibeta_derivative(double a, double b, double x)
{
    check_beta_args(a, b, x);
    if (x == 0.0) {
        if (a < 1.0)
            return kInf;
        return a == 1.0 ? std::exp(-std::lgamma(b) + std::lgamma(1.0 + b)) : 0.0;
    }
    if (x == 1.0) {
        if (b < 1.0)
            return kInf;
        return b == 1.0 ? std::exp(-std::lgamma(a) + std::lgamma(1.0 + a)) : 0.0;
    }
    return beta_prefix(a, b, x) / (x * (1.0 - x));
}

double ibeta_inv(double a, double b, double p)
{
    check_beta_args(a, b, 0.5);
    check_probability(p, "ibeta_inv");
    if (p == 0.0)
        return 0.0;
    if (p == 1.0)
        return 1.0;
    if (p > 0.5)
        return ibetac_inv(a, b, 1.0 - p);
    return detail::newton_bracketed([a, b, p](double x) { return ibeta(a, b, x) - p; },
                                    [a, b](double x) { return ibeta_derivative(a, b, x); }, 0.0, 1.0,
                                    beta_quantile_guess(a, b, p));
}

double ibetac_inv(double a, double b, double q)
{
    check_beta_args(a, b, 0.5);
    check_probability(q, "ibetac_inv");
    if (q == 1.0)
        return 0.0;
    if (q == 0.0)
        return 1.0;
    if (q > 0.5)
        return ibeta_inv(a, b, 1.0 - q);
    return detail::newton_bracketed([a, b, q](double x) { return q - ibetac(a, b, x); },
                                    [a, b](double x) { return ibeta_derivative(a, b, x); }, 0.0, 1.0,
                                    beta_quantile_guess(a, b, 1.0 - q));
}

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    check_probability(p, "normal_quantile");
    if (p == 0.0)
        return -kInf;
    if (p == 1.0)
        return kInf;
    if (p > 0.5)
        return -normal_quantile(1.0 - p);  // 1 - p is exact here

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // One Halley step against erfc brings the ~1e-9 rational fit to full precision.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace seqdetect::special
