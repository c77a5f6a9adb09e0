#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "seqdetect/detectors.hpp"
#include "seqdetect/distributions.hpp"
#include "seqdetect/errors.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

/// SPRT thresholds, stored in log form: accept H1 when the LLR reaches
/// log_upper (log A > 0), accept H0 when it falls to log_lower (log B < 0).
class Boundaries {
public:
    Boundaries(double log_upper, double log_lower);

    double log_upper() const noexcept { return log_upper_; }
    double log_lower() const noexcept { return log_lower_; }
    double upper() const;
    double lower() const;

private:
    double log_upper_;
    double log_lower_;
};

/// Wald's approximate boundaries A = (1 - beta)/alpha, B = beta/(1 - alpha).
/// Emits a warning when alpha or beta is >= 0.05, where the approximation
/// is known to degrade.
Boundaries wald_boundaries(const TestStrength& strength);

struct SprtOutcome {
    Decision decision;
    std::int64_t n_stop;
    double final_llr;
};

/// Incremental SPRT state: a scalar LLR accumulator and a sample counter.
/// Crossings are inclusive on both boundaries.
class SprtAccumulator {
public:
    explicit SprtAccumulator(const Boundaries& bounds) : bounds_(bounds) {}

    /// Add one increment; returns the decision if a boundary was reached.
    std::optional<Decision> push(double increment) noexcept
    {
        llr_ += increment;
        ++n_;
        if (llr_ >= bounds_.log_upper())
            return Decision::accept_h1;
        if (llr_ <= bounds_.log_lower())
            return Decision::accept_h0;
        return std::nullopt;
    }

    double llr() const noexcept { return llr_; }
    std::int64_t count() const noexcept { return n_; }

private:
    Boundaries bounds_;
    double llr_ = 0.0;
    std::int64_t n_ = 0;
};

/// Run an SPRT over a stream of LLR increments. `next` returns the next
/// increment, or std::nullopt once the stream is exhausted. With n_max set
/// the run is truncated after n_max increments.
template <class Source>
    requires std::invocable<Source&>
SprtOutcome sprt_run(Source&& next, const Boundaries& bounds, std::optional<std::int64_t> n_max = std::nullopt)
{
    if (n_max && *n_max < 1)
        throw DomainError("n_max must be >= 1");
    SprtAccumulator acc(bounds);
    while (!n_max || acc.count() < *n_max) {
        const std::optional<double> increment = next();
        if (!increment) {
            if (acc.count() == 0)
                throw StreamExhaustedError("increment stream yielded no values");
            if (!n_max)
                throw StreamExhaustedError("increment stream exhausted before a decision");
            break;
        }
        if (const auto decision = acc.push(*increment))
            return {*decision, acc.count(), acc.llr()};
    }
    return {Decision::truncated, acc.count(), acc.llr()};
}

/// Convenience overload over a finite increment sequence.
SprtOutcome sprt_run(std::span<const double> increments, const Boundaries& bounds,
                     std::optional<std::int64_t> n_max = std::nullopt);

/// Solve the OC equation  integral (f1/f0)^h f_theta dx = 1  for the
/// zero-mean Gaussian variance family, where theta is the true variance and
/// f0, f1 have variances model.noise_var() and model.h1_var(). The integrand
/// is closed form, (v0/v1)^(h/2) (1 - h theta (1/v0 - 1/v1))^(-1/2), and the
/// nontrivial root is bracketed and refined. Returns 0 at the indifference
/// variance where the LLR has zero mean.
double h_solve(double theta, const HypothesisModel& model);

/// Wald's operating characteristic L = (A^h - 1)/(A^h - B^h), with the
/// limit log A / (log A - log B) at h = 0.
double oc_value(double h, const Boundaries& bounds);

struct OcPoint {
    double theta;
    double h;
    double oc;
};

/// h_solve followed by oc_value.
OcPoint oc_point(double theta, const HypothesisModel& model, const Boundaries& bounds);

/// L log B + (1 - L) log A: the expected terminal LLR under Wald's
/// no-overshoot approximation.
double wald_numerator(double oc, const Boundaries& bounds);

struct WaldAsn {
    double value;
    bool degenerate;  // zero numerator: the approximation carries no information
};

/// Wald's ASN approximation E{N | theta} = wald_numerator / E{Lambda | theta}.
/// Throws SingularAsnError when the expected increment is zero.
WaldAsn asn_approx(double oc, const Boundaries& bounds, double expected_increment);

/// Relative sample efficiency n_fixed / asn.
double rse(double n_fixed, double asn);

}  // namespace seqdetect
