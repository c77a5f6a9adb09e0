#pragma once

#include <cstdint>
#include <span>

#include "seqdetect/distributions.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

/// Simple-vs-simple variance model: H0 scale noise_var, H1 scale
/// noise_var * (1 + snr).
class HypothesisModel {
public:
    HypothesisModel(double noise_var, double snr);

    double noise_var() const noexcept { return noise_var_; }
    double snr() const noexcept { return snr_; }
    double h1_var() const noexcept { return noise_var_ * (1.0 + snr_); }
    double variance(Hypothesis h) const noexcept { return h == Hypothesis::H0 ? noise_var_ : h1_var(); }

private:
    double noise_var_;
    double snr_;
};

struct FixedDecision {
    Decision decision;
    double statistic;
    double threshold;
    std::int64_t n;
};

/// Sum of squares.
double energy(std::span<const double> x);

/// Log-likelihood ratio of an N-sample energy:
///   snr/(1+snr) * E/(2 sigma_nu^2) - (N/2) log(1+snr).
double chi2_llr(double energy, std::int64_t n, const HypothesisModel& model);

/// Per-sample increment chi2_llr(x^2, 1, model), the SPRT step of the energy test.
double chi2_llr_increment(double x, const HypothesisModel& model);

/// Ratio of in-phase to quadrature energies.
double fisher_ratio(std::span<const double> inphase, std::span<const double> quadrature);

/// Log-likelihood ratio of an energy ratio x with N degrees of freedom per channel:
///   (N/2) log(1+snr) + N log(1+x) - N log(1+snr+x).
/// Needs no noise variance.
double fisher_llr(double x, std::int64_t n, double snr);

/// One-sided upper-tail test of an N-sample statistic at false-alarm alpha.
/// For chi2 the statistic is an energy in the model's units; for fisher it
/// is an energy ratio.
FixedDecision fixed_test(double statistic, const TestStrength& strength, std::int64_t n, Family family,
                         const HypothesisModel& model);

}  // namespace seqdetect
