#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "seqdetect/random.hpp"
#include "seqdetect/types.hpp"

namespace seqdetect {

/// Physical and processing constants of the interrupted-OSCAR measurement
/// chain. Angular quantities are in rad/s except `cutoff` (rad/sample).
struct ChainParams {
    double carrier_freq = 2.0 * std::numbers::pi * 1000.0;  // omega_0
    double amplitude = 1.0;                                 // A_c
    double phase = 0.0;                                     // phi
    double freq_shift = 2.0 * std::numbers::pi * 10.0;      // delta omega_0
    double skip_period = 0.02;                              // T_skip
    double relax_rate = 0.5;                                // lambda, flips per second
    double sample_period = 1e-4;                            // T_s
    double noise_var = 1.0;                                 // sigma^2_nu, pre-filter
    double signal_var = 0.0;                                // sigma^2_d, pre-filter
    double cutoff = std::numbers::pi / 40.0;                // omega_c

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    /// Telegraph stay probability p = 1 - T_s * lambda.
    double stay_probability() const noexcept { return 1.0 - sample_period * relax_rate; }

    /// Skip period in samples, rounded to the nearest integer.
    std::size_t skip_samples() const noexcept;
};

struct TelegraphParams {
    double stay_prob = 1.0;
    std::size_t length = 0;

    static TelegraphParams from_chain(const ChainParams& chain, std::size_t length);
};

/// Symmetric two-state Markov chain on {-1, +1}. The first state is
/// equiprobable; each later state repeats the previous one with probability
/// `stay_prob`.
class TelegraphProcess {
public:
    TelegraphProcess(double stay_prob, std::uint64_t seed);

    int next();

private:
    double stay_prob_;
    Engine engine_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    int state_ = 0;
};

std::vector<int> telegraph(const TelegraphParams& params, std::uint64_t seed);

/// Interferometer output sampled every T_s over `duration` seconds:
/// A cos(w0 t + integral_0^t s(u) du + phi), with s the +-delta_w0 square wave
/// of period 2 T_skip multiplied by the telegraph flips (one flip value per
/// sample interval; a single value is held constant). Without a spin the
/// carrier is unmodulated.
std::vector<double> fm_synthesize(const ChainParams& params, bool spin_present, std::span<const int> flips,
                                  double duration);

/// +-1 reference square wave of period 2 * skip_samples (starts at +1).
int reference_square_wave(std::size_t index, std::size_t skip_samples) noexcept;

struct Channels {
    std::vector<double> inphase;
    std::vector<double> quadrature;
};

/// Correlate the demodulated signal with the reference square wave
/// (in-phase) and with the same wave delayed by a quarter period,
/// skip_samples / 2 samples (quadrature). skip_samples must be even.
Channels correlate_channels(std::span<const double> demod, std::size_t skip_samples);

/// alpha = (1 - sin w_c) / cos w_c, evaluated as cos w_c / (1 + sin w_c),
/// which is finite at w_c = pi/2.
double lowpass_coefficient(double cutoff);

/// First-order recursive low-pass
///   x_n = alpha x_{n-1} + (1 - alpha)/2 (z_n + z_{n-1})
/// with zero prior state (x_{-1} = z_{-1} = 0).
class LowpassFilter {
public:
    explicit LowpassFilter(double cutoff);

    double step(double z) noexcept
    {
        const double x = alpha_ * prev_out_ + gain_ * (z + prev_in_);
        prev_in_ = z;
        prev_out_ = x;
        return x;
    }
    void reset() noexcept { prev_in_ = prev_out_ = 0.0; }
    double coefficient() const noexcept { return alpha_; }

private:
    double alpha_;
    double gain_;
    double prev_in_ = 0.0;
    double prev_out_ = 0.0;
};

std::vector<double> lowpass(std::span<const double> z, double cutoff);

/// Frequency response H(e^{jw}) of the low-pass filter.
std::complex<double> lowpass_response(double cutoff, double omega);

/// Decimation factor D = round(2 pi / w_c).
std::size_t decimation_factor(double cutoff);

/// Keep every D-th sample starting at index 0.
std::vector<double> subsample(std::span<const double> x, double cutoff);

/// Number of initial filter outputs discarded as transient: ceil(3 / (1 - alpha)).
std::size_t warmup_length(double cutoff);

/// Pre-filter baseband channels of the lock-in output after correlation:
/// in-phase = sigma_d * telegraph + noise (H1) or noise (H0); quadrature is
/// independent noise. Uses the same random streams as ObservationStream.
Channels synthesize_baseband(const ChainParams& params, Hypothesis hyp, std::size_t n_raw, std::uint64_t seed);

/// Streaming version of generate_observation: each call to next_inphase /
/// next_quadrature runs the raw chain through the filter and returns the next
/// retained (subsampled) output. The two channels advance independently and
/// use disjoint random streams.
class ObservationStream {
public:
    ObservationStream(const ChainParams& params, Hypothesis hyp, std::uint64_t seed);

    double next_inphase();
    double next_quadrature();

private:
    struct Channel {
        LowpassFilter filter;
        Engine noise_engine;
        bool first = true;
    };

    double raw_inphase();
    double raw_quadrature();
    template <class Raw>
    double advance(Channel& channel, Raw&& raw);

    ChainParams params_;
    Hypothesis hyp_;
    double noise_sd_;
    double signal_sd_;
    std::size_t decimation_;
    std::size_t warmup_;
    Channel inphase_;
    Channel quadrature_;
    TelegraphProcess telegraph_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::normal_distribution<double> normal_q_{0.0, 1.0};
};

/// n post-filter, subsampled samples of each channel.
Channels generate_observation(const ChainParams& params, Hypothesis hyp, std::size_t n, std::uint64_t seed);

/// Variance gain of the low-pass on white noise: sum h_k^2 = (1 - alpha)/2.
double post_filter_noise_gain(double cutoff);

/// Variance gain on the unit telegraph signal, whose autocorrelation is
/// (2p - 1)^|l|: (1 - alpha)(1 + rho) / (2 (1 - rho alpha)).
double post_filter_signal_gain(double cutoff, double stay_prob);

/// Noise variance of the retained in-phase samples.
double post_filter_noise_var(const ChainParams& params);

/// Analytic snr of the retained samples, sigma_d^2 g_s / (sigma_nu^2 g_n).
double post_filter_snr(const ChainParams& params);

/// Empirical counterpart: ratio of in-phase to quadrature sample variances
/// under H1, minus one.
double estimate_post_filter_snr(const ChainParams& params, std::size_t n, std::uint64_t seed);

/// Copy of `params` with signal_var chosen so that post_filter_snr == snr.
ChainParams with_post_filter_snr(ChainParams params, double snr);

}  // namespace seqdetect
