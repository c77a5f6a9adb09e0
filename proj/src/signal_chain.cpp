#include "seqdetect/signal_chain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seqdetect/errors.hpp"

namespace seqdetect {

namespace {

constexpr double kPi = std::numbers::pi;

// Random stream identifiers inside one observation seed.
constexpr std::uint64_t kTelegraphStream = 0;
constexpr std::uint64_t kInphaseStream = 1;
constexpr std::uint64_t kQuadratureStream = 2;

void check_cutoff(double cutoff)
{
    if (!(cutoff > 0.0 && cutoff < kPi))
        throw DomainError("cutoff must lie in (0, pi) rad/sample");
}

// integral_0^t of the unit square wave of period 2T (+1 first): a triangle wave.
double square_wave_integral(double t, double half_period)
{
    const double r = std::fmod(t, 2.0 * half_period);
    return r < half_period ? r : 2.0 * half_period - r;
}

}  // namespace

void ChainParams::validate() const
{
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(carrier_freq))
        throw DomainError("carrier_freq must be positive");
    if (!(freq_shift >= 0.0) || !std::isfinite(freq_shift))
        throw DomainError("freq_shift must be >= 0");
    if (!positive(skip_period))
        throw DomainError("skip_period must be positive");
    if (!(relax_rate >= 0.0) || !std::isfinite(relax_rate))
        throw DomainError("relax_rate must be >= 0");
    if (!positive(sample_period))
        throw DomainError("sample_period must be positive");
    const double flip = sample_period * relax_rate;
    if (!(flip >= 0.0 && flip <= 1.0))
        throw DomainError("relax_rate * sample_period must lie in [0, 1]");
    if (!positive(noise_var))
        throw DomainError("noise_var must be positive");
    if (!(signal_var >= 0.0) || !std::isfinite(signal_var))
        throw DomainError("signal_var must be >= 0");
    if (!std::isfinite(amplitude) || !std::isfinite(phase))
        throw DomainError("amplitude and phase must be finite");
    check_cutoff(cutoff);
}

std::size_t ChainParams::skip_samples() const noexcept
{
    return static_cast<std::size_t>(std::llround(skip_period / sample_period));
}

TelegraphParams TelegraphParams::from_chain(const ChainParams& chain, std::size_t length)
{
    chain.validate();
    return {chain.stay_probability(), length};
}

// ---- telegraph ---------------------------------------------------------------

TelegraphProcess::TelegraphProcess(double stay_prob, std::uint64_t seed) : stay_prob_(stay_prob), engine_(seed)
{
    if (!(stay_prob >= 0.0 && stay_prob <= 1.0))
        throw DomainError("telegraph stay probability must lie in [0, 1]");
}

int TelegraphProcess::next()
{
    if (state_ == 0) {
        state_ = uniform_(engine_) < 0.5 ? 1 : -1;
        return state_;
    }
    if (!(uniform_(engine_) < stay_prob_))
        state_ = -state_;
    return state_;
}

std::vector<int> telegraph(const TelegraphParams& params, std::uint64_t seed)
{
    TelegraphProcess process(params.stay_prob, seed);
    std::vector<int> out(params.length);
    for (auto& s : out)
        s = process.next();
    return out;
}

// ---- interferometer output ---------------------------------------------------------

std::vector<double> fm_synthesize(const ChainParams& params, bool spin_present, std::span<const int> flips,
                                  double duration)
{
    params.validate();
    if (!(duration > 0.0))
        throw ArgumentError("duration must be positive");
    if (spin_present && flips.empty())
        throw ArgumentError("a spin-modulated signal needs a non-empty flip sequence");

    const double ts = params.sample_period;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(duration / ts + 1e-9)));
    if (spin_present && flips.size() != 1 && flips.size() < n)
        throw ArgumentError("flip sequence shorter than the " + std::to_string(n) + " samples requested");

    std::vector<double> out(n);
    double modulation_phase = 0.0;  // integral_0^t s(u) du
    double tri_prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * ts;
        out[k] = params.amplitude * std::cos(params.carrier_freq * t + modulation_phase + params.phase);
        if (spin_present) {
            const double tri_next = square_wave_integral(t + ts, params.skip_period);
            const int flip = flips.size() == 1 ? flips[0] : flips[k];
            modulation_phase += flip * params.freq_shift * (tri_next - tri_prev);
            tri_prev = tri_next;
        }
    }
    return out;
}

// ---- correlator -----------------------------------------------------------------

int reference_square_wave(std::size_t index, std::size_t skip_samples) noexcept
{
    return (index % (2 * skip_samples)) < skip_samples ? 1 : -1;
}

Channels correlate_channels(std::span<const double> demod, std::size_t skip_samples)
{
    if (skip_samples < 2 || skip_samples % 2 != 0)
        throw ArgumentError("skip period in samples must be even and >= 2");
    if (demod.size() < 2 * skip_samples)
        throw ArgumentError("input shorter than one reference period");

    const std::size_t period = 2 * skip_samples;
    const std::size_t delay = skip_samples / 2;
    Channels out;
    out.inphase.resize(demod.size());
    out.quadrature.resize(demod.size());
    for (std::size_t n = 0; n < demod.size(); ++n) {
        out.inphase[n] = demod[n] * reference_square_wave(n, skip_samples);
        // delayed reference, extended periodically before index 0
        out.quadrature[n] = demod[n] * reference_square_wave(n + period - delay, skip_samples);
    }
    return out;
}

// ---- filtering and decimation ----------------------------------------------------

double lowpass_coefficient(double cutoff)
{
    check_cutoff(cutoff);
    return std::cos(cutoff) / (1.0 + std::sin(cutoff));
}

LowpassFilter::LowpassFilter(double cutoff) : alpha_(lowpass_coefficient(cutoff)), gain_(0.5 * (1.0 - alpha_)) {}

std::vector<double> lowpass(std::span<const double> z, double cutoff)
{
    LowpassFilter filter(cutoff);
    std::vector<double> out(z.size());
    for (std::size_t n = 0; n < z.size(); ++n)
        out[n] = filter.step(z[n]);
    return out;
}

std::complex<double> lowpass_response(double cutoff, double omega)
{
    const double alpha = lowpass_coefficient(cutoff);
    const std::complex<double> zinv = std::polar(1.0, -omega);
    return 0.5 * (1.0 - alpha) * (1.0 + zinv) / (1.0 - alpha * zinv);
}

std::size_t decimation_factor(double cutoff)
{
    check_cutoff(cutoff);
    return static_cast<std::size_t>(std::llround(2.0 * kPi / cutoff));
}

std::vector<double> subsample(std::span<const double> x, double cutoff)
{
    const std::size_t d = decimation_factor(cutoff);
    std::vector<double> out;
    out.reserve(x.size() / d + 1);
    for (std::size_t n = 0; n < x.size(); n += d)
        out.push_back(x[n]);
    return out;
}

std::size_t warmup_length(double cutoff)
{
    const double alpha = lowpass_coefficient(cutoff);
    return static_cast<std::size_t>(std::ceil(3.0 / (1.0 - alpha)));
}

// ---- baseband observation model ---------------------------------------------------

Channels synthesize_baseband(const ChainParams& params, Hypothesis hyp, std::size_t n_raw, std::uint64_t seed)
{
    params.validate();
    TelegraphProcess flips(params.stay_probability(), derive_seed(seed, kTelegraphStream, 0));
    Engine inphase_engine(derive_seed(seed, kInphaseStream, 0));
    Engine quadrature_engine(derive_seed(seed, kQuadratureStream, 0));
    std::normal_distribution<double> normal_i(0.0, 1.0);
    std::normal_distribution<double> normal_q(0.0, 1.0);
    const double noise_sd = std::sqrt(params.noise_var);
    const double signal_sd = std::sqrt(params.signal_var);

    Channels out;
    out.inphase.resize(n_raw);
    out.quadrature.resize(n_raw);
    for (std::size_t n = 0; n < n_raw; ++n) {
        double z = noise_sd * normal_i(inphase_engine);
        if (hyp == Hypothesis::H1)
            z += signal_sd * flips.next();
        out.inphase[n] = z;
    }
    for (std::size_t n = 0; n < n_raw; ++n)
        out.quadrature[n] = noise_sd * normal_q(quadrature_engine);
    return out;
}

ObservationStream::ObservationStream(const ChainParams& params, Hypothesis hyp, std::uint64_t seed)
    : params_(params)
    , hyp_(hyp)
    , noise_sd_(std::sqrt(params.noise_var))
    , signal_sd_(std::sqrt(params.signal_var))
    , decimation_(decimation_factor(params.cutoff))
    , warmup_(warmup_length(params.cutoff))
    , inphase_{LowpassFilter(params.cutoff), Engine(derive_seed(seed, kInphaseStream, 0))}
    , quadrature_{LowpassFilter(params.cutoff), Engine(derive_seed(seed, kQuadratureStream, 0))}
    , telegraph_(params.stay_probability(), derive_seed(seed, kTelegraphStream, 0))
{
    params.validate();
}

double ObservationStream::raw_inphase()
{
    double z = noise_sd_ * normal_(inphase_.noise_engine);
    if (hyp_ == Hypothesis::H1)
        z += signal_sd_ * telegraph_.next();
    return z;
}

double ObservationStream::raw_quadrature()
{
    return noise_sd_ * normal_q_(quadrature_.noise_engine);
}

template <class Raw>
double ObservationStream::advance(Channel& channel, Raw&& raw)
{
    const std::size_t skip = channel.first ? warmup_ : decimation_ - 1;
    channel.first = false;
    for (std::size_t i = 0; i < skip; ++i)
        channel.filter.step(raw());
    return channel.filter.step(raw());
}

double ObservationStream::next_inphase()
{
    return advance(inphase_, [this] { return raw_inphase(); });
}

double ObservationStream::next_quadrature()
{
    return advance(quadrature_, [this] { return raw_quadrature(); });
}

Channels generate_observation(const ChainParams& params, Hypothesis hyp, std::size_t n, std::uint64_t seed)
{
    if (n < 1)
        throw ArgumentError("observation length must be >= 1");
    ObservationStream stream(params, hyp, seed);
    Channels out;
    out.inphase.resize(n);
    out.quadrature.resize(n);
    for (auto& x : out.inphase)
        x = stream.next_inphase();
    for (auto& x : out.quadrature)
        x = stream.next_quadrature();
    return out;
}

// ---- post-filter calibration --------------------------------------------------------

double post_filter_noise_gain(double cutoff)
{
    return 0.5 * (1.0 - lowpass_coefficient(cutoff));
}

double post_filter_signal_gain(double cutoff, double stay_prob)
{
    if (!(stay_prob >= 0.0 && stay_prob <= 1.0))
        throw DomainError("telegraph stay probability must lie in [0, 1]");
    const double alpha = lowpass_coefficient(cutoff);
    const double rho = 2.0 * stay_prob - 1.0;
    return (1.0 - alpha) * (1.0 + rho) / (2.0 * (1.0 - rho * alpha));
}

double post_filter_noise_var(const ChainParams& params)
{
    params.validate();
    return params.noise_var * post_filter_noise_gain(params.cutoff);
}

double post_filter_snr(const ChainParams& params)
{
    params.validate();
    return params.signal_var * post_filter_signal_gain(params.cutoff, params.stay_probability())
           / (params.noise_var * post_filter_noise_gain(params.cutoff));
}

double estimate_post_filter_snr(const ChainParams& params, std::size_t n, std::uint64_t seed)
{
    const Channels obs = generate_observation(params, Hypothesis::H1, n, seed);
    const auto mean_square = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v)
            s += x * x;
        return s / static_cast<double>(v.size());
    };
    return mean_square(obs.inphase) / mean_square(obs.quadrature) - 1.0;
}

ChainParams with_post_filter_snr(ChainParams params, double snr)
{
    params.validate();
    if (!(snr >= 0.0) || !std::isfinite(snr))
        throw DomainError("snr must be >= 0");
    params.signal_var = snr * params.noise_var * post_filter_noise_gain(params.cutoff)
                        / post_filter_signal_gain(params.cutoff, params.stay_probability());
    return params;
}

}  // namespace seqdetect
