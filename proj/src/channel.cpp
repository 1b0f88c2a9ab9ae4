#include "rris/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rris/error.hpp"

namespace rris {

void ChannelParams::validate() const {
    const bool ok = rho0 > 0 && alpha1 > 0 && alpha2 > 0 && k1 >= 0 && k2 >= 0 && wavelength > 0 &&
                    noise_power > 0 && total_bandwidth > 0 && num_ues > 0 && direct_exponent > 0 &&
                    direct_attenuation > 0;
    if (!ok) throw InvalidArgument("channel parameters must be strictly positive");
}

void RadiationParams::validate() const {
    if (!(z >= 0.0)) throw InvalidArgument("Lambertian order z must be >= 0");
    if (!(dm > 0.0)) throw InvalidArgument("maximum directivity must be > 0");
}

std::vector<double> phase_codebook(int bits) {
    if (bits < 1 || bits > 16) throw InvalidArgument("phase bits must lie in [1,16], got " + std::to_string(bits));
    const int levels = 1 << bits;
    const double step = kTwoPi / levels;
    std::vector<double> out(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) out[static_cast<std::size_t>(i)] = i * step;
    return out;
}

int nearest_codebook_index(double phase, int bits) {
    const int levels = 1 << bits;
    const double step = kTwoPi / levels;
    const long idx = std::lround(wrap_angle(phase) / step);
    return static_cast<int>(idx % levels);
}

void PhaseConfig::validate() const {
    const auto book = phase_codebook(bits);
    for (double p : phases) {
        bool member = false;
        for (double c : book) {
            if (p == c) {
                member = true;
                break;
            }
        }
        if (!member) throw InvalidArgument("phase " + std::to_string(p) + " is not in the codebook");
    }
}

Complex circular_gaussian(Rng& rng) {
    std::normal_distribution<double> g(0.0, std::numbers::sqrt2 / 2.0);
    const double re = g(rng);
    const double im = g(rng);
    return {re, im};
}

FadingSample sample_fading(int num_ues, int num_elements, Rng& rng) {
    FadingSample f;
    f.h_nlos.resize(static_cast<std::size_t>(num_ues));
    for (auto& row : f.h_nlos) {
        row.resize(static_cast<std::size_t>(num_elements));
        for (auto& c : row) c = circular_gaussian(rng);
    }
    f.v_nlos.resize(static_cast<std::size_t>(num_elements));
    for (auto& c : f.v_nlos) c = circular_gaussian(rng);
    f.direct.resize(static_cast<std::size_t>(num_ues));
    for (auto& c : f.direct) c = circular_gaussian(rng);
    return f;
}

Complex los_phasor(double distance, double wavelength) {
    return std::polar(1.0, -kTwoPi * distance / wavelength);
}

Complex rician_coefficient(double path_gain, double k_factor, double los_distance, double wavelength,
                           Complex nlos) {
    const double los_w = std::sqrt(k_factor / (1.0 + k_factor));
    const double nlos_w = std::sqrt(1.0 / (1.0 + k_factor));
    return std::sqrt(path_gain) * (los_w * los_phasor(los_distance, wavelength) + nlos_w * nlos);
}

ChannelDraw compose_channels(const ChannelParams& params, const LinkGeometry& geometry, int num_elements,
                             const FadingSample& fading) {
    const auto K = geometry.ues.size();
    const auto N = static_cast<std::size_t>(num_elements);
    if (fading.h_nlos.size() != K || fading.v_nlos.size() != N || fading.direct.size() != K) {
        throw InvalidArgument("fading sample does not match the geometry");
    }
    const Distances d = distances(geometry.ris, geometry.bs, geometry.ues);

    ChannelDraw out;
    out.v_RB.resize(N);
    const double gain_rb = params.rho0 / std::pow(d.d_RB, params.alpha2);
    const auto bs_el = element_distances(geometry.ris, geometry.bs, num_elements, params.wavelength);
    for (std::size_t n = 0; n < N; ++n) {
        out.v_RB[n] = rician_coefficient(gain_rb, params.k2, bs_el[n], params.wavelength, fading.v_nlos[n]);
    }

    out.h_kR.resize(K);
    out.h_kB.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        const double gain_kr = params.rho0 / std::pow(d.d_kR[k], params.alpha1);
        const auto ue_el = element_distances(geometry.ris, geometry.ues[k], num_elements, params.wavelength);
        auto& row = out.h_kR[k];
        row.resize(N);
        for (std::size_t n = 0; n < N; ++n) {
            row[n] = rician_coefficient(gain_kr, params.k1, ue_el[n], params.wavelength, fading.h_nlos[k][n]);
        }
        const double d_kb = distance(geometry.ues[k], geometry.bs);
        if (d_kb == 0.0) throw DegenerateGeometry("UE coincides with the BS");
        const double gain_kb = params.direct_attenuation * params.rho0 / std::pow(d_kb, params.direct_exponent);
        out.h_kB[k] = std::sqrt(gain_kb) * fading.direct[k];
    }
    return out;
}

ChannelDraw draw_channels(const ChannelParams& params, const LinkGeometry& geometry, int num_elements, Rng& rng) {
    const auto fading = sample_fading(static_cast<int>(geometry.ues.size()), num_elements, rng);
    return compose_channels(params, geometry, num_elements, fading);
}

double pattern_factor(const RadiationParams& rad, double theta_k, double theta_B, int indicator) {
    if (indicator == 0) return 0.0;
    const double sk = std::max(0.0, std::sin(theta_k));
    const double sb = std::max(0.0, std::sin(theta_B));
    return std::pow(sk, rad.z) * std::pow(sb, rad.z);
}

std::vector<Complex> ris_gain(const RadiationParams& rad, const AngleSet& angles, const PhaseConfig& phases,
                              std::size_t k) {
    if (k >= angles.theta_k.size()) throw InvalidArgument("UE index out of range");
    const double amp =
        rad.dm * rad.dm * pattern_factor(rad, angles.theta_k[k], angles.theta_B, angles.indicator_k[k]);
    std::vector<Complex> out;
    out.reserve(phases.phases.size());
    for (double phi : phases.phases) out.push_back(std::polar(amp, phi));
    return out;
}

Complex effective_channel(const ChannelDraw& draw, std::span<const Complex> gain, std::size_t k) {
    if (k >= draw.h_kR.size() || k >= draw.h_kB.size()) throw InvalidArgument("UE index out of range");
    const auto& h = draw.h_kR[k];
    if (gain.size() != h.size() || gain.size() != draw.v_RB.size()) {
        throw InvalidArgument("gain vector length does not match the number of elements");
    }
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < gain.size(); ++n) acc += std::conj(draw.v_RB[n]) * gain[n] * h[n];
    return acc + draw.h_kB[k];
}

double achievable_rate(Complex h_k, double power, const ChannelParams& params) {
    if (power < 0.0) throw InvalidArgument("transmit power must be >= 0");
    const double snr = power * std::norm(h_k) / params.noise_power;
    return params.bandwidth_per_ue() * std::log1p(snr) / std::numbers::ln2;
}

} // namespace rris
