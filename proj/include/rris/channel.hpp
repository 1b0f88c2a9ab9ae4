#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rris/scenario.hpp"

namespace rris {

using Complex = std::complex<double>;

struct ChannelParams {
    double rho0 = 7.25e-7;       // path gain at 1 m, linear; (lambda/4pi)^2 at 28 GHz
    double alpha1 = 2.0;         // UE -> RIS exponent
    double alpha2 = 2.0;         // RIS -> BS exponent
    double k1 = 10.0;            // Rician factor UE -> RIS, linear
    double k2 = 10.0;            // Rician factor RIS -> BS, linear
    double wavelength = 0.0107;  // m
    double noise_power = 1e-14;  // W
    double total_bandwidth = 12e6;  // Hz
    int num_ues = 12;
    double direct_exponent = 3.5;
    double direct_attenuation = 0.01;  // linear blockage loss on UE -> BS

    double bandwidth_per_ue() const { return total_bandwidth / num_ues; }
    void validate() const;
};

struct RadiationParams {
    double z = 2.0;
    double dm = 6.0;

    void validate() const;
};

struct PhaseConfig {
    int bits = 2;
    std::vector<double> phases;

    /// Throws InvalidArgument unless every phase is a codebook member.
    void validate() const;
};

/// Per-slot channels. h_kR[k][n]: UE k -> element n; v_RB[n]: element n -> BS.
struct ChannelDraw {
    std::vector<std::vector<Complex>> h_kR;
    std::vector<Complex> v_RB;
    std::vector<Complex> h_kB;
};

/// Unit-variance scattered components of one slot, kept apart from geometry so
/// that two candidate orientations can be scored on the same fading realisation.
struct FadingSample {
    std::vector<std::vector<Complex>> h_nlos;
    std::vector<Complex> v_nlos;
    std::vector<Complex> direct;
};

struct LinkGeometry {
    RisPose ris;
    Position bs;
    std::vector<Position> ues;
};

std::vector<double> phase_codebook(int bits);

/// Index of the codebook phase closest to `phase` (taken modulo 2*pi, circularly).
int nearest_codebook_index(double phase, int bits);

Complex circular_gaussian(Rng& rng);

FadingSample sample_fading(int num_ues, int num_elements, Rng& rng);

/// One Rician coefficient: sqrt(path_gain) * (sqrt(K/(1+K)) * exp(-j 2pi d/lambda) + sqrt(1/(1+K)) * nlos).
Complex rician_coefficient(double path_gain, double k_factor, double los_distance, double wavelength,
                           Complex nlos);

Complex los_phasor(double distance, double wavelength);

ChannelDraw compose_channels(const ChannelParams& params, const LinkGeometry& geometry, int num_elements,
                             const FadingSample& fading);

ChannelDraw draw_channels(const ChannelParams& params, const LinkGeometry& geometry, int num_elements, Rng& rng);

/// sin^z(theta_k) sin^z(theta_B), zero outside the half-space.
double pattern_factor(const RadiationParams& rad, double theta_k, double theta_B, int indicator);

std::vector<Complex> ris_gain(const RadiationParams& rad, const AngleSet& angles, const PhaseConfig& phases,
                              std::size_t k);

Complex effective_channel(const ChannelDraw& draw, std::span<const Complex> gain, std::size_t k);

/// Shannon rate on the per-UE OFDMA share, bits/s.
double achievable_rate(Complex h_k, double power, const ChannelParams& params);

} // namespace rris
