#pragma once

#include <cmath>
#include <vector>

#include "otfsisac/grid.hpp"

// Geometric scene and delay-Doppler channel synthesis.
//
// Conventions used throughout the library:
//  - the base station sits at the origin with its arrays' boresight on +y;
//    angles are theta = atan2(p_x, p_y);
//  - radial velocity is positive for closing targets, v_rad = -(p . v)/|p|,
//    so closing targets have positive Doppler;
//  - continuous delay/Doppler values are quantized with halves rounded away
//    from zero and wrapped onto the grid.
namespace otfsisac {

struct Target {
    Vec2 position = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();
    double rcs = 1.0;
    bool is_ue = true;

    double range() const { return position.norm(); }
    double angle() const { return std::atan2(position.x(), position.y()); }
    /// Closing speed along the line of sight.
    double radial_velocity() const { return -position.dot(velocity) / position.norm(); }
};

/// Half-wavelength uniform linear arrays.
struct ArrayConfig {
    int n_tx = 64;
    int n_rx = 64;
    int n_ue = 4;
};

struct CarrierConfig {
    double f_c = 3e9;
    double c = kSpeedOfLight;

    double wavelength() const { return c / f_c; }
};

/// One delay-Doppler channel tap. tau/nu are the pre-quantization values.
struct DDPath {
    int l = 0;
    int k = 0;
    cd gain{1.0, 0.0};
    double angle = 0.0;
    double tau = 0.0;
    double nu = 0.0;
};

enum class Link { Sensing, Communication };

/// a_n(theta)[q] = exp(j q pi sin(theta)), q = 0..n-1.
CVector steering_vector(double theta, int n);

/// Line-of-sight downlink path: |h| = sqrt(c / (4 pi f_c d^2)), tau = d/c,
/// nu = f_c v_rad / c. The gain phase is supplied by the caller.
DDPath comm_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                             double phase);
/// Same, with the phase drawn uniformly on [0, 2pi) from rng.
DDPath comm_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                             Rng& rng);

/// Mono-static echo path: eta = 2d/c, upsilon = 2 f_c v_rad / c and the
/// monostatic radar equation |gamma|^2 = rcs c^2 / ((4 pi)^3 f_c^2 d^4).
DDPath sensing_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                                double phase);
DDPath sensing_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                                Rng& rng);

/// Y[l,k] = composite_gain * sum_p gain_p X[(l - l_p) mod M, (k - k_p) mod N].
DDFrame apply_dd_channel(const DDFrame& x, const std::vector<DDPath>& paths, cd composite_gain);

/// Adds circularly-symmetric complex Gaussian noise of variance n0 per entry.
DDFrame add_awgn(const DDFrame& x, double n0, Rng& rng);

/// Effective scalar gain of the beamformed link.
///
/// The transmit beamformer is f = sqrt(power/N_t) a_Nt(tx_angle_steered).
/// For Link::Sensing the receive beamformer is b = a_Nr(rx_beam_angle) and
/// the result is b^H a_Nr(theta) a_Nt(theta)^H f. For Link::Communication
/// the UE combiner is u = a_Nu(rx_beam_angle) / sqrt(N_u) and the result is
/// u^H a_Nu(theta) a_Nt(theta)^H f.
cd composite_gain(double tx_angle_steered, double true_angle, double rx_beam_angle,
                  const ArrayConfig& arrays, double power, Link link = Link::Sensing);

}  // namespace otfsisac
