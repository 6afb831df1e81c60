#pragma once

#include <span>

#include "otfsisac/channel.hpp"
#include "otfsisac/grid.hpp"

// Sensing-assisted prediction: estimates become a target state, the state is
// propagated one block ahead with a constant-velocity model, and the
// predicted downlink channel is removed at the transmitter.
namespace otfsisac {

/// Estimated or predicted kinematic state of one target.
struct TrackState {
    Vec2 position = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();
    double angle = 0.0;
    double range = 0.0;
    int block_index = 0;
    /// Downlink path phase at this state's position, radians.
    double phase = 0.0;

    /// Builds a state with range and angle derived from position.
    static TrackState at(const Vec2& position, const Vec2& velocity, int block_index = 0,
                         double phase = 0.0);
};

/// p = (c eta sin theta / 2, c eta cos theta / 2).
Vec2 localize(double eta_hat, double theta_hat, double c = kSpeedOfLight);

/// Velocity from the round-trip Doppler along a known heading.
///
/// The closing speed is v_r = c phi / (2 f_c); the line-of-sight unit vector
/// from the target toward the base station is r = -(sin theta, cos theta),
/// and the returned velocity is v_r / (heading . r) * heading. Throws
/// "unobservable geometry" when |heading . r| < 0.1.
Vec2 estimate_velocity(double phi_hat, double theta_hat, double f_c, double c, const Vec2& heading);

/// Constant-velocity prediction over delta_t. Phase is advanced by the
/// one-way carrier rotation -2 pi f_c (d_new - d_old) / c.
TrackState predict_state(const TrackState& s, double delta_t, const CarrierConfig& carrier = {});

/// atan2(p_x, p_y), boresight along +y.
double predict_angle(const Vec2& p_tilde);

/// Downlink path for a predicted state, with the same mapping as
/// comm_path_from_target; the gain phase is taken from s.phase.
DDPath predict_channel(const TrackState& s, const CarrierConfig& carrier, const DDGrid& grid);

/// Shifts the frame by (-l, -k) of the predicted path and rotates it by
/// the conjugate phase of the predicted gain. Energy is preserved; the
/// amplitude is not inverted.
DDFrame precompensate(const DDFrame& x, const DDPath& predicted);

/// As above, also removing the phase of a known composite beam gain, so the
/// matched channel returns |g_comp h| x.
DDFrame precompensate(const DDFrame& x, const DDPath& predicted, cd g_comp);

struct ReflectorFix {
    Vec2 position = Vec2::Zero();
    int iterations = 0;
    double residual = 0.0;
};

/// Maximum-likelihood reflector position from a sequence of round-trip
/// delays with known bearings.
///
/// Each measurement contributes a range residual (eta_t - 2|p|/c)/sigma and
/// a cross-bearing residual (2/c)(p . n_t)/sigma with n_t normal to the
/// bearing theta_t. Under iid Gaussian delay noise this is a weighted least
/// squares problem, solved by Gauss-Newton from the first measurement's
/// localization. Converges when the step is below 1e-9 m; throws after 50
/// iterations otherwise.
ReflectorFix locate_reflector_ml(std::span<const double> delays, std::span<const double> angles,
                                 double sigma, double c = kSpeedOfLight);

}  // namespace otfsisac
