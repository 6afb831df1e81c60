#pragma once

#include <cstdint>
#include <vector>

#include "otfsisac/config.hpp"
#include "otfsisac/grid.hpp"

// Block-level Monte-Carlo harness for the sensing-assisted downlink and its
// two reference schemes.
//
// Every (trial, target) pair owns independent RNG streams derived from the
// master seed, one per purpose. Streams do not depend on the scheme or on
// the SNR point, so all schemes see the same target draws, data bits and
// downlink noise at every SNR (common random numbers).
namespace otfsisac {

struct BlockRecord {
    int trial = 0;
    int block = 0;
    Scheme scheme = Scheme::Ideal;
    double snr_db = 0.0;
    int bits_sent = 0;
    int bit_errors = 0;
    int l_true = 0;
    int l_hat = 0;
    int k_true = 0;
    int k_hat = 0;
    double theta_true = 0.0;
    double theta_hat = 0.0;
    /// Predicted-vs-true position error in metres; NaN where the scheme
    /// does not track position.
    double position_error = 0.0;
    int target = 0;
};

/// Strict weak order on (trial, block, scheme, snr, target).
bool record_less(const BlockRecord& a, const BlockRecord& b);

enum class Stream : std::uint64_t { Geometry = 1, Data, CommNoise, SensingNoise, Sweep, PilotSweep };

/// Deterministic stream for one (trial, target, purpose).
Rng derive_stream(std::uint64_t seed, int trial, int target, Stream purpose);

/// Sensing-assisted scheme: the data frame doubles as the radar probe; its
/// echo is matched-filtered, the target is localized and propagated one
/// block ahead, and the next frame is pre-compensated and steered with the
/// prediction. Block 0 is bootstrapped with perfect knowledge.
std::vector<BlockRecord> run_proposed(const ScenarioConfig& cfg);

/// Perfect channel knowledge: exact steering and exact compensation.
std::vector<BlockRecord> run_ideal(const ScenarioConfig& cfg);

/// Beam sweep over the angle grid, then an embedded delay-Doppler impulse
/// pilot with a guard region, threshold estimation and single-tap
/// equalization. The sweep and the pilot take their energy out of the data
/// budget. Throws if the guard region does not fit in the grid.
std::vector<BlockRecord> run_pilot_baseline(const ScenarioConfig& cfg);

/// Runs every configured scheme; output sorted with record_less.
std::vector<BlockRecord> simulate(const ScenarioConfig& cfg);

/// Per-symbol SNR used for each grid point; link-budget mode yields one point.
std::vector<double> snr_points_db(const ScenarioConfig& cfg);

/// Data bins of the pilot frame, delay-fastest order.
std::vector<int> pilot_data_bins(const ScenarioConfig& cfg);

struct SenseReport {
    int target = 0;
    int l_true = 0, k_true = 0;
    int l_hat = 0, k_hat = 0;
    double theta_true = 0.0, theta_hat = 0.0;
    Vec2 position_true = Vec2::Zero();
    Vec2 position_hat = Vec2::Zero();
    double range_error = 0.0;
    double radial_speed_true = 0.0;
    double radial_speed_hat = 0.0;
};

/// Single-shot sensing of every configured target at the first SNR point,
/// trial 0, with the transmit beam on the true angle.
std::vector<SenseReport> sense(const ScenarioConfig& cfg);

}  // namespace otfsisac
