#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otfsisac/channel.hpp"
#include "otfsisac/grid.hpp"

namespace otfsisac {

enum class SnrMode { Normalized, LinkBudget };
enum class Scheme { Proposed, Pilot, Ideal };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

/// One scene element as configured. Speed is drawn per trial from
/// U[speed_min, speed_max]. The heading is either an absolute direction
/// (degrees from +y toward +x) or, when unset, radial closing motion.
struct TargetSpec {
    Vec2 position = Vec2(0.0, 1000.0);
    double speed_min = 0.0;
    double speed_max = 0.0;
    std::optional<double> heading_deg;
    double rcs = 25.0;
    bool is_ue = true;

    /// Unit direction of motion for a target currently at `position`.
    Vec2 heading_at(const Vec2& position) const;
};

struct ScenarioConfig {
    int M = 128;
    int N = 20;
    double delta_f = 6e3;
    double carrier_hz = 3e9;
    int n_tx = 64;
    int n_rx = 64;
    int n_ue = 4;
    double tx_power_dbm = 40.0;
    double noise_figure_db = 7.0;
    double noise_temperature_k = 290.0;

    SnrMode snr_mode = SnrMode::Normalized;
    /// Post-combining per-symbol SNR of a perfectly pointed downlink; +inf is noiseless.
    std::vector<double> snr_grid_db{0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    /// Per-sample echo SNR relative to the downlink SNR (normalized mode).
    double sensing_snr_offset_db = 0.0;

    int trials = 20;
    int blocks_per_trial = 10;
    std::vector<Scheme> schemes{Scheme::Proposed, Scheme::Pilot, Scheme::Ideal};
    std::uint64_t seed = 1;
    int threads = 1;

    double angle_min_deg = -60.0;
    double angle_max_deg = 60.0;
    double angle_step_deg = 1.0;

    double pilot_sweep_fraction = 0.1;
    double pilot_power_fraction = 0.2;
    int pilot_guard_delay = 8;
    int pilot_guard_doppler = 2;
    bool pilot_ideal_alignment = false;

    std::vector<TargetSpec> targets;

    DDGrid grid() const { return DDGrid(M, N, delta_f); }
    CarrierConfig carrier() const { return CarrierConfig{carrier_hz, kSpeedOfLight}; }
    ArrayConfig arrays() const { return ArrayConfig{n_tx, n_rx, n_ue}; }
    double tx_power_w() const;

    /// Throws std::invalid_argument on any invariant violation.
    void validate() const;
};

/// Parses the flat `key = value` format; `#` starts a comment, `target`
/// may repeat, unknown keys are errors. The result is validated.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ScenarioConfig& cfg);

}  // namespace otfsisac
