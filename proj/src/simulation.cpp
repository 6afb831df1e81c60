#include "otfsisac/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <mutex>
#include <optional>
#include <thread>
#include <tuple>

#include "otfsisac/channel.hpp"
#include "otfsisac/metrics.hpp"
#include "otfsisac/modem.hpp"
#include "otfsisac/sensing.hpp"
#include "otfsisac/tracking.hpp"

namespace otfsisac {

namespace {

constexpr double kBoltzmann = 1.380649e-23;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Everything a block loop needs that does not change between blocks.
struct Env {
    const ScenarioConfig& cfg;
    DDGrid grid;
    CarrierConfig carrier;
    ArrayConfig arrays;
    double power;
    std::vector<double> beams;

    explicit Env(const ScenarioConfig& c)
        : cfg(c),
          grid(c.grid()),
          carrier(c.carrier()),
          arrays(c.arrays()),
          power(c.tx_power_w()),
          beams(angle_grid(c.angle_min_deg * kPi / 180.0, c.angle_max_deg * kPi / 180.0,
                           c.angle_step_deg * kPi / 180.0)) {}

    double thermal_noise() const {
        return kBoltzmann * cfg.noise_temperature_k * db_to_linear(cfg.noise_figure_db) * grid.M * grid.delta_f;
    }
    /// |G|^2 of a perfectly pointed downlink.
    double comm_array_gain() const { return power * arrays.n_tx * arrays.n_ue; }
    double sensing_array_gain() const { return power * arrays.n_tx * double(arrays.n_rx) * arrays.n_rx; }
};

/// One target's trajectory within a trial.
struct Scene {
    Target initial;
    double phase_comm = 0.0;
    double phase_sens = 0.0;
    const TargetSpec* spec = nullptr;

    Target at(int block, const Env& env) const {
        Target t = initial;
        t.position = initial.position + initial.velocity * (block * env.grid.block_duration());
        return t;
    }
    double comm_phase(const Target& t, const Env& env) const {
        return phase_comm - 2.0 * kPi * env.carrier.f_c * (t.range() - initial.range()) / env.carrier.c;
    }
    double sens_phase(const Target& t, const Env& env) const {
        return phase_sens - 4.0 * kPi * env.carrier.f_c * (t.range() - initial.range()) / env.carrier.c;
    }
};

Scene make_scene(const ScenarioConfig& cfg, int trial, int ti) {
    const TargetSpec& spec = cfg.targets[ti];
    Rng geo = derive_stream(cfg.seed, trial, ti, Stream::Geometry);
    std::uniform_real_distribution<double> speed_dist(spec.speed_min, spec.speed_max);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * kPi);
    Scene s;
    s.spec = &spec;
    s.initial.position = spec.position;
    s.initial.rcs = spec.rcs;
    s.initial.is_ue = spec.is_ue;
    const double speed = speed_dist(geo);
    s.initial.velocity = speed * spec.heading_at(spec.position);
    s.phase_comm = phase_dist(geo);
    s.phase_sens = phase_dist(geo);
    return s;
}

Bits draw_bits(int n, Rng& rng) {
    std::uniform_int_distribution<int> bit(0, 1);
    Bits b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(bit(rng));
    return b;
}

cd complex_gauss(double var, Rng& rng) {
    if (var == 0.0) return {0.0, 0.0};
    std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
    const double re = g(rng);
    const double im = g(rng);
    return {re, im};
}

int count_errors(const Bits& tx, const Bits& rx) {
    int e = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) e += tx[i] != rx[i];
    return e;
}

/// Noise powers for one block.
struct Noise {
    double comm = 0.0;
    double sens = 0.0;
};

Noise block_noise(const Env& env, double snr_db, const DDPath& comm, const DDPath& sens) {
    Noise n;
    if (env.cfg.snr_mode == SnrMode::LinkBudget) {
        n.comm = n.sens = env.thermal_noise();
        return n;
    }
    if (std::isinf(snr_db) && snr_db > 0) return n;
    const double g = db_to_linear(snr_db);
    n.comm = env.comm_array_gain() * std::norm(comm.gain) / g;
    n.sens = env.sensing_array_gain() * std::norm(sens.gain) / (g * db_to_linear(env.cfg.sensing_snr_offset_db));
    return n;
}

double link_budget_snr_db(const Env& env, const Scene& scene) {
    const DDPath c = comm_path_from_target(scene.initial, env.carrier, env.grid, 0.0);
    return 10.0 * std::log10(env.comm_array_gain() * std::norm(c.gain) / env.thermal_noise());
}

struct Downlink {
    int errors = 0;
};

/// Sends one BPSK frame pre-compensated with `pred` and steered at
/// `theta_pred` through the true downlink; the UE demaps against the phase
/// of the resulting scalar gain.
int downlink_errors(const Env& env, const Bits& bits, const DDFrame& x_pre, const DDPath& truth,
                    const DDPath& pred, double theta_true, double theta_pred, double n0, Rng& noise) {
    const cd gc = composite_gain(theta_pred, theta_true, theta_pred, env.arrays, env.power, Link::Communication);
    const DDFrame y = add_awgn(apply_dd_channel(x_pre, {truth}, gc), n0, noise);
    const double pm = std::abs(pred.gain);
    const cd eff = gc * truth.gain * (pm > 0.0 ? std::conj(pred.gain) / pm : cd(1.0, 0.0));
    return count_errors(bits, bpsk_demap(y, std::arg(eff)));
}

/// Matched-filter peak energy per receive beam at the detected bin.
std::vector<BeamEnergy> sensing_sweep(const Env& env, double tx_angle, double theta_true, const DDPath& sens,
                                      double frame_energy, double n0, Rng& rng) {
    std::vector<BeamEnergy> out;
    out.reserve(env.beams.size());
    for (double phi : env.beams) {
        const cd g = composite_gain(tx_angle, theta_true, phi, env.arrays, env.power, Link::Sensing);
        const cd v = g * sens.gain * frame_energy + complex_gauss(n0 * frame_energy, rng);
        out.push_back({phi, std::norm(v)});
    }
    return out;
}

BlockRecord base_record(int trial, int block, Scheme scheme, double snr_db, int target) {
    BlockRecord r;
    r.trial = trial;
    r.block = block;
    r.scheme = scheme;
    r.snr_db = snr_db;
    r.target = target;
    return r;
}

void run_proposed_target(const Env& env, Scheme scheme, int trial, int ti, double snr_db,
                         std::vector<BlockRecord>& out) {
    const ScenarioConfig& cfg = env.cfg;
    const Scene scene = make_scene(cfg, trial, ti);
    const bool ideal = scheme == Scheme::Ideal;
    const double record_snr = cfg.snr_mode == SnrMode::LinkBudget ? link_budget_snr_db(env, scene) : snr_db;

    Rng data = derive_stream(cfg.seed, trial, ti, Stream::Data);
    Rng comm_noise = derive_stream(cfg.seed, trial, ti, Stream::CommNoise);
    Rng sens_noise = derive_stream(cfg.seed, trial, ti, Stream::SensingNoise);
    Rng sweep_noise = derive_stream(cfg.seed, trial, ti, Stream::Sweep);

    // Bootstrap: the first block is steered and compensated with the truth.
    Target t0 = scene.at(0, env);
    DDPath pred = comm_path_from_target(t0, env.carrier, env.grid, scene.comm_phase(t0, env));
    double theta_pred = t0.angle();
    Vec2 pos_pred = t0.position;

    for (int b = 0; b < cfg.blocks_per_trial; ++b) {
        const Target tb = scene.at(b, env);
        const DDPath comm = comm_path_from_target(tb, env.carrier, env.grid, scene.comm_phase(tb, env));
        const DDPath sens = sensing_path_from_target(tb, env.carrier, env.grid, scene.sens_phase(tb, env));
        const Noise n0 = block_noise(env, snr_db, comm, sens);
        if (ideal) {
            pred = comm;
            theta_pred = tb.angle();
            pos_pred = tb.position;
        }

        const Bits bits = draw_bits(env.grid.size(), data);
        const DDFrame x_pre = precompensate(bpsk_map(bits, env.grid), pred);

        BlockRecord rec = base_record(trial, b, scheme, record_snr, ti);
        rec.bits_sent = env.grid.size();
        rec.bit_errors = downlink_errors(env, bits, x_pre, comm, pred, tb.angle(), theta_pred, n0.comm, comm_noise);
        rec.l_true = comm.l;
        rec.k_true = comm.k;
        rec.l_hat = pred.l;
        rec.k_hat = pred.k;
        rec.theta_true = tb.angle();
        rec.theta_hat = theta_pred;
        rec.position_error = (pos_pred - tb.position).norm();
        out.push_back(rec);

        if (ideal) continue;

        // The data frame is known at the base station and serves as the probe.
        const cd gs = composite_gain(theta_pred, tb.angle(), theta_pred, env.arrays, env.power, Link::Sensing);
        const DDFrame echo = add_awgn(apply_dd_channel(x_pre, {sens}, gs), n0.sens, sens_noise);
        const DDVector mf = matched_filter(vectorize(echo), x_pre);
        const auto sweep = sensing_sweep(env, theta_pred, tb.angle(), sens, x_pre.energy(), n0.sens, sweep_noise);
        const double theta_hat = estimate_angle_beamsweep(sweep);
        try {
            const SensingEstimate est = make_estimate(mf, theta_hat);
            const Vec2 p_hat = localize(est.eta_hat, theta_hat, env.carrier.c);
            const Vec2 heading = scene.spec->heading_deg ? scene.spec->heading_at(p_hat) : Vec2(-p_hat.normalized());
            Vec2 v_hat = Vec2::Zero();
            try {
                v_hat = estimate_velocity(est.phi_hat, theta_hat, env.carrier.f_c, env.carrier.c, heading);
            } catch (const std::domain_error&) {
                // radial component unobservable along this heading; coast
            }
            const TrackState now = TrackState::at(p_hat, v_hat, b, std::arg(pred.gain));
            const TrackState next = predict_state(now, env.grid.block_duration(), env.carrier);
            const double theta_next = predict_angle(next.position);
            const DDPath pred_next = predict_channel(next, env.carrier, env.grid);
            theta_pred = theta_next;
            pred = pred_next;
            pos_pred = next.position;
        } catch (const std::exception&) {
            // No usable echo (zero peak or a fix at the origin): keep the last prediction.
        }
    }
}

/// Guard region and pilot placement of the embedded-pilot frame.
struct PilotLayout {
    int l_p = 0;
    int k_p = 0;
    int gd = 0;
    int gk = 0;
    std::vector<int> data_bins;
    std::vector<char> is_guard;
};

PilotLayout pilot_layout(const ScenarioConfig& cfg) {
    const DDGrid g = cfg.grid();
    PilotLayout p;
    p.gd = cfg.pilot_guard_delay;
    p.gk = cfg.pilot_guard_doppler;
    if (3 * p.gd + 1 > g.M || 4 * p.gk + 1 > g.N) {
        throw std::invalid_argument("pilot guard region exceeds the grid");
    }
    p.l_p = p.gd;
    p.k_p = g.N / 2;
    p.is_guard.assign(g.size(), 0);
    for (int dk = -2 * p.gk; dk <= 2 * p.gk; ++dk) {
        const int k = ((p.k_p + dk) % g.N + g.N) % g.N;
        for (int l = 0; l <= 3 * p.gd; ++l) p.is_guard[g.index(l, k)] = 1;
    }
    for (int i = 0; i < g.size(); ++i) {
        if (!p.is_guard[i]) p.data_bins.push_back(i);
    }
    return p;
}

void run_pilot_target(const Env& env, int trial, int ti, double snr_db, const PilotLayout& layout,
                      std::vector<BlockRecord>& out) {
    const ScenarioConfig& cfg = env.cfg;
    const DDGrid& g = env.grid;
    const Scene scene = make_scene(cfg, trial, ti);
    const double record_snr = cfg.snr_mode == SnrMode::LinkBudget ? link_budget_snr_db(env, scene) : snr_db;

    Rng data = derive_stream(cfg.seed, trial, ti, Stream::Data);
    Rng comm_noise = derive_stream(cfg.seed, trial, ti, Stream::CommNoise);
    Rng sweep_noise = derive_stream(cfg.seed, trial, ti, Stream::PilotSweep);

    const double mn = g.size();
    const int n_data = static_cast<int>(layout.data_bins.size());
    const double budget = (1.0 - cfg.pilot_sweep_fraction) * mn;
    const double data_amp = std::sqrt((1.0 - cfg.pilot_power_fraction) * budget / n_data);
    const double pilot_amp = std::sqrt(cfg.pilot_power_fraction * budget);
    const double per_beam = cfg.pilot_sweep_fraction * mn / static_cast<double>(env.beams.size());

    for (int b = 0; b < cfg.blocks_per_trial; ++b) {
        const Target tb = scene.at(b, env);
        const double theta = tb.angle();
        const DDPath comm = comm_path_from_target(tb, env.carrier, g, scene.comm_phase(tb, env));
        const DDPath sens = sensing_path_from_target(tb, env.carrier, g, scene.sens_phase(tb, env));
        const Noise n0 = block_noise(env, snr_db, comm, sens);

        // Transmit beam sweep; the UE listens on a single element and feeds back the best beam.
        double theta_hat = env.beams.front();
        if (cfg.pilot_ideal_alignment) {
            double best = std::numeric_limits<double>::infinity();
            for (double phi : env.beams) {
                if (std::abs(phi - theta) < best) {
                    best = std::abs(phi - theta);
                    theta_hat = phi;
                }
            }
        } else {
            std::vector<BeamEnergy> sweep;
            sweep.reserve(env.beams.size());
            const CVector a_true = steering_vector(theta, env.arrays.n_tx);
            for (double phi : env.beams) {
                const CVector f = std::sqrt(env.power / env.arrays.n_tx) * steering_vector(phi, env.arrays.n_tx);
                const cd v = a_true.dot(f) * comm.gain * per_beam + complex_gauss(n0.comm * per_beam, sweep_noise);
                sweep.push_back({phi, std::norm(v)});
            }
            theta_hat = estimate_angle_beamsweep(sweep);
        }

        // Frame: data outside the guard region, one impulse pilot inside it.
        const Bits bits = draw_bits(g.size(), data);
        DDFrame x(g);
        for (int i : layout.data_bins) x(g.delay_of(i), g.doppler_of(i)) = bits[i] ? -data_amp : data_amp;
        x(layout.l_p, layout.k_p) = pilot_amp;

        const cd gc = composite_gain(theta_hat, theta, theta_hat, env.arrays, env.power, Link::Communication);
        const DDFrame y = add_awgn(apply_dd_channel(x, {comm}, gc), n0.comm, comm_noise);

        // Threshold detection inside the estimation window; strongest bin wins,
        // and with nothing above threshold the strongest bin is still used.
        const double threshold = 3.0 * std::sqrt(n0.comm);
        int best_l = 0, best_k = 0;
        double best_mag = -1.0;
        bool detected = false;
        for (int dk = -layout.gk; dk <= layout.gk; ++dk) {
            for (int dl = 0; dl <= layout.gd; ++dl) {
                const int k = ((layout.k_p + dk) % g.N + g.N) % g.N;
                const double mag = std::abs(y(layout.l_p + dl, k));
                const bool above = mag > threshold;
                if ((above && !detected) || (above == detected && mag > best_mag)) {
                    best_mag = mag;
                    best_l = dl;
                    best_k = dk;
                    detected = detected || above;
                }
            }
        }
        const int l_hat = best_l;
        const int k_hat = ((best_k % g.N) + g.N) % g.N;
        const cd h_hat = y(layout.l_p + best_l, ((layout.k_p + best_k) % g.N + g.N) % g.N) / pilot_amp;

        const DDFrame z = circular_shift(y, -l_hat, -k_hat);
        const cd derotate = std::polar(1.0, -std::arg(h_hat));
        int errors = 0;
        for (int i : layout.data_bins) {
            const std::uint8_t rx = (z(g.delay_of(i), g.doppler_of(i)) * derotate).real() < 0.0 ? 1 : 0;
            errors += rx != bits[i];
        }

        BlockRecord rec = base_record(trial, b, Scheme::Pilot, record_snr, ti);
        rec.bits_sent = n_data;
        rec.bit_errors = errors;
        rec.l_true = comm.l;
        rec.k_true = comm.k;
        rec.l_hat = l_hat;
        rec.k_hat = k_hat;
        rec.theta_true = theta;
        rec.theta_hat = theta_hat;
        rec.position_error = std::numeric_limits<double>::quiet_NaN();
        out.push_back(rec);
    }
}

std::vector<double> grid_points(const ScenarioConfig& cfg) {
    if (cfg.snr_mode == SnrMode::LinkBudget) return {0.0};  // placeholder, replaced per target
    return cfg.snr_grid_db;
}

std::vector<BlockRecord> run_trial(const Env& env, Scheme scheme, int trial, const PilotLayout* layout) {
    std::vector<BlockRecord> out;
    const auto points = grid_points(env.cfg);
    for (double snr : points) {
        for (int ti = 0; ti < static_cast<int>(env.cfg.targets.size()); ++ti) {
            if (!env.cfg.targets[ti].is_ue) continue;
            if (scheme == Scheme::Pilot) {
                run_pilot_target(env, trial, ti, snr, *layout, out);
            } else {
                run_proposed_target(env, scheme, trial, ti, snr, out);
            }
        }
    }
    return out;
}

std::vector<BlockRecord> run_scheme(const ScenarioConfig& cfg, Scheme scheme) {
    cfg.validate();
    const Env env(cfg);
    std::optional<PilotLayout> layout;
    if (scheme == Scheme::Pilot) layout = pilot_layout(cfg);

    std::vector<std::vector<BlockRecord>> per_trial(cfg.trials);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int t = next++; t < cfg.trials; t = next++) {
            try {
                per_trial[t] = run_trial(env, scheme, t, layout ? &*layout : nullptr);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n_threads = std::min(cfg.threads, cfg.trials);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<BlockRecord> out;
    for (auto& v : per_trial) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end(), record_less);
    return out;
}

}  // namespace

bool record_less(const BlockRecord& a, const BlockRecord& b) {
    return std::tie(a.trial, a.block, a.scheme, a.snr_db, a.target) <
           std::tie(b.trial, b.block, b.scheme, b.snr_db, b.target);
}

Rng derive_stream(std::uint64_t seed, int trial, int target, Stream purpose) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(target) << 32));
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return Rng(h);
}

std::vector<BlockRecord> run_proposed(const ScenarioConfig& cfg) { return run_scheme(cfg, Scheme::Proposed); }

std::vector<BlockRecord> run_ideal(const ScenarioConfig& cfg) { return run_scheme(cfg, Scheme::Ideal); }

std::vector<BlockRecord> run_pilot_baseline(const ScenarioConfig& cfg) { return run_scheme(cfg, Scheme::Pilot); }

std::vector<BlockRecord> simulate(const ScenarioConfig& cfg) {
    cfg.validate();
    std::vector<BlockRecord> out;
    for (Scheme s : cfg.schemes) {
        auto part = run_scheme(cfg, s);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end(), record_less);
    return out;
}

std::vector<double> snr_points_db(const ScenarioConfig& cfg) {
    if (cfg.snr_mode == SnrMode::Normalized) return cfg.snr_grid_db;
    const Env env(cfg);
    for (int ti = 0; ti < static_cast<int>(cfg.targets.size()); ++ti) {
        if (cfg.targets[ti].is_ue) return {link_budget_snr_db(env, make_scene(cfg, 0, ti))};
    }
    return {};
}

std::vector<int> pilot_data_bins(const ScenarioConfig& cfg) { return pilot_layout(cfg).data_bins; }

std::vector<SenseReport> sense(const ScenarioConfig& cfg) {
    cfg.validate();
    const Env env(cfg);
    const double snr = cfg.snr_grid_db.front();
    std::vector<SenseReport> out;
    for (int ti = 0; ti < static_cast<int>(cfg.targets.size()); ++ti) {
        const Scene scene = make_scene(cfg, 0, ti);
        const Target t = scene.at(0, env);
        const DDPath comm = comm_path_from_target(t, env.carrier, env.grid, scene.comm_phase(t, env));
        const DDPath sens = sensing_path_from_target(t, env.carrier, env.grid, scene.sens_phase(t, env));
        const Noise n0 = block_noise(env, snr, comm, sens);
        Rng data = derive_stream(cfg.seed, 0, ti, Stream::Data);
        Rng sens_noise = derive_stream(cfg.seed, 0, ti, Stream::SensingNoise);
        Rng sweep_noise = derive_stream(cfg.seed, 0, ti, Stream::Sweep);

        const DDFrame x = bpsk_map(draw_bits(env.grid.size(), data), env.grid);
        const double theta = t.angle();
        const cd gs = composite_gain(theta, theta, theta, env.arrays, env.power, Link::Sensing);
        const DDFrame echo = add_awgn(apply_dd_channel(x, {sens}, gs), n0.sens, sens_noise);
        const DDVector mf = matched_filter(vectorize(echo), x);
        const auto sweep = sensing_sweep(env, theta, theta, sens, x.energy(), n0.sens, sweep_noise);
        const SensingEstimate est = make_estimate(mf, estimate_angle_beamsweep(sweep));

        SenseReport r;
        r.target = ti;
        r.l_true = sens.l;
        r.k_true = sens.k;
        r.l_hat = est.l_hat;
        r.k_hat = est.k_hat;
        r.theta_true = theta;
        r.theta_hat = est.theta_hat;
        r.position_true = t.position;
        r.position_hat = localize(est.eta_hat, est.theta_hat, env.carrier.c);
        r.range_error = r.position_hat.norm() - t.range();
        r.radial_speed_true = t.radial_velocity();
        r.radial_speed_hat = env.carrier.c * est.phi_hat / (2.0 * env.carrier.f_c);
        out.push_back(r);
    }
    return out;
}

}  // namespace otfsisac
