#include "otfsisac/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace otfsisac {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) {
        throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty()) {
        throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != v.size() || v.empty() || v[0] == '-') {
        throw std::invalid_argument("config: '" + key + "' expects an unsigned integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: '" + key + "' expects true/false, got '" + v + "'");
}

// target = px py speed_min speed_max heading rcs ue
TargetSpec parse_target(const std::string& v) {
    const auto w = words(v);
    if (w.size() != 7) {
        throw std::invalid_argument(
            "config: 'target' expects 7 fields: px py speed_min speed_max heading_deg|radial rcs ue|object");
    }
    TargetSpec t;
    t.position = Vec2(to_double("target", w[0]), to_double("target", w[1]));
    t.speed_min = to_double("target", w[2]);
    t.speed_max = to_double("target", w[3]);
    if (w[4] != "radial") t.heading_deg = to_double("target", w[4]);
    t.rcs = to_double("target", w[5]);
    if (w[6] == "ue") {
        t.is_ue = true;
    } else if (w[6] == "object") {
        t.is_ue = false;
    } else {
        throw std::invalid_argument("config: target kind must be 'ue' or 'object'");
    }
    return t;
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Proposed: return "proposed";
        case Scheme::Pilot: return "pilot";
        case Scheme::Ideal: return "ideal";
    }
    return "unknown";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "proposed") return Scheme::Proposed;
    if (name == "pilot") return Scheme::Pilot;
    if (name == "ideal") return Scheme::Ideal;
    throw std::invalid_argument("unknown scheme '" + name + "'");
}

Vec2 TargetSpec::heading_at(const Vec2& p) const {
    if (heading_deg) {
        const double h = *heading_deg * kPi / 180.0;
        return Vec2(std::sin(h), std::cos(h));
    }
    return -p.normalized();
}

double ScenarioConfig::tx_power_w() const { return std::pow(10.0, (tx_power_dbm - 30.0) / 10.0); }

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
    if (M < 2 || N < 2) fail("M and N must be at least 2");
    if (!(delta_f > 0.0)) fail("delta_f must be positive");
    if (!(carrier_hz > 0.0)) fail("carrier_hz must be positive");
    if (n_tx < 1 || n_rx < 1 || n_ue < 1) fail("array sizes must be at least 1");
    if (trials < 1) fail("trials must be at least 1");
    if (blocks_per_trial < 1) fail("blocks_per_trial must be at least 1");
    if (schemes.empty()) fail("schemes must be nonempty");
    if (snr_grid_db.empty()) fail("snr_grid_db must be nonempty");
    if (threads < 1) fail("threads must be at least 1");
    if (!(angle_step_deg > 0.0) || angle_max_deg < angle_min_deg) fail("invalid angle grid");
    if (angle_min_deg < -90.0 || angle_max_deg > 90.0) fail("angle grid must lie in [-90, 90] degrees");
    if (pilot_sweep_fraction < 0.0 || pilot_sweep_fraction >= 1.0) fail("pilot_sweep_fraction must be in [0, 1)");
    if (!(pilot_power_fraction > 0.0) || pilot_power_fraction >= 1.0) fail("pilot_power_fraction must be in (0, 1)");
    if (pilot_guard_delay < 0 || pilot_guard_doppler < 0) fail("pilot guards must be non-negative");
    bool any_ue = false;
    for (const TargetSpec& t : targets) {
        if (!(t.position.norm() > 0.0)) fail("target at origin");
        if (!(t.rcs > 0.0)) fail("target rcs must be positive");
        if (t.speed_min < 0.0 || t.speed_max < t.speed_min || t.speed_max > kSpeedOfLight / 10.0) {
            fail("target speed range must lie within [0, c/10]");
        }
        any_ue = any_ue || t.is_ue;
    }
    if (!any_ue) fail("at least one 'ue' target is required");
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    c.targets.clear();
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "M") c.M = static_cast<int>(to_int(key, val));
        else if (key == "N") c.N = static_cast<int>(to_int(key, val));
        else if (key == "delta_f") c.delta_f = to_double(key, val);
        else if (key == "carrier_hz") c.carrier_hz = to_double(key, val);
        else if (key == "n_tx") c.n_tx = static_cast<int>(to_int(key, val));
        else if (key == "n_rx") c.n_rx = static_cast<int>(to_int(key, val));
        else if (key == "n_ue") c.n_ue = static_cast<int>(to_int(key, val));
        else if (key == "tx_power_dbm") c.tx_power_dbm = to_double(key, val);
        else if (key == "noise_figure_db") c.noise_figure_db = to_double(key, val);
        else if (key == "noise_temperature_k") c.noise_temperature_k = to_double(key, val);
        else if (key == "snr_mode") {
            if (val == "normalized") c.snr_mode = SnrMode::Normalized;
            else if (val == "link_budget") c.snr_mode = SnrMode::LinkBudget;
            else throw std::invalid_argument("config: snr_mode must be 'normalized' or 'link_budget'");
        } else if (key == "snr_grid_db") {
            c.snr_grid_db.clear();
            for (const auto& s : split(val, ',')) c.snr_grid_db.push_back(to_double(key, s));
        } else if (key == "sensing_snr_offset_db") c.sensing_snr_offset_db = to_double(key, val);
        else if (key == "trials") c.trials = static_cast<int>(to_int(key, val));
        else if (key == "blocks_per_trial") c.blocks_per_trial = static_cast<int>(to_int(key, val));
        else if (key == "schemes") {
            c.schemes.clear();
            for (const auto& s : split(val, ',')) c.schemes.push_back(parse_scheme(s));
        } else if (key == "seed") c.seed = to_u64(key, val);
        else if (key == "threads") c.threads = static_cast<int>(to_int(key, val));
        else if (key == "angle_min_deg") c.angle_min_deg = to_double(key, val);
        else if (key == "angle_max_deg") c.angle_max_deg = to_double(key, val);
        else if (key == "angle_step_deg") c.angle_step_deg = to_double(key, val);
        else if (key == "pilot_sweep_fraction") c.pilot_sweep_fraction = to_double(key, val);
        else if (key == "pilot_power_fraction") c.pilot_power_fraction = to_double(key, val);
        else if (key == "pilot_guard_delay") c.pilot_guard_delay = static_cast<int>(to_int(key, val));
        else if (key == "pilot_guard_doppler") c.pilot_guard_doppler = static_cast<int>(to_int(key, val));
        else if (key == "pilot_ideal_alignment") c.pilot_ideal_alignment = to_bool(key, val);
        else if (key == "target") c.targets.push_back(parse_target(val));
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw std::runtime_error("cannot open config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::string to_text(const ScenarioConfig& c) {
    std::ostringstream o;
    o << "M = " << c.M << "\n"
      << "N = " << c.N << "\n"
      << "delta_f = " << fmt(c.delta_f) << "\n"
      << "carrier_hz = " << fmt(c.carrier_hz) << "\n"
      << "n_tx = " << c.n_tx << "\n"
      << "n_rx = " << c.n_rx << "\n"
      << "n_ue = " << c.n_ue << "\n"
      << "tx_power_dbm = " << fmt(c.tx_power_dbm) << "\n"
      << "noise_figure_db = " << fmt(c.noise_figure_db) << "\n"
      << "noise_temperature_k = " << fmt(c.noise_temperature_k) << "\n"
      << "snr_mode = " << (c.snr_mode == SnrMode::Normalized ? "normalized" : "link_budget") << "\n"
      << "snr_grid_db = ";
    for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i) o << (i ? "," : "") << fmt(c.snr_grid_db[i]);
    o << "\n"
      << "sensing_snr_offset_db = " << fmt(c.sensing_snr_offset_db) << "\n"
      << "trials = " << c.trials << "\n"
      << "blocks_per_trial = " << c.blocks_per_trial << "\n"
      << "schemes = ";
    for (std::size_t i = 0; i < c.schemes.size(); ++i) o << (i ? "," : "") << scheme_name(c.schemes[i]);
    o << "\n"
      << "seed = " << c.seed << "\n"
      << "threads = " << c.threads << "\n"
      << "angle_min_deg = " << fmt(c.angle_min_deg) << "\n"
      << "angle_max_deg = " << fmt(c.angle_max_deg) << "\n"
      << "angle_step_deg = " << fmt(c.angle_step_deg) << "\n"
      << "pilot_sweep_fraction = " << fmt(c.pilot_sweep_fraction) << "\n"
      << "pilot_power_fraction = " << fmt(c.pilot_power_fraction) << "\n"
      << "pilot_guard_delay = " << c.pilot_guard_delay << "\n"
      << "pilot_guard_doppler = " << c.pilot_guard_doppler << "\n"
      << "pilot_ideal_alignment = " << (c.pilot_ideal_alignment ? "true" : "false") << "\n";
    for (const TargetSpec& t : c.targets) {
        o << "target = " << fmt(t.position.x()) << " " << fmt(t.position.y()) << " " << fmt(t.speed_min) << " "
          << fmt(t.speed_max) << " " << (t.heading_deg ? fmt(*t.heading_deg) : std::string("radial")) << " "
          << fmt(t.rcs) << " " << (t.is_ue ? "ue" : "object") << "\n";
    }
    return o.str();
}

}  // namespace otfsisac
