#include "otfsisac/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace otfsisac {

namespace {

using nlohmann::json;

constexpr double kDeg = 180.0 / kPi;

std::string fmt_snr(double snr) {
    if (std::isinf(snr)) return snr > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", snr);
    return buf;
}

json snr_value(double snr) {
    if (std::isinf(snr)) return fmt_snr(snr);
    return snr;
}

struct Aggregate {
    long long blocks = 0;
    long long bits = 0;
    long long errors = 0;
    long long recovered = 0;
    double angle_err_sum = 0.0;
    double pos_sq_sum = 0.0;
    long long pos_count = 0;

    double ber() const { return bits > 0 ? double(errors) / double(bits) : 0.0; }
};

/// scheme -> snr -> aggregate, both keys in ascending order.
std::map<Scheme, std::map<double, Aggregate>> aggregate(const std::vector<BlockRecord>& records) {
    std::map<Scheme, std::map<double, Aggregate>> out;
    for (const auto& r : records) {
        Aggregate& a = out[r.scheme][r.snr_db];
        ++a.blocks;
        a.bits += r.bits_sent;
        a.errors += r.bit_errors;
        a.recovered += (r.l_hat == r.l_true && r.k_hat == r.k_true);
        a.angle_err_sum += std::abs(r.theta_hat - r.theta_true) * kDeg;
        if (std::isfinite(r.position_error)) {
            a.pos_sq_sum += r.position_error * r.position_error;
            ++a.pos_count;
        }
    }
    return out;
}

json config_echo(const ScenarioConfig& cfg) {
    json j = json::object();
    json targets = json::array();
    std::istringstream in(to_text(cfg));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "target") {
            targets.push_back(value);
        } else {
            j[key] = value;
        }
    }
    j["targets"] = targets;
    return j;
}

}  // namespace

std::string records_csv(const std::vector<BlockRecord>& records) {
    std::string out = kRecordsHeader;
    out += '\n';
    char buf[256];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%s,%d,%d,%d,%d,%d,%d,%.6f,%.6f\n", r.trial, r.block,
                      scheme_name(r.scheme), fmt_snr(r.snr_db).c_str(), r.bits_sent, r.bit_errors, r.l_true,
                      r.l_hat, r.k_true, r.k_hat, r.theta_true * kDeg, r.theta_hat * kDeg);
        out += buf;
    }
    return out;
}

std::string summary_json(const std::vector<BlockRecord>& records, const ScenarioConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["config"] = config_echo(cfg);
    json schemes = json::object();
    for (const auto& [scheme, points] : aggregate(records)) {
        json arr = json::array();
        for (const auto& [snr, a] : points) {
            json p;
            p["snr_db"] = snr_value(snr);
            p["blocks"] = a.blocks;
            p["bits_sent"] = a.bits;
            p["bit_errors"] = a.errors;
            p["ber"] = a.ber();
            p["index_recovery_rate"] = double(a.recovered) / double(a.blocks);
            p["mean_abs_angle_error_deg"] = a.angle_err_sum / double(a.blocks);
            if (a.pos_count > 0) {
                p["rms_position_error_m"] = std::sqrt(a.pos_sq_sum / double(a.pos_count));
            } else {
                p["rms_position_error_m"] = nullptr;
            }
            arr.push_back(p);
        }
        schemes[scheme_name(scheme)] = arr;
    }
    j["schemes"] = schemes;
    return j.dump(2) + "\n";
}

std::string ber_svg(const std::vector<BlockRecord>& records) {
    const auto agg = aggregate(records);
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double min_ber = 1.0;
    for (const auto& [scheme, points] : agg) {
        for (const auto& [snr, a] : points) {
            if (!std::isfinite(snr)) continue;
            x_lo = std::min(x_lo, snr);
            x_hi = std::max(x_hi, snr);
            if (a.ber() > 0.0) min_ber = std::min(min_ber, a.ber());
        }
    }
    if (!std::isfinite(x_lo)) x_lo = x_hi = 0.0;
    if (x_hi - x_lo < 1e-9) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }
    const int dec_lo = static_cast<int>(std::floor(std::log10(min_ber))) - (min_ber >= 1.0 ? 1 : 0);
    const double y_lo = dec_lo, y_hi = 0.0;

    const double W = 640, H = 420, L = 70, R = 130, T = 20, B = 50;
    auto px = [&](double x) { return L + (x - x_lo) / (x_hi - x_lo) * (W - L - R); };
    auto py = [&](double ber) {
        const double y = std::log10(std::max(ber, std::pow(10.0, y_lo)));
        return T + (y_hi - y) / (y_hi - y_lo) * (H - T - B);
    };

    std::ostringstream s;
    char buf[256];
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int d = dec_lo; d <= 0; ++d) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">1e%d</text>\n",
                      L, py(std::pow(10.0, d)), W - R, py(std::pow(10.0, d)), L - 6, py(std::pow(10.0, d)) + 4, d);
        s << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.4g</text>"
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.4g</text>\n",
                  px(x_lo), H - B + 16, x_lo, px(x_hi), H - B + 16, x_hi);
    s << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\">SNR (dB)</text>"
                  "<text x=\"16\" y=\"%.1f\" font-size=\"12\" transform=\"rotate(-90 16 %.1f)\" "
                  "text-anchor=\"middle\">BER</text>\n",
                  (L + W - R) / 2, H - 12, (T + H - B) / 2, (T + H - B) / 2);
    s << buf;
    std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                  L, T, W - L - R, H - T - B);
    s << buf;

    const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c"};
    int i = 0;
    for (const auto& [scheme, points] : agg) {
        const char* color = colors[i % 3];
        s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [snr, a] : points) {
            if (!std::isfinite(snr)) continue;
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(snr), py(a.ber()));
            s << buf;
        }
        s << "\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                      W - R + 10, T + 14 + 18.0 * i, W - R + 34, T + 14 + 18.0 * i, color, W - R + 40,
                      T + 18 + 18.0 * i, scheme_name(scheme));
        s << buf;
        ++i;
    }
    s << "</svg>\n";
    return s.str();
}

void emit_results(const std::vector<BlockRecord>& records, const ScenarioConfig& cfg, const std::string& out_dir,
                  bool plot) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw std::runtime_error("emit_results: cannot create output directory " + out_dir);
    }
    auto write = [&](const char* name, const std::string& content) {
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("emit_results: cannot write " + p.string());
        f << content;
        if (!f) throw std::runtime_error("emit_results: write failed for " + p.string());
    };
    write("records.csv", records_csv(records));
    write("summary.json", summary_json(records, cfg));
    if (plot) write("ber_curve.svg", ber_svg(records));
}

}  // namespace otfsisac
