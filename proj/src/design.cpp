#include "otfsisac/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "otfsisac/metrics.hpp"
#include "otfsisac/modem.hpp"
#include "otfsisac/sensing.hpp"

namespace otfsisac {

namespace {

constexpr double kBlendTolerance = 1e-4;
constexpr int kScanPoints = 32;

std::vector<double> blend(const std::vector<double>& wf, double p_total, double lambda) {
    std::vector<double> out(wf.size());
    for (std::size_t i = 0; i < wf.size(); ++i) out[i] = (1.0 - lambda) * wf[i] + lambda * p_total;
    return out;
}

void renormalize(std::vector<double>& w, double p_total) {
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    if (mean > 0.0) {
        for (double& v : w) v *= p_total / mean;
    }
}

}  // namespace

std::vector<double> water_filling(const std::vector<double>& gains, double total_power) {
    const std::size_t n = gains.size();
    std::vector<double> w(n, 0.0);
    if (n == 0) return w;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
    if (!(gains[order[0]] > 0.0)) {
        std::fill(w.begin(), w.end(), total_power / static_cast<double>(n));
        return w;
    }
    // Find the largest active set whose water level keeps every member positive.
    double inv_sum = 0.0;
    double level = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double gi = gains[order[i]];
        if (!(gi > 0.0)) break;
        const double candidate = (total_power + inv_sum + 1.0 / gi) / static_cast<double>(i + 1);
        if (candidate - 1.0 / gi <= 0.0) break;
        inv_sum += 1.0 / gi;
        level = candidate;
        active = i + 1;
    }
    for (std::size_t i = 0; i < active; ++i) {
        const std::size_t j = order[i];
        w[j] = std::max(0.0, level - 1.0 / gains[j]);
    }
    return w;
}

DDFrame frame_with_allocation(const std::vector<double>& w, const DDGrid& grid, Rng& rng) {
    if (static_cast<int>(w.size()) != grid.size()) {
        throw std::invalid_argument("frame_with_allocation: allocation length must equal M*N");
    }
    std::uniform_int_distribution<int> quadrant(0, 3);
    CMatrix tf(grid.M, grid.N);
    for (int i = 0; i < grid.size(); ++i) {
        const double ph = kPi / 4.0 + kPi / 2.0 * quadrant(rng);
        tf(i) = std::polar(std::sqrt(std::max(0.0, w[i])), ph);
    }
    return sfft(TFFrame(grid, std::move(tf)));
}

double allocation_crb(const std::vector<double>& w, const DDGrid& grid, double g, double n0,
                      int frames, Rng& rng) {
    if (frames <= 0) {
        throw std::invalid_argument("allocation_crb: frame count must be positive");
    }
    double acc = 0.0;
    for (int f = 0; f < frames; ++f) {
        const DDFrame x = frame_with_allocation(w, grid, rng);
        try {
            acc += crb_h(x, n0, g);
        } catch (const std::runtime_error&) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return acc / frames;
}

DesignResult design_allocation(const std::vector<DDPath>& paths, cd g, double n0, double p_total,
                               double t_crb, int frames_for_crb, Rng& rng, const DDGrid& grid) {
    if (!(p_total > 0.0) || !(t_crb > 0.0) || !(n0 > 0.0)) {
        throw std::invalid_argument("design_allocation: p_total, t_crb and n0 must be positive");
    }
    const int mn = grid.size();
    const CMatrix h = tf_channel_response(paths, g, grid);
    std::vector<double> gains(mn);
    for (int i = 0; i < mn; ++i) gains[i] = std::norm(h(i)) / n0;
    std::vector<double> wf = water_filling(gains, p_total * mn);
    renormalize(wf, p_total);

    const double gmag = std::abs(g);
    // Every CRB evaluation reuses one symbol draw so that the estimate is a
    // smooth function of the blend weight.
    const Rng::result_type crb_seed = rng();
    auto crb_at = [&](double lambda) {
        Rng local(crb_seed);
        return allocation_crb(blend(wf, p_total, lambda), grid, gmag, n0, frames_for_crb, local);
    };
    auto finish = [&](double lambda, double crb) {
        DesignResult r;
        r.power_allocation = blend(wf, p_total, lambda);
        renormalize(r.power_allocation, p_total);
        r.achieved_capacity = capacity_eigenmode(paths, g, r.power_allocation, n0, grid);
        r.achieved_crb = crb;
        r.blend = lambda;
        r.feasible = crb <= t_crb;
        return r;
    };

    if (std::isinf(t_crb)) {
        return finish(0.0, crb_at(0.0));
    }
    const double crb0 = crb_at(0.0);
    if (crb0 <= t_crb) return finish(0.0, crb0);
    const double crb1 = crb_at(1.0);
    if (crb1 > t_crb) {
        throw std::runtime_error("T_CRB infeasible at this power");
    }

    double lo = 0.0, hi = 1.0;
    double crb_lo = crb0, crb_hi = crb1;
    bool monotone = true;
    while (hi - lo > kBlendTolerance) {
        const double mid = 0.5 * (lo + hi);
        const double c = crb_at(mid);
        if (c > crb_lo || c < crb_hi) monotone = false;
        if (c <= t_crb) {
            hi = mid;
            crb_hi = c;
        } else {
            lo = mid;
            crb_lo = c;
        }
    }
    if (monotone) return finish(hi, crb_hi);

    for (int i = 0; i < kScanPoints; ++i) {
        const double lambda = static_cast<double>(i) / (kScanPoints - 1);
        const double c = crb_at(lambda);
        if (c <= t_crb) return finish(lambda, c);
    }
    return finish(1.0, crb1);
}

}  // namespace otfsisac
