#include "otfsisac/sensing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fft.hpp"

namespace otfsisac {

namespace {

constexpr double kRankTolerance = 1e-12;

void check_same_grid(const DDGrid& a, const DDGrid& b) {
    if (!(a == b)) {
        throw std::invalid_argument("grid mismatch");
    }
}

CMatrix spectrum(const DDFrame& x) {
    CMatrix s = x.symbols();
    fft::both(s, -1);
    return s;
}

CMatrix as_matrix(const DDVector& v) {
    return Eigen::Map<const CMatrix>(v.data.data(), v.grid.M, v.grid.N);
}

DDVector as_vector(const DDGrid& g, const CMatrix& m) {
    return DDVector(g, Eigen::Map<const CVector>(m.data(), m.size()));
}

}  // namespace

DDVector matched_filter(const DDVector& r, const DDFrame& x) {
    check_same_grid(r.grid, x.grid());
    const DDGrid& g = x.grid();
    CMatrix rs = as_matrix(r);
    fft::both(rs, -1);
    const CMatrix xs = spectrum(x);
    CMatrix prod = xs.conjugate().cwiseProduct(rs);
    fft::both(prod, +1);
    prod /= static_cast<double>(g.size());
    return as_vector(g, prod);
}

DDVector lmmse_estimate(const DDVector& r, const DDFrame& x, double n0, double prior_var, cd g) {
    check_same_grid(r.grid, x.grid());
    if (n0 < 0.0 || !(prior_var > 0.0)) {
        throw std::invalid_argument("lmmse_estimate: need n0 >= 0 and prior_var > 0");
    }
    const DDGrid& grid = x.grid();
    const double reg = std::isinf(prior_var) ? 0.0 : n0 / prior_var;
    const CMatrix xs = spectrum(x);
    const Eigen::MatrixXd power = xs.cwiseAbs2() * std::norm(g);
    if (reg == 0.0 && power.minCoeff() <= kRankTolerance * power.maxCoeff()) {
        throw std::runtime_error("rank deficient");
    }
    CMatrix rs = as_matrix(r);
    fft::both(rs, -1);
    CMatrix hs(grid.M, grid.N);
    for (Eigen::Index i = 0; i < hs.size(); ++i) {
        hs(i) = std::conj(g * xs(i)) * rs(i) / (power(i) + reg);
    }
    fft::both(hs, +1);
    hs /= static_cast<double>(grid.size());
    return as_vector(grid, hs);
}

DDVector ml_estimate(const DDVector& r, const DDFrame& x, cd g) {
    return lmmse_estimate(r, x, 0.0, std::numeric_limits<double>::infinity(), g);
}

Peak peak_pick(const DDVector& h_hat) {
    const CVector& d = h_hat.data;
    if (d.size() == 0) {
        throw std::invalid_argument("peak_pick: empty vector");
    }
    Eigen::Index best = 0;
    double best_mag = std::norm(d(0));
    for (Eigen::Index i = 1; i < d.size(); ++i) {
        const double m = std::norm(d(i));
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag == 0.0) {
        throw std::runtime_error("no peak");
    }
    const int idx = static_cast<int>(best);
    return Peak{h_hat.grid.delay_of(idx), h_hat.grid.doppler_of(idx), d(best)};
}

double estimate_angle_beamsweep(std::span<const BeamEnergy> sweep) {
    if (sweep.empty()) {
        throw std::invalid_argument("estimate_angle_beamsweep: empty sweep");
    }
    const BeamEnergy* best = &sweep[0];
    for (const BeamEnergy& b : sweep) {
        if (b.energy > best->energy) best = &b;
    }
    return best->angle;
}

std::vector<double> angle_grid(double min_rad, double max_rad, double step_rad) {
    if (!(step_rad > 0.0) || max_rad < min_rad) {
        throw std::invalid_argument("angle_grid: invalid range");
    }
    const int count = static_cast<int>(std::floor((max_rad - min_rad) / step_rad + 1e-9)) + 1;
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = min_rad + i * step_rad;
    return out;
}

double crb_h(const DDFrame& x, double n0, double g) {
    if (!(n0 > 0.0)) {
        throw std::invalid_argument("crb_h: n0 must be positive");
    }
    // Eigenvalues of X^H X are the squared magnitudes of the unnormalized 2D DFT of x.
    const Eigen::MatrixXd power = spectrum(x).cwiseAbs2();
    if (power.minCoeff() <= kRankTolerance * power.maxCoeff()) {
        throw std::runtime_error("rank deficient");
    }
    return n0 / (g * g) * power.cwiseInverse().sum();
}

SensingEstimate make_estimate(const DDVector& h_hat, double theta_hat) {
    const DDGrid& g = h_hat.grid;
    const Peak p = peak_pick(h_hat);
    SensingEstimate e;
    e.h_hat = h_hat.data;
    e.l_hat = p.l;
    e.k_hat = p.k;
    e.theta_hat = theta_hat;
    e.eta_hat = p.l * g.delay_resolution();
    e.phi_hat = g.signed_doppler(p.k) * g.doppler_resolution();
    e.peak_magnitude = std::abs(p.gain);
    return e;
}

}  // namespace otfsisac
