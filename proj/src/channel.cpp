#include "otfsisac/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace otfsisac {

namespace {

void check_target(const Target& t) {
    if (!(t.position.norm() > 0.0)) {
        throw std::invalid_argument("target at origin");
    }
    if (!(t.rcs > 0.0)) {
        throw std::invalid_argument("target rcs must be positive");
    }
}

double uniform_phase(Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    return u(rng);
}

DDPath make_path(double tau, double nu, double magnitude, double phase, double angle, const DDGrid& grid) {
    DDPath p;
    p.tau = tau;
    p.nu = nu;
    p.l = quantize_index(tau * grid.M * grid.delta_f, grid.M);
    p.k = quantize_index(nu * grid.N * grid.T, grid.N);
    p.gain = std::polar(magnitude, phase);
    p.angle = angle;
    return p;
}

}  // namespace

CVector steering_vector(double theta, int n) {
    if (n <= 0) {
        throw std::invalid_argument("steering_vector: element count must be positive");
    }
    CVector a(n);
    const double s = kPi * std::sin(theta);
    for (int q = 0; q < n; ++q) {
        a(q) = std::polar(1.0, q * s);
    }
    return a;
}

DDPath comm_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                             double phase) {
    check_target(t);
    const double d = t.range();
    const double tau = d / carrier.c;
    const double nu = carrier.f_c * t.radial_velocity() / carrier.c;
    const double mag = std::sqrt(carrier.c / (4.0 * kPi * carrier.f_c * d * d));
    return make_path(tau, nu, mag, phase, t.angle(), grid);
}

DDPath comm_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                             Rng& rng) {
    return comm_path_from_target(t, carrier, grid, uniform_phase(rng));
}

DDPath sensing_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                                double phase) {
    check_target(t);
    const double d = t.range();
    // Written as 2 * (one-way value) so the round-trip relation is exact.
    const double eta = 2.0 * (d / carrier.c);
    const double upsilon = 2.0 * (carrier.f_c * t.radial_velocity() / carrier.c);
    const double four_pi = 4.0 * kPi;
    const double gamma2 = t.rcs * carrier.c * carrier.c /
                          (four_pi * four_pi * four_pi * carrier.f_c * carrier.f_c * d * d * d * d);
    return make_path(eta, upsilon, std::sqrt(gamma2), phase, t.angle(), grid);
}

DDPath sensing_path_from_target(const Target& t, const CarrierConfig& carrier, const DDGrid& grid,
                                Rng& rng) {
    return sensing_path_from_target(t, carrier, grid, uniform_phase(rng));
}

DDFrame apply_dd_channel(const DDFrame& x, const std::vector<DDPath>& paths, cd composite_gain) {
    const DDGrid& g = x.grid();
    CMatrix y = CMatrix::Zero(g.M, g.N);
    const CMatrix& in = x.symbols();
    for (const DDPath& p : paths) {
        if (p.l < 0 || p.l >= g.M || p.k < 0 || p.k >= g.N) {
            throw std::invalid_argument("apply_dd_channel: path index out of grid");
        }
        for (int k = 0; k < g.N; ++k) {
            const int src_k = (k - p.k + g.N) % g.N;
            for (int l = 0; l < g.M; ++l) {
                y(l, k) += p.gain * in((l - p.l + g.M) % g.M, src_k);
            }
        }
    }
    y *= composite_gain;
    return DDFrame(g, std::move(y));
}

DDFrame add_awgn(const DDFrame& x, double n0, Rng& rng) {
    if (n0 < 0.0 || std::isnan(n0)) {
        throw std::invalid_argument("add_awgn: noise power must be non-negative");
    }
    if (n0 == 0.0) return x;
    std::normal_distribution<double> gauss(0.0, std::sqrt(n0 / 2.0));
    CMatrix y = x.symbols();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        y(i) += cd(re, im);
    }
    return DDFrame(x.grid(), std::move(y));
}

cd composite_gain(double tx_angle_steered, double true_angle, double rx_beam_angle,
                  const ArrayConfig& arrays, double power, Link link) {
    const CVector f = std::sqrt(power / arrays.n_tx) * steering_vector(tx_angle_steered, arrays.n_tx);
    const cd tx = steering_vector(true_angle, arrays.n_tx).dot(f);  // a^H f
    if (link == Link::Sensing) {
        const CVector b = steering_vector(rx_beam_angle, arrays.n_rx);
        return b.dot(steering_vector(true_angle, arrays.n_rx)) * tx;
    }
    const CVector u = steering_vector(rx_beam_angle, arrays.n_ue) / std::sqrt(double(arrays.n_ue));
    return u.dot(steering_vector(true_angle, arrays.n_ue)) * tx;
}

}  // namespace otfsisac
