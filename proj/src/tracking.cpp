#include "otfsisac/tracking.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "otfsisac/modem.hpp"

namespace otfsisac {

TrackState TrackState::at(const Vec2& position, const Vec2& velocity, int block_index, double phase) {
    TrackState s;
    s.position = position;
    s.velocity = velocity;
    s.range = position.norm();
    s.angle = std::atan2(position.x(), position.y());
    s.block_index = block_index;
    s.phase = phase;
    return s;
}

Vec2 localize(double eta_hat, double theta_hat, double c) {
    const double r = c * eta_hat / 2.0;
    return Vec2(r * std::sin(theta_hat), r * std::cos(theta_hat));
}

Vec2 estimate_velocity(double phi_hat, double theta_hat, double f_c, double c, const Vec2& heading) {
    if (std::abs(heading.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("estimate_velocity: heading must be a unit vector");
    }
    const Vec2 los(-std::sin(theta_hat), -std::cos(theta_hat));
    const double proj = heading.dot(los);
    if (std::abs(proj) < 0.1) {
        throw std::domain_error("unobservable geometry");
    }
    const double v_r = c * phi_hat / (2.0 * f_c);
    return (v_r / proj) * heading;
}

TrackState predict_state(const TrackState& s, double delta_t, const CarrierConfig& carrier) {
    if (!(delta_t > 0.0)) {
        throw std::invalid_argument("predict_state: delta_t must be positive");
    }
    TrackState out = TrackState::at(s.position + s.velocity * delta_t, s.velocity, s.block_index + 1);
    out.phase = s.phase - 2.0 * kPi * carrier.f_c * (out.range - s.position.norm()) / carrier.c;
    return out;
}

double predict_angle(const Vec2& p_tilde) {
    if (p_tilde.x() == 0.0 && p_tilde.y() == 0.0) {
        throw std::invalid_argument("predict_angle: position at origin");
    }
    return std::atan2(p_tilde.x(), p_tilde.y());
}

DDPath predict_channel(const TrackState& s, const CarrierConfig& carrier, const DDGrid& grid) {
    Target t;
    t.position = s.position;
    t.velocity = s.velocity;
    return comm_path_from_target(t, carrier, grid, s.phase);
}

DDFrame precompensate(const DDFrame& x, const DDPath& predicted) {
    const DDGrid& g = x.grid();
    if (predicted.l < 0 || predicted.l >= g.M || predicted.k < 0 || predicted.k >= g.N) {
        throw std::invalid_argument("precompensate: predicted index out of grid");
    }
    DDFrame out = circular_shift(x, -predicted.l, -predicted.k);
    const double mag = std::abs(predicted.gain);
    if (mag > 0.0) {
        const cd derotate = std::conj(predicted.gain) / mag;
        return DDFrame(g, out.symbols() * derotate);
    }
    return out;
}

DDFrame precompensate(const DDFrame& x, const DDPath& predicted, cd g_comp) {
    DDPath p = predicted;
    p.gain *= g_comp;
    return precompensate(x, p);
}

ReflectorFix locate_reflector_ml(std::span<const double> delays, std::span<const double> angles,
                                 double sigma, double c) {
    if (delays.empty() || delays.size() != angles.size()) {
        throw std::invalid_argument("locate_reflector_ml: need matching, nonempty measurements");
    }
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("locate_reflector_ml: sigma must be positive");
    }
    const std::size_t n = delays.size();
    const double w = 1.0 / (sigma * sigma);

    auto cost = [&](const Vec2& p) {
        double acc = 0.0;
        const double d = p.norm();
        for (std::size_t t = 0; t < n; ++t) {
            const Vec2 normal(std::cos(angles[t]), -std::sin(angles[t]));
            const double er = delays[t] - 2.0 * d / c;
            const double ex = 2.0 * p.dot(normal) / c;
            acc += w * (er * er + ex * ex);
        }
        return acc;
    };

    ReflectorFix fix;
    fix.position = localize(delays[0], angles[0], c);
    for (int it = 1; it <= 50; ++it) {
        const Vec2 p = fix.position;
        const double d = p.norm();
        if (d == 0.0) {
            throw std::runtime_error("locate_reflector_ml: iterate reached the origin");
        }
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Vec2 jtr = Vec2::Zero();
        const Vec2 dr = (2.0 / c) * p / d;
        for (std::size_t t = 0; t < n; ++t) {
            const Vec2 normal(std::cos(angles[t]), -std::sin(angles[t]));
            const double er = delays[t] - 2.0 * d / c;
            const double ex = -2.0 * p.dot(normal) / c;
            // residuals are er and ex; their gradients are -dr and -(2/c) normal
            const Vec2 gx = (2.0 / c) * normal;
            jtj += w * (dr * dr.transpose() + gx * gx.transpose());
            jtr += w * (dr * er + gx * ex);
        }
        const Vec2 step = jtj.ldlt().solve(jtr);
        fix.position = p + step;
        fix.iterations = it;
        if (step.norm() < 1e-9) {
            fix.residual = cost(fix.position);
            return fix;
        }
    }
    std::ostringstream msg;
    msg << "locate_reflector_ml: no convergence after 50 iterations, weighted residual "
        << cost(fix.position);
    throw std::runtime_error(msg.str());
}

}  // namespace otfsisac
