#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "otfsisac/channel.hpp"
#include "otfsisac/metrics.hpp"
#include "otfsisac/modem.hpp"
#include "otfsisac/tracking.hpp"

using namespace otfsisac;

TEST_CASE("localize and predict_angle invert each other") {
    Rng rng(31);
    std::uniform_real_distribution<double> eta(1e-7, 1e-4), th(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const double e = eta(rng), t = th(rng);
        const Vec2 p = localize(e, t);
        CHECK(std::abs(predict_angle(p) - t) < 1e-12);
        CHECK(2.0 * p.norm() / kSpeedOfLight == Catch::Approx(e).epsilon(1e-12));
    }
    CHECK_THROWS_AS(predict_angle(Vec2::Zero()), std::invalid_argument);
}

TEST_CASE("velocity from Doppler along a known heading") {
    const CarrierConfig c;
    Target t;
    t.position = Vec2(300.0, 900.0);
    t.velocity = Vec2(-4.0, -11.0);
    const Vec2 heading = t.velocity.normalized();
    const double phi = 2.0 * c.f_c * t.radial_velocity() / c.c;
    const Vec2 v = estimate_velocity(phi, t.angle(), c.f_c, c.c, heading);
    CHECK((v - t.velocity).norm() < 1e-9);

    const Vec2 across(std::cos(t.angle()), -std::sin(t.angle()));
    CHECK_THROWS_AS(estimate_velocity(phi, t.angle(), c.f_c, c.c, across), std::domain_error);
    CHECK_THROWS_AS(estimate_velocity(phi, t.angle(), c.f_c, c.c, Vec2(2.0, 0.0)), std::invalid_argument);
}

TEST_CASE("constant-velocity prediction advances position and carrier phase") {
    const CarrierConfig c;
    const TrackState s = TrackState::at(Vec2(100.0, 1000.0), Vec2(3.0, -4.0), 2, 0.5);
    const TrackState n = predict_state(s, 0.01, c);
    CHECK((n.position - Vec2(100.03, 999.96)).norm() < 1e-12);
    CHECK(n.block_index == 3);
    CHECK(n.range == Catch::Approx(n.position.norm()));
    const double dd = n.position.norm() - s.position.norm();
    CHECK(n.phase == Catch::Approx(0.5 - 2 * kPi * c.f_c * dd / c.c));
    CHECK_THROWS_AS(predict_state(s, 0.0, c), std::invalid_argument);
}

TEST_CASE("predicted channel agrees with the true channel at the predicted state") {
    const CarrierConfig c;
    const DDGrid g(128, 20, 6e3);
    Target t;
    t.position = Vec2(-250.0, 1400.0);
    t.velocity = Vec2(5.0, -20.0);
    const TrackState s = TrackState::at(t.position, t.velocity, 0, 1.1);
    const DDPath a = predict_channel(s, c, g);
    const DDPath b = comm_path_from_target(t, c, g, 1.1);
    CHECK(a.l == b.l);
    CHECK(a.k == b.k);
    CHECK(std::abs(a.gain - b.gain) < 1e-15);
}

TEST_CASE("precompensation undoes a correctly predicted channel") {
    Rng rng(32);
    const DDGrid g(16, 8, 15e3);
    const DDFrame x(g, oracle::random_matrix(16, 8, rng));
    const DDPath p{5, 3, std::polar(0.2, 2.0)};
    const DDFrame y = apply_dd_channel(precompensate(x, p), {p}, 1.0);
    CHECK((y.symbols() - 0.2 * x.symbols()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(precompensate(x, p).energy() == Catch::Approx(x.energy()));
    DDPath bad = p;
    bad.k = 8;
    CHECK_THROWS_AS(precompensate(x, bad), std::invalid_argument);
}

TEST_CASE("reflector ML fix reproduces noiseless geometry") {
    const Vec2 truth(420.0, 1300.0);
    const double d = truth.norm();
    const double th = std::atan2(truth.x(), truth.y());
    const std::vector<double> delays(4, 2.0 * d / kSpeedOfLight), angles(4, th);
    const ReflectorFix f = locate_reflector_ml(delays, angles, 1e-8);
    CHECK((f.position - truth).norm() < 1e-6);
}

TEST_CASE("reflector ML fix minimizes the weighted cost") {
    Rng rng(33);
    const Vec2 truth(-300.0, 900.0);
    std::normal_distribution<double> dn(0.0, 5e-9), an(0.0, 0.01);
    std::vector<double> delays, angles;
    for (int t = 0; t < 6; ++t) {
        delays.push_back(2.0 * truth.norm() / kSpeedOfLight + dn(rng));
        angles.push_back(std::atan2(truth.x(), truth.y()) + an(rng));
    }
    const double sigma = 5e-9;
    const ReflectorFix f = locate_reflector_ml(delays, angles, sigma);
    auto cost = [&](const Vec2& p) {
        double acc = 0.0;
        for (std::size_t t = 0; t < delays.size(); ++t) {
            const double er = delays[t] - 2.0 * p.norm() / kSpeedOfLight;
            const double ex = 2.0 * (p.x() * std::cos(angles[t]) - p.y() * std::sin(angles[t])) / kSpeedOfLight;
            acc += (er * er + ex * ex) / (sigma * sigma);
        }
        return acc;
    };
    CHECK(f.residual == Catch::Approx(cost(f.position)));
    // Brute-force neighbourhood search cannot find anything lower.
    for (double dx = -2.0; dx <= 2.0; dx += 0.25)
        for (double dy = -2.0; dy <= 2.0; dy += 0.25) CHECK(cost(f.position + Vec2(dx, dy)) >= f.residual - 1e-9);
    CHECK_THROWS_AS(locate_reflector_ml({}, {}, 1.0), std::invalid_argument);
}

TEST_CASE("localization examples") {
    const double c = kSpeedOfLight;
    CHECK((localize(2 * 700.0 / c, 0.0, c) - Vec2(0.0, 700.0)).norm() < 1e-9);
    CHECK((localize(2 * 1000.0 / c, kPi / 6, c) - Vec2(500.0, 866.0254)).norm() < 1e-3);
    CHECK(localize(0.0, 0.7, c).norm() == 0.0);
    CHECK(predict_angle(Vec2(0.0, 50.0)) == 0.0);
    CHECK(predict_angle(Vec2(50.0, 0.0)) == Catch::Approx(kPi / 2));
}

TEST_CASE("velocity examples") {
    const CarrierConfig c;
    const double theta = 0.3;
    const Vec2 r(-std::sin(theta), -std::cos(theta));
    const double phi = 2 * c.f_c * 12.0 / c.c;
    CHECK((estimate_velocity(phi, theta, c.f_c, c.c, r) - 12.0 * r).norm() < 1e-9);
    CHECK(estimate_velocity(0.0, theta, c.f_c, c.c, r).norm() == 0.0);
    const Eigen::Rotation2Dd rot(kPi / 4);
    const Vec2 h45 = rot * r;
    const double phi10 = 2 * c.f_c * 10.0 / c.c;
    CHECK(estimate_velocity(phi10, theta, c.f_c, c.c, h45).norm() == Catch::Approx(14.142).epsilon(1e-4));
}

TEST_CASE("prediction examples") {
    const TrackState still = TrackState::at(Vec2(30.0, 400.0), Vec2::Zero(), 4, 0.2);
    const TrackState n = predict_state(still, 0.5);
    CHECK(n.position == still.position);
    CHECK(n.phase == still.phase);
    CHECK(n.block_index == 5);

    const TrackState s = TrackState::at(Vec2(0.0, 100.0), Vec2(10.0, 0.0));
    const TrackState p = predict_state(s, 1.0);
    CHECK((p.position - Vec2(10.0, 100.0)).norm() < 1e-12);
    CHECK(predict_angle(p.position) * 180 / kPi == Catch::Approx(5.71).epsilon(1e-3));
    const TrackState half = predict_state(predict_state(s, 0.5), 0.5);
    CHECK((half.position - p.position).norm() < 1e-12);
    CHECK(half.phase == Catch::Approx(p.phase).margin(1e-9));
}

TEST_CASE("predicted channel examples") {
    const CarrierConfig c;
    const DDGrid g(128, 20, 6e3);
    const TrackState s = TrackState::at(Vec2(200.0, 1500.0), Vec2::Zero(), 0, 0.4);
    const DDPath now = predict_channel(s, c, g);
    const DDPath next = predict_channel(predict_state(s, g.block_duration(), c), c, g);
    CHECK(now.l == next.l);
    CHECK(now.k == next.k);
    CHECK(now.gain == next.gain);

    // 10-15 m/s targets move at most 15 m/s * N T per block, far below a 390 m delay bin.
    CHECK(15.0 * g.block_duration() <= 0.05 + 1e-12);
    Rng rng(34);
    std::uniform_real_distribution<double> speed(10.0, 15.0), ang(-1.0, 1.0), range(200.0, 5000.0);
    int differ = 0;
    for (int i = 0; i < 2000; ++i) {
        const double th = ang(rng);
        // keep the delay at least 1 m away from a rounding boundary
        double d = range(rng);
        const double bin = c.c / (g.M * g.delta_f);
        const double frac = d / bin - std::floor(d / bin);
        if (std::abs(frac - 0.5) < 1.0 / bin) d += 2.0;
        Target t;
        t.position = d * Vec2(std::sin(th), std::cos(th));
        t.velocity = speed(rng) * Vec2(std::cos(3.0 * th), std::sin(3.0 * th));
        const TrackState now_s = TrackState::at(t.position, t.velocity);
        const DDPath pred = predict_channel(predict_state(now_s, g.block_duration(), c), c, g);
        Target moved = t;
        moved.position += t.velocity * g.block_duration();
        differ += pred.l != comm_path_from_target(moved, c, g, 0.0).l || pred.l != comm_path_from_target(t, c, g, 0.0).l;
    }
    CHECK(differ == 0);
}

TEST_CASE("predicted downlink Doppler is half the sensing Doppler") {
    const CarrierConfig c;
    const DDGrid g(128, 20, 6e3);
    Rng rng(35);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const TrackState s = TrackState::at(Vec2(2000 * u(rng), 500 + 2000 * std::abs(u(rng))), Vec2(30 * u(rng), 30 * u(rng)));
        const TrackState n = predict_state(s, g.block_duration(), c);
        Target t;
        t.position = n.position;
        t.velocity = n.velocity;
        CHECK(sensing_path_from_target(t, c, g, 0.0).nu == 2.0 * predict_channel(n, c, g).nu);
    }
}

TEST_CASE("precompensation examples") {
    Rng rng(36);
    const DDGrid g(8, 4, 15e3);
    const DDFrame x(g, oracle::random_matrix(8, 4, rng));
    CHECK(precompensate(x, DDPath{0, 0, cd(2.0, 0.0)}).symbols() == x.symbols());
    const DDPath p{3, 1, std::polar(0.5, -1.0)};
    const cd gc = std::polar(40.0, 0.6);
    const DDFrame y = apply_dd_channel(precompensate(x, p, gc), {p}, gc);
    CHECK((y.symbols() - 20.0 * x.symbols()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reflector ML examples") {
    const double c = kSpeedOfLight;
    const double eta = 2 * 1234.5 / c, th = 0.35;
    const std::vector<double> d1{eta}, a1{th};
    CHECK((locate_reflector_ml(d1, a1, 1e-8, c).position - localize(eta, th, c)).norm() < 1e-9);
    const std::vector<double> d100(100, eta), a100(100, th);
    const ReflectorFix f = locate_reflector_ml(d100, a100, 1e-8, c);
    CHECK((f.position - localize(eta, th, c)).norm() < 1e-9);
    CHECK(f.iterations == 1);
}

TEST_CASE("reflector ML error shrinks as one over root t") {
    const double c = kSpeedOfLight, sigma = 10e-9, th = -0.25;
    const Vec2 truth = 1500.0 * Vec2(std::sin(th), std::cos(th));
    Rng rng(37);
    std::normal_distribution<double> n(0.0, sigma);
    auto rmse = [&](int count) {
        double acc = 0.0;
        const int runs = 300;
        for (int r = 0; r < runs; ++r) {
            std::vector<double> d(count), a(count, th);
            for (auto& v : d) v = 2 * truth.norm() / c + n(rng);
            acc += (locate_reflector_ml(d, a, sigma, c).position - truth).squaredNorm();
        }
        return std::sqrt(acc / runs);
    };
    const double ratio = rmse(1000) / rmse(10);
    CHECK(ratio == Catch::Approx(0.1).epsilon(0.3));
}
