#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "otfsisac/channel.hpp"
#include "otfsisac/modem.hpp"
#include "otfsisac/sensing.hpp"

using namespace otfsisac;

namespace {

DDFrame random_frame(const DDGrid& g, Rng& rng) { return DDFrame(g, oracle::random_matrix(g.M, g.N, rng)); }

}  // namespace

TEST_CASE("matched filter is X^H r") {
    Rng rng(21);
    const DDGrid g(6, 4, 15e3);
    const DDFrame x = random_frame(g, rng);
    const DDVector r(g, oracle::random_matrix(g.size(), 1, rng));
    const CVector dense = oracle::x_matrix(x.symbols()).adjoint() * r.data;
    CHECK((matched_filter(r, x).data - dense).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ml and lmmse match the dense normal equations") {
    Rng rng(22);
    const DDGrid g(4, 3, 15e3);
    const DDFrame x = random_frame(g, rng);
    const DDVector r(g, oracle::random_matrix(g.size(), 1, rng));
    const cd gc(1.3, 0.4);
    const CMatrix X = oracle::x_matrix(x.symbols());
    const CMatrix G = gc * X;
    const CVector ls = (G.adjoint() * G).inverse() * G.adjoint() * r.data;
    CHECK((ml_estimate(r, x, gc).data - ls).cwiseAbs().maxCoeff() < 1e-10);

    const double n0 = 0.3, prior = 2.0;
    const CMatrix A = G.adjoint() * G + (n0 / prior) * CMatrix::Identity(g.size(), g.size());
    const CVector mmse = A.inverse() * G.adjoint() * r.data;
    CHECK((lmmse_estimate(r, x, n0, prior, gc).data - mmse).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("noiseless ml estimate recovers the channel exactly") {
    Rng rng(23);
    const DDGrid g(16, 8, 15e3);
    const DDFrame x = random_frame(g, rng);
    const std::vector<DDPath> paths{{3, 2, cd(0.5, 0.2)}, {7, 5, cd(-0.1, 0.3)}};
    const DDVector est = ml_estimate(vectorize(apply_dd_channel(x, paths, 2.0)), x, 2.0);
    CVector h = CVector::Zero(g.size());
    for (const auto& p : paths) h(g.index(p.l, p.k)) = p.gain;
    CHECK((est.data - h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("crb_h matches dense inversion and the finite-difference Fisher bound") {
    Rng rng(24);
    const DDGrid g(4, 2, 15e3);
    const DDFrame x = random_frame(g, rng);
    const double n0 = 0.2, gain = 1.7;
    const double crb = crb_h(x, n0, gain);
    CHECK(crb == Catch::Approx(oracle::crb_dense(x.symbols(), n0, gain)).epsilon(1e-10));
    CHECK(crb == Catch::Approx(oracle::crb_finite_difference(x.symbols(), n0, gain)).epsilon(1e-6));
}

TEST_CASE("ml estimate is efficient") {
    Rng rng(25);
    const DDGrid g(8, 4, 15e3);
    const DDFrame x = random_frame(g, rng);
    const double n0 = 0.5;
    const std::vector<DDPath> paths{{1, 1, cd(1.0, 0.0)}};
    const DDFrame clean = apply_dd_channel(x, paths, 1.0);
    CVector h = CVector::Zero(g.size());
    h(g.index(1, 1)) = 1.0;
    double mse = 0.0;
    const int trials = 4000;
    for (int t = 0; t < trials; ++t) {
        const DDVector est = ml_estimate(vectorize(add_awgn(clean, n0, rng)), x, 1.0);
        mse += (est.data - h).squaredNorm();
    }
    CHECK(mse / trials == Catch::Approx(crb_h(x, n0, 1.0)).epsilon(0.06));
}

TEST_CASE("rank-deficient probes are rejected") {
    const DDGrid g(4, 2, 15e3);
    const DDFrame ones(g, CMatrix::Ones(4, 2));
    CHECK_THROWS_WITH(crb_h(ones, 1.0, 1.0), "rank deficient");
    CHECK_THROWS_WITH(ml_estimate(vectorize(ones), ones, 1.0), "rank deficient");
    CHECK_NOTHROW(lmmse_estimate(vectorize(ones), ones, 1.0, 1.0, 1.0));
}

TEST_CASE("peak picking") {
    const DDGrid g(4, 3, 15e3);
    DDVector h(g);
    CHECK_THROWS_WITH(peak_pick(h), "no peak");
    h.data(g.index(2, 1)) = cd(0.0, -3.0);
    h.data(g.index(1, 2)) = cd(3.0, 0.0);
    const Peak p = peak_pick(h);
    CHECK(p.l == 2);
    CHECK(p.k == 1);
    CHECK(p.gain == cd(0.0, -3.0));
}

TEST_CASE("beam sweep and angle grid") {
    const auto grid = angle_grid(-0.5, 0.5, 0.25);
    REQUIRE(grid.size() == 5);
    CHECK(grid.back() == Catch::Approx(0.5));
    std::vector<BeamEnergy> sweep{{-0.1, 1.0}, {0.0, 4.0}, {0.1, 4.0}};
    CHECK(estimate_angle_beamsweep(sweep) == 0.0);
    CHECK_THROWS_AS(estimate_angle_beamsweep({}), std::invalid_argument);
    CHECK_THROWS_AS(angle_grid(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("estimate converts indices to delay and signed Doppler") {
    const DDGrid g(16, 8, 10e3);
    DDVector h(g);
    h.data(g.index(5, 6)) = 1.0;
    const SensingEstimate e = make_estimate(h, 0.2);
    CHECK(e.l_hat == 5);
    CHECK(e.k_hat == 6);
    CHECK(e.eta_hat == Catch::Approx(5.0 / (16 * 10e3)));
    CHECK(e.phi_hat == Catch::Approx(-2.0 * 10e3 / 8));
    CHECK(e.theta_hat == 0.2);
}

TEST_CASE("grid mismatch is an error") {
    const DDGrid a(4, 2, 15e3), b(4, 4, 15e3);
    CHECK_THROWS_WITH(matched_filter(DDVector(a), DDFrame(b)), "grid mismatch");
}

TEST_CASE("matched filter examples") {
    Rng rng(26);
    const DDGrid g(8, 4, 15e3);
    DDFrame x(g, oracle::random_matrix(8, 4, rng));
    x = DDFrame(g, x.symbols() / x.symbols().norm());
    CHECK(matched_filter(DDVector(g), x).data.isZero());

    const DDPath p{5, 2, cd(0.6, -0.8)};
    const DDVector r = vectorize(apply_dd_channel(x, {p}, 1.0));
    const DDVector mf = matched_filter(r, x);
    CVector h = CVector::Zero(g.size());
    h(g.index(5, 2)) = p.gain;
    const CMatrix X = oracle::x_matrix(x.symbols());
    CHECK((mf.data - X.adjoint() * X * h).cwiseAbs().maxCoeff() < 1e-12);
    const Peak pk = peak_pick(mf);
    CHECK(pk.l == 5);
    CHECK(pk.k == 2);
    CHECK(std::abs(pk.gain - p.gain) < 1e-12);  // unit-energy frame

    const DDVector noisy(g, r.data + 0.05 * oracle::random_matrix(g.size(), 1, rng));
    const Peak base = peak_pick(matched_filter(noisy, x));
    for (cd a : {cd(3.0, 0.0), cd(1e-3, 0.0), std::polar(1.0, 2.2), std::polar(7.0, -0.4)}) {
        const Peak q = peak_pick(matched_filter(DDVector(g, a * noisy.data), x));
        CHECK(q.l == base.l);
        CHECK(q.k == base.k);
    }
}

TEST_CASE("lmmse examples") {
    Rng rng(27);
    const DDGrid g(4, 4, 15e3);
    const DDFrame x(g, oracle::random_matrix(4, 4, rng));
    const std::vector<DDPath> paths{{1, 3, cd(0.2, 0.9)}, {2, 2, cd(-0.3, 0.0)}};
    const DDVector r = vectorize(apply_dd_channel(x, paths, 1.5));
    CVector h = CVector::Zero(g.size());
    for (const auto& p : paths) h(g.index(p.l, p.k)) = p.gain;
    CHECK((lmmse_estimate(r, x, 0.0, std::numeric_limits<double>::infinity(), 1.5).data - h).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((lmmse_estimate(r, x, 1e-6, 1e12, 1.5).data - h).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(lmmse_estimate(DDVector(g), x, 0.1, 1.0, 1.0).data.isZero());
    double last = std::numeric_limits<double>::infinity();
    for (double ratio : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
        const double norm = lmmse_estimate(r, x, ratio, 1.0, 1.5).data.norm();
        CHECK(norm < last);
        last = norm;
    }
}

TEST_CASE("peak picking examples") {
    const DDGrid g(4, 3, 15e3);
    DDVector h(g);
    h.data(7) = 1.0;
    CHECK(peak_pick(h).l == 3);
    CHECK(peak_pick(h).k == 1);
    DDVector t(g);
    t.data(2) = 2.0;
    t.data(9) = cd(0.0, 2.0);
    CHECK(peak_pick(t).l == 2);
    CHECK(peak_pick(t).k == 0);
}

TEST_CASE("beam sweep examples") {
    const ArrayConfig arr{64, 64, 4};
    const double truth = 20.0 * kPi / 180.0, step = kPi / 180.0;
    std::vector<BeamEnergy> sweep;
    for (double a : angle_grid(-kPi / 3, kPi / 3, step)) sweep.push_back({a, std::norm(composite_gain(truth, truth, a, arr, 1.0))});
    CHECK(std::abs(estimate_angle_beamsweep(sweep) - truth) <= step);
    const std::vector<BeamEnergy> one{{0.4, 0.0}};
    CHECK(estimate_angle_beamsweep(one) == 0.4);
    const std::vector<BeamEnergy> flat{{-0.2, 1.0}, {0.0, 1.0}, {0.2, 1.0}};
    CHECK(estimate_angle_beamsweep(flat) == -0.2);
}

TEST_CASE("crb examples") {
    const DDGrid g(4, 2, 15e3);
    DDFrame x(g);
    x(0, 0) = std::sqrt(3.0);  // X = sqrt(E) I with E = 3
    CHECK(crb_h(x, 0.2, 1.5) == Catch::Approx(8 * 0.2 / (1.5 * 1.5 * 3.0)));
    Rng rng(28);
    const DDFrame y(g, oracle::random_matrix(4, 2, rng));
    CHECK(crb_h(y, 0.2, 3.0) == Catch::Approx(crb_h(y, 0.2, 1.5) / 4.0));
}
