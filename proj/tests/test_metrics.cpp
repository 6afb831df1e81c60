#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "otfsisac/channel.hpp"
#include "otfsisac/metrics.hpp"
#include "otfsisac/modem.hpp"

using namespace otfsisac;

TEST_CASE("dense capacity matches an LU log-determinant") {
    Rng rng(41);
    const DDGrid g(4, 3, 15e3);
    const std::vector<DDPath> paths{{0, 0, cd(1.0, 0.2)}, {2, 1, cd(-0.4, 0.5)}};
    std::uniform_real_distribution<double> u(0.1, 2.0);
    std::vector<double> r(g.size());
    for (auto& v : r) v = u(rng);
    const cd gc(0.8, -0.1);
    const double c = capacity(paths, gc, r, 0.3, g);
    CHECK(c == Catch::Approx(oracle::capacity_dense(dd_channel_matrix(paths, gc, g), r, 0.3)).epsilon(1e-10));
}

TEST_CASE("eigenmode capacity equals dense capacity under uniform power") {
    const DDGrid g(6, 4, 15e3);
    const std::vector<DDPath> paths{{1, 0, cd(0.7, 0.0)}, {3, 2, cd(0.1, -0.6)}, {5, 3, cd(0.2, 0.2)}};
    const std::vector<double> w(g.size(), 1.5);
    CHECK(capacity_eigenmode(paths, 1.0, w, 0.5, g) == Catch::Approx(capacity(paths, 1.0, w, 0.5, g)).epsilon(1e-10));
}

TEST_CASE("tf response diagonalizes the dd channel matrix") {
    const DDGrid g(4, 4, 15e3);
    const std::vector<DDPath> paths{{1, 3, cd(0.5, 0.5)}, {2, 0, cd(-1.0, 0.0)}};
    const CMatrix H = dd_channel_matrix(paths, 1.0, g);
    const CMatrix h = tf_channel_response(paths, 1.0, g);
    // Each TF basis function, mapped to DD by sfft, is an eigenvector of H.
    for (int i = 0; i < g.size(); ++i) {
        TFFrame e(g);
        e(g.delay_of(i), g.doppler_of(i)) = 1.0;
        const CVector v = vectorize(sfft(e)).data;
        CHECK((H * v - h(i) * v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("ber counts mismatches") {
    const Bits a{0, 1, 1, 0}, b{0, 0, 1, 1};
    CHECK(ber(a, b) == 0.5);
    CHECK_THROWS_AS(ber(a, Bits{0}), std::invalid_argument);
    CHECK_THROWS_AS(ber(Bits{}, Bits{}), std::invalid_argument);
}

TEST_CASE("bpsk mapping and demapping with a known phase") {
    const DDGrid g(4, 2, 15e3);
    const Bits bits{0, 1, 1, 0, 1, 0, 0, 1};
    const DDFrame x = bpsk_map(bits, g, 4.0);
    CHECK(x(1, 0) == cd(-2.0, 0.0));
    CHECK(x.energy() == Catch::Approx(32.0));
    const DDFrame rotated(g, x.symbols() * std::polar(1.0, 2.5));
    CHECK(bpsk_demap(rotated, 2.5) == bits);
    CHECK_THROWS_AS(bpsk_map(Bits{0, 1}, g), std::invalid_argument);
}

TEST_CASE("bpsk over awgn follows the Q-function") {
    const DDGrid g(128, 64, 15e3);
    Rng rng(42);
    std::uniform_int_distribution<int> bit(0, 1);
    for (double snr_db : {0.0, 4.0}) {
        const double gamma = std::pow(10.0, snr_db / 10.0);
        long long errors = 0, total = 0;
        for (int f = 0; f < 30; ++f) {
            Bits b(g.size());
            for (auto& v : b) v = static_cast<std::uint8_t>(bit(rng));
            const DDFrame y = add_awgn(bpsk_map(b, g), 1.0 / gamma, rng);
            const Bits r = bpsk_demap(y);
            for (std::size_t i = 0; i < b.size(); ++i) errors += b[i] != r[i];
            total += static_cast<long long>(b.size());
        }
        const double p = oracle::bpsk_ber(gamma);
        const double sd = std::sqrt(p * (1 - p) / total);
        CHECK(std::abs(double(errors) / total - p) < 4 * sd);
    }
}

TEST_CASE("cross correlation and diagonal dominance") {
    CMatrix a = CMatrix::Identity(2, 2), b = CMatrix::Identity(2, 2);
    std::vector<CMatrix> c{a}, s{b};
    auto r = cross_correlation(c, s);
    CHECK(r.dominance == Catch::Approx(1.0));
    a(0, 1) = 2.0;
    c = {a};
    r = cross_correlation(c, s);
    CHECK(r.r(0, 1) == cd(2.0, 0.0));
    CHECK(r.dominance == Catch::Approx(-1.0));
    CHECK_THROWS_AS(cross_correlation(c, std::vector<CMatrix>{}), std::invalid_argument);
}

TEST_CASE("capacity examples") {
    const DDGrid g(4, 2, 15e3);
    const std::vector<double> flat(8, 2.0);
    CHECK(capacity({DDPath{0, 0, 1.0}}, 1.0, flat, 0.5, g) == Catch::Approx(8 * std::log2(1 + 2.0 / 0.5)));
    const std::vector<double> r{0.1, 0.5, 1.0, 2.0, 0.0, 3.0, 0.7, 0.2};
    CHECK(capacity({DDPath{3, 1, 1.0}}, 1.0, r, 0.5, g) == Catch::Approx(capacity({DDPath{0, 0, 1.0}}, 1.0, r, 0.5, g)));

    const std::vector<DDPath> paths{{0, 0, cd(1.0, 0.3)}, {1, 1, cd(0.2, -0.5)}, {3, 0, cd(-0.4, 0.4)}};
    const CMatrix H = dd_channel_matrix(paths, 1.0, g);
    CMatrix D = CMatrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i) D(i, i) = r[i];
    const CMatrix A = CMatrix::Identity(8, 8) + H * D * H.adjoint() / 0.5;
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<CMatrix>(A).eigenvalues();
    double via_eig = 0.0;
    for (int i = 0; i < 8; ++i) via_eig += std::log2(ev(i));
    CHECK(capacity(paths, 1.0, r, 0.5, g) == Catch::Approx(via_eig).margin(1e-9));
    CHECK(oracle::capacity_dense(H, r, 0.5) == Catch::Approx(via_eig).margin(1e-9));
}

TEST_CASE("capacity grows with power and ignores DD shifts of the channel") {
    const DDGrid g(4, 4, 15e3);
    const std::vector<DDPath> paths{{0, 1, cd(0.8, 0.1)}, {2, 3, cd(0.1, 0.6)}};
    double last = 0.0;
    for (double p : {0.1, 0.5, 1.0, 4.0, 20.0}) {
        const double cap = capacity(paths, 1.0, std::vector<double>(16, p), 1.0, g);
        CHECK(cap > last);
        last = cap;
    }
    std::vector<DDPath> shifted = paths;
    for (auto& p : shifted) {
        p.l = (p.l + 3) % 4;
        p.k = (p.k + 2) % 4;
    }
    const std::vector<double> r{0.2, 1.0, 0.4, 2.0, 0.1, 0.9, 1.2, 0.3, 0.5, 0.5, 1.5, 0.8, 0.6, 1.1, 0.2, 0.9};
    CHECK(capacity(shifted, 1.0, r, 0.7, g) == Catch::Approx(capacity(paths, 1.0, r, 0.7, g)).epsilon(1e-12));
}

TEST_CASE("ber examples") {
    Bits a(1000, 0), b(1000, 1);
    CHECK(ber(a, a) == 0.0);
    CHECK(ber(a, b) == 1.0);
    Bits c = a;
    c[417] = 1;
    CHECK(ber(a, c) == 0.001);
}

TEST_CASE("bpsk examples") {
    const DDGrid g(4, 2, 15e3);
    const Bits zeros(8, 0);
    CHECK(bpsk_map(zeros, g).symbols() == CMatrix::Ones(4, 2));
    const Bits bits{1, 0, 0, 1, 1, 1, 0, 0};
    CHECK(bpsk_demap(bpsk_map(bits, g)) == bits);

    // 1e5 symbols at 5 dB against Q(sqrt(2 gamma)), three sigma.
    const DDGrid big(500, 200, 15e3);
    Rng rng(43);
    std::uniform_int_distribution<int> bit(0, 1);
    Bits tx(big.size());
    for (auto& v : tx) v = static_cast<std::uint8_t>(bit(rng));
    const double gamma = std::pow(10.0, 0.5);
    const Bits rx = bpsk_demap(add_awgn(bpsk_map(tx, big), 1.0 / gamma, rng));
    const double p = oracle::bpsk_ber(gamma);
    CHECK(std::abs(ber(tx, rx) - p) < 3 * std::sqrt(p * (1 - p) / tx.size()));
}

TEST_CASE("cross correlation of independent and shared-geometry draws") {
    const DDGrid g(2, 2, 15e3);
    Rng rng(44);
    std::vector<CMatrix> c, s;
    for (int d = 0; d < 10000; ++d) {
        c.push_back(oracle::random_matrix(4, 4, rng) / std::sqrt(2.0));
        s.push_back(oracle::random_matrix(4, 4, rng) / std::sqrt(2.0));
    }
    // Each entry averages 4 unit-variance products per draw.
    CHECK(cross_correlation(c, s).r.cwiseAbs().maxCoeff() <= 5.0 / std::sqrt(10000.0) * 2.0);

    std::uniform_int_distribution<int> L(0, 1), K(0, 1);
    std::uniform_real_distribution<double> ph(0.0, 2 * kPi);
    c.clear();
    s.clear();
    for (int d = 0; d < 2000; ++d) {
        const int l = L(rng), k = K(rng);
        const double phase = ph(rng);
        c.push_back(dd_channel_matrix({DDPath{l, k, std::polar(1.0, phase)}}, 1.0, g));
        s.push_back(dd_channel_matrix({DDPath{l, k, std::polar(0.3, phase + 0.8)}}, 1.0, g));
    }
    CHECK(cross_correlation(c, s).dominance > 0.0);
    CHECK_THROWS_AS(cross_correlation(std::vector<CMatrix>{}, std::vector<CMatrix>{}), std::invalid_argument);
}
