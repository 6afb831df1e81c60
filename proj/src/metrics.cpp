#include "otfsisac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otfsisac/modem.hpp"

namespace otfsisac {

CMatrix dd_channel_matrix(const std::vector<DDPath>& paths, cd g, const DDGrid& grid) {
    const int mn = grid.size();
    CMatrix H = CMatrix::Zero(mn, mn);
    for (const DDPath& p : paths) {
        for (int k = 0; k < grid.N; ++k) {
            for (int l = 0; l < grid.M; ++l) {
                const int row = grid.index((l + p.l) % grid.M, (k + p.k) % grid.N);
                H(row, grid.index(l, k)) += g * p.gain;
            }
        }
    }
    return H;
}

CMatrix tf_channel_response(const std::vector<DDPath>& paths, cd g, const DDGrid& grid) {
    CMatrix h = CMatrix::Zero(grid.M, grid.N);
    for (const DDPath& p : paths) {
        for (int n = 0; n < grid.N; ++n) {
            for (int m = 0; m < grid.M; ++m) {
                const double ph = 2.0 * kPi * (double(n) * p.k / grid.N - double(m) * p.l / grid.M);
                h(m, n) += p.gain * std::polar(1.0, ph);
            }
        }
    }
    return g * h;
}

double capacity(const std::vector<DDPath>& paths, cd g, std::span<const double> r_x, double n0,
                const DDGrid& grid) {
    if (!(n0 > 0.0)) {
        throw std::invalid_argument("capacity: n0 must be positive");
    }
    if (static_cast<int>(r_x.size()) != grid.size()) {
        throw std::invalid_argument("capacity: allocation length must equal M*N");
    }
    const CMatrix H = dd_channel_matrix(paths, g, grid);
    Eigen::VectorXd r(r_x.size());
    for (std::size_t i = 0; i < r_x.size(); ++i) r(i) = r_x[i];
    CMatrix A = H * r.cast<cd>().asDiagonal() * H.adjoint() / n0;
    A += CMatrix::Identity(grid.size(), grid.size());
    // A is Hermitian positive definite; log det = 2 sum log diag(L).
    Eigen::LLT<CMatrix> llt(A);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("capacity: Cholesky factorization failed");
    }
    const CMatrix& L = llt.matrixLLT();
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) acc += std::log2(L(i, i).real());
    return 2.0 * acc;
}

double capacity_eigenmode(const std::vector<DDPath>& paths, cd g, std::span<const double> w,
                          double n0, const DDGrid& grid) {
    if (!(n0 > 0.0)) {
        throw std::invalid_argument("capacity: n0 must be positive");
    }
    if (static_cast<int>(w.size()) != grid.size()) {
        throw std::invalid_argument("capacity: allocation length must equal M*N");
    }
    const CMatrix h = tf_channel_response(paths, g, grid);
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) acc += std::log2(1.0 + w[i] * std::norm(h(i)) / n0);
    return acc;
}

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size()) {
        throw std::invalid_argument("ber: length mismatch");
    }
    if (tx.empty()) {
        throw std::invalid_argument("ber: empty bit streams");
    }
    std::size_t errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) errors += (tx[i] != 0) != (rx[i] != 0);
    return static_cast<double>(errors) / static_cast<double>(tx.size());
}

DDFrame bpsk_map(std::span<const std::uint8_t> bits, const DDGrid& grid, double p) {
    if (static_cast<int>(bits.size()) != grid.size()) {
        throw std::invalid_argument("bpsk_map: bit count must equal M*N");
    }
    const double a = std::sqrt(p);
    CMatrix s(grid.M, grid.N);
    for (int i = 0; i < grid.size(); ++i) s(i) = bits[i] ? -a : a;
    return DDFrame(grid, std::move(s));
}

Bits bpsk_demap(const DDFrame& frame, double phase) {
    const CMatrix& s = frame.symbols();
    const cd derotate = std::polar(1.0, -phase);
    Bits out(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = (s(i) * derotate).real() < 0.0 ? 1 : 0;
    return out;
}

CrossCorrelation cross_correlation(std::span<const CMatrix> comm_draws, std::span<const CMatrix> sens_draws) {
    if (comm_draws.empty() || comm_draws.size() != sens_draws.size()) {
        throw std::invalid_argument("cross_correlation: need equal, nonzero draw counts");
    }
    const Eigen::Index n = comm_draws.front().rows();
    CrossCorrelation out;
    out.r = CMatrix::Zero(n, n);
    for (std::size_t d = 0; d < comm_draws.size(); ++d) {
        const CMatrix& hc = comm_draws[d];
        const CMatrix& hs = sens_draws[d];
        if (hc.rows() != n || hc.cols() != n || hs.rows() != n || hs.cols() != n) {
            throw std::invalid_argument("cross_correlation: dimension mismatch");
        }
        out.r.noalias() += hc * hs.adjoint();
    }
    out.r /= static_cast<double>(comm_draws.size());
    const Eigen::MatrixXd mag = out.r.cwiseAbs();
    double score = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        score = std::min(score, 2.0 * mag(i, i) - mag.row(i).sum());
    }
    out.dominance = score;
    return out;
}

}  // namespace otfsisac
