#include "otfsisac/modem.hpp"

#include <cmath>
#include <stdexcept>

#include "fft.hpp"

namespace otfsisac {

TFFrame isfft(const DDFrame& frame) {
    const DDGrid& g = frame.grid();
    CMatrix a = frame.symbols();
    fft::columns(a, -1);
    fft::rows(a, +1);
    a /= std::sqrt(static_cast<double>(g.size()));
    return TFFrame(g, std::move(a));
}

DDFrame sfft(const TFFrame& frame) {
    const DDGrid& g = frame.grid();
    CMatrix a = frame.samples();
    fft::columns(a, +1);
    fft::rows(a, -1);
    a /= std::sqrt(static_cast<double>(g.size()));
    return DDFrame(g, std::move(a));
}

CVector heisenberg(const TFFrame& frame, Pulse pulse) {
    if (pulse != Pulse::Rectangular) {
        throw std::invalid_argument("unsupported pulse");
    }
    const DDGrid& g = frame.grid();
    CMatrix a = frame.samples();
    fft::columns(a, +1);
    a /= std::sqrt(static_cast<double>(g.M));
    return Eigen::Map<const CVector>(a.data(), a.size());
}

TFFrame wigner(const CVector& samples, const DDGrid& grid, Pulse pulse) {
    if (pulse != Pulse::Rectangular) {
        throw std::invalid_argument("unsupported pulse");
    }
    if (samples.size() != grid.size()) {
        throw std::invalid_argument("wigner: sample count must equal M*N");
    }
    CMatrix a = Eigen::Map<const CMatrix>(samples.data(), grid.M, grid.N);
    fft::columns(a, -1);
    a /= std::sqrt(static_cast<double>(grid.M));
    return TFFrame(grid, std::move(a));
}

DDVector vectorize(const DDFrame& frame) {
    // Column-major storage already is the delay-fastest order.
    const CMatrix& s = frame.symbols();
    return DDVector(frame.grid(), Eigen::Map<const CVector>(s.data(), s.size()));
}

DDFrame devectorize(const DDVector& vec) {
    const DDGrid& g = vec.grid;
    return DDFrame(g, Eigen::Map<const CMatrix>(vec.data.data(), g.M, g.N));
}

DDFrame circular_shift(const DDFrame& frame, int dl, int dk) {
    const DDGrid& g = frame.grid();
    const int sl = ((dl % g.M) + g.M) % g.M;
    const int sk = ((dk % g.N) + g.N) % g.N;
    CMatrix out(g.M, g.N);
    const CMatrix& x = frame.symbols();
    for (int k = 0; k < g.N; ++k) {
        const int src_k = (k - sk + g.N) % g.N;
        for (int l = 0; l < g.M; ++l) {
            out(l, k) = x((l - sl + g.M) % g.M, src_k);
        }
    }
    return DDFrame(g, std::move(out));
}

CMatrix build_x_matrix(const DDFrame& frame) {
    const DDGrid& g = frame.grid();
    const int mn = g.size();
    CMatrix X(mn, mn);
    for (int kp = 0; kp < g.N; ++kp) {
        for (int lp = 0; lp < g.M; ++lp) {
            const DDFrame shifted = circular_shift(frame, lp, kp);
            X.col(g.index(lp, kp)) = Eigen::Map<const CVector>(shifted.symbols().data(), mn);
        }
    }
    return X;
}

}  // namespace otfsisac
