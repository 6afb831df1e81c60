#include "otfsisac/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace otfsisac {

namespace {

void check_dims(const DDGrid& g, const CMatrix& m, const char* what) {
    if (m.rows() != g.M || m.cols() != g.N) {
        throw std::invalid_argument(std::string(what) + ": dimensions do not match grid");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
}

}  // namespace

DDGrid::DDGrid(int M_, int N_, double delta_f_) : DDGrid(M_, N_, delta_f_, 1.0 / delta_f_) {}

DDGrid::DDGrid(int M_, int N_, double delta_f_, double T_) : M(M_), N(N_), delta_f(delta_f_), T(T_) {
    if (M <= 0 || N <= 0) {
        throw std::invalid_argument("DDGrid: M and N must be positive");
    }
    if (!(delta_f > 0.0) || !(T > 0.0) || !std::isfinite(delta_f) || !std::isfinite(T)) {
        throw std::invalid_argument("DDGrid: delta_f and T must be positive");
    }
    if (std::abs(T * delta_f - 1.0) > 1e-12) {
        throw std::invalid_argument("DDGrid: T * delta_f must equal 1");
    }
}

DDFrame::DDFrame(const DDGrid& grid) : grid_(grid), symbols_(CMatrix::Zero(grid.M, grid.N)) {}

DDFrame::DDFrame(const DDGrid& grid, CMatrix symbols) : grid_(grid), symbols_(std::move(symbols)) {
    check_dims(grid_, symbols_, "DDFrame");
}

TFFrame::TFFrame(const DDGrid& grid) : grid_(grid), samples_(CMatrix::Zero(grid.M, grid.N)) {}

TFFrame::TFFrame(const DDGrid& grid, CMatrix samples) : grid_(grid), samples_(std::move(samples)) {
    check_dims(grid_, samples_, "TFFrame");
}

DDVector::DDVector(const DDGrid& g, CVector d) : grid(g), data(std::move(d)) {
    if (data.size() != g.size()) {
        throw std::invalid_argument("DDVector: length must equal M*N");
    }
}

int quantize_index(double value, int n) {
    const long long r = std::llround(value);  // halves away from zero
    long long w = r % n;
    if (w < 0) w += n;
    return static_cast<int>(w);
}

}  // namespace otfsisac
