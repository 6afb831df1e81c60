#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace otfsisac {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vec2 = Eigen::Vector2d;
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 2.998e8;

/// Delay-Doppler grid: M delay bins, N Doppler bins, subcarrier spacing and
/// symbol duration. T * delta_f == 1 is enforced on construction.
struct DDGrid {
    int M = 0;
    int N = 0;
    double delta_f = 0.0;
    double T = 0.0;

    DDGrid() = default;
    /// T is derived as 1 / delta_f.
    DDGrid(int M, int N, double delta_f);
    DDGrid(int M, int N, double delta_f, double T);

    int size() const { return M * N; }
    double delay_resolution() const { return 1.0 / (M * delta_f); }
    double doppler_resolution() const { return 1.0 / (N * T); }
    /// One transmission block (frame) duration, N*T.
    double block_duration() const { return N * T; }

    /// Delay-fastest vector index: l + M*k.
    int index(int l, int k) const { return l + M * k; }
    int delay_of(int idx) const { return idx % M; }
    int doppler_of(int idx) const { return idx / M; }

    /// Maps Doppler indices above N/2 to negative values.
    int signed_doppler(int k) const { return k > N / 2 ? k - N : k; }

    bool operator==(const DDGrid& o) const {
        return M == o.M && N == o.N && delta_f == o.delta_f && T == o.T;
    }
};

/// Symbol grid in the delay-Doppler domain, entry (l, k).
class DDFrame {
public:
    explicit DDFrame(const DDGrid& grid);
    DDFrame(const DDGrid& grid, CMatrix symbols);

    const DDGrid& grid() const { return grid_; }
    const CMatrix& symbols() const { return symbols_; }

    cd operator()(int l, int k) const { return symbols_(l, k); }
    cd& operator()(int l, int k) { return symbols_(l, k); }

    double energy() const { return symbols_.squaredNorm(); }

private:
    DDGrid grid_;
    CMatrix symbols_;
};

/// Time-frequency grid, entry (m: subcarrier, n: time slot).
class TFFrame {
public:
    explicit TFFrame(const DDGrid& grid);
    TFFrame(const DDGrid& grid, CMatrix samples);

    const DDGrid& grid() const { return grid_; }
    const CMatrix& samples() const { return samples_; }

    cd operator()(int m, int n) const { return samples_(m, n); }
    cd& operator()(int m, int n) { return samples_(m, n); }

private:
    DDGrid grid_;
    CMatrix samples_;
};

/// Vectorized delay-Doppler quantity (r_DD, h_DD, ...), index l + M*k.
struct DDVector {
    DDGrid grid;
    CVector data;

    DDVector(const DDGrid& g, CVector d);
    explicit DDVector(const DDGrid& g) : DDVector(g, CVector::Zero(g.size())) {}
};

/// Integer rounding with halves away from zero, then wrapped to [0, n).
int quantize_index(double value, int n);

}  // namespace otfsisac
