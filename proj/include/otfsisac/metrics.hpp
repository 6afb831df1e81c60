#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "otfsisac/channel.hpp"
#include "otfsisac/grid.hpp"

namespace otfsisac {

using Bits = std::vector<std::uint8_t>;

/// Dense MN x MN matrix of the delay-Doppler channel g * sum_p h_p S_p,
/// where S_p is the 2D circular shift by (l_p, k_p).
CMatrix dd_channel_matrix(const std::vector<DDPath>& paths, cd g, const DDGrid& grid);

/// Per time-frequency bin channel response, H_TF[m,n] =
/// g sum_p h_p exp(-j2pi m l_p / M) exp(+j2pi n k_p / N). These are the
/// eigenvalues of the delay-Doppler channel; the eigenvectors are the
/// ISFFT basis frames.
CMatrix tf_channel_response(const std::vector<DDPath>& paths, cd g, const DDGrid& grid);

/// log2 det(I + H R_x H^H / n0), R_x = diag(r_x) over delay-Doppler bins
/// (index l + M k). Dense; bits per frame.
double capacity(const std::vector<DDPath>& paths, cd g, std::span<const double> r_x, double n0,
                const DDGrid& grid);

/// Capacity with a per-eigenmode allocation (index m + M n over TF bins):
/// sum log2(1 + w_mn |H_TF[m,n]|^2 / n0).
double capacity_eigenmode(const std::vector<DDPath>& paths, cd g, std::span<const double> w,
                          double n0, const DDGrid& grid);

double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx);

/// 0 -> +sqrt(p), 1 -> -sqrt(p), bit i on vector index i = l + M k.
DDFrame bpsk_map(std::span<const std::uint8_t> bits, const DDGrid& grid, double p = 1.0);

/// Sign of the real part after derotation by exp(-j phase).
Bits bpsk_demap(const DDFrame& frame, double phase = 0.0);

struct CrossCorrelation {
    CMatrix r;
    /// min_i (|R_ii| - sum_{j != i} |R_ij|); positive means diagonally dominant.
    double dominance = 0.0;
};

/// Sample mean of H_c H_s^H over paired draws.
CrossCorrelation cross_correlation(std::span<const CMatrix> comm_draws, std::span<const CMatrix> sens_draws);

}  // namespace otfsisac
