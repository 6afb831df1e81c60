#pragma once

#include "otfsisac/grid.hpp"

// Discrete OTFS transforms between the delay-Doppler, time-frequency and
// time domains. Both 2D transforms carry a symmetric 1/sqrt(MN) factor so
// that the ISFFT/SFFT pair is unitary.
namespace otfsisac {

enum class Pulse { Rectangular, RaisedCosine };

/// Delay-Doppler to time-frequency:
/// X_TF[m,n] = 1/sqrt(MN) sum_{l,k} X_DD[l,k] exp(j2pi(nk/N - ml/M)).
TFFrame isfft(const DDFrame& frame);

/// Exact inverse of isfft.
DDFrame sfft(const TFFrame& frame);

/// Multicarrier modulation without cyclic prefix: slot n occupies samples
/// [nM, nM+M-1], each an M-point unitary inverse DFT of column n.
/// Only Pulse::Rectangular is supported.
CVector heisenberg(const TFFrame& frame, Pulse pulse = Pulse::Rectangular);

/// Receiver dual of heisenberg. Throws if samples.size() != M*N.
TFFrame wigner(const CVector& samples, const DDGrid& grid, Pulse pulse = Pulse::Rectangular);

DDVector vectorize(const DDFrame& frame);
DDFrame devectorize(const DDVector& vec);

/// Y[l,k] = X[(l - dl) mod M, (k - dk) mod N].
DDFrame circular_shift(const DDFrame& frame, int dl, int dk);

/// MN x MN matrix realizing the 2D circular convolution with the frame:
/// entry [(l + Mk), (l' + Mk')] = X_DD[(l-l') mod M, (k-k') mod N].
/// Dense; intended for small grids and as a test oracle.
CMatrix build_x_matrix(const DDFrame& frame);

}  // namespace otfsisac
