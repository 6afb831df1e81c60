#pragma once

#include "otfsisac/grid.hpp"

// Thin FFTW wrapper over column-major M x N grids. All transforms are
// unnormalized and in place; sign -1 is the forward DFT.
namespace otfsisac::fft {

/// Length-M DFT down every column (delay axis).
void columns(CMatrix& a, int sign);
/// Length-N DFT along every row (Doppler axis).
void rows(CMatrix& a, int sign);
/// 2D DFT with the same sign on both axes.
void both(CMatrix& a, int sign);
/// Length-n DFT of a contiguous vector.
void vector(CVector& v, int sign);

}  // namespace otfsisac::fft
