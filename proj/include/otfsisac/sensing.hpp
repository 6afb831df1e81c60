#pragma once

#include <span>
#include <vector>

#include "otfsisac/grid.hpp"

namespace otfsisac {

/// Output of one sensing stage for a single beam.
struct SensingEstimate {
    CVector h_hat;
    int l_hat = 0;
    int k_hat = 0;
    double theta_hat = 0.0;
    /// l_hat / (M delta_f), seconds.
    double eta_hat = 0.0;
    /// signed k_hat / (N T), Hz.
    double phi_hat = 0.0;
    double peak_magnitude = 0.0;
};

struct Peak {
    int l = 0;
    int k = 0;
    cd gain;
};

struct BeamEnergy {
    double angle = 0.0;
    double energy = 0.0;
};

/// X^H r, computed as a 2D circular cross-correlation via FFT.
DDVector matched_filter(const DDVector& r, const DDFrame& x);

/// LMMSE channel estimate for r = g X h + w with iid prior variance per tap:
/// (G^H G + (n0/prior_var) I)^{-1} G^H r, G = g X. prior_var may be +inf,
/// which gives the least-squares (ML) estimate. X is 2D circulant, so the
/// solve is diagonal in the 2D Fourier domain.
DDVector lmmse_estimate(const DDVector& r, const DDFrame& x, double n0, double prior_var, cd g);

/// Least-squares (ML) estimate, the prior_var -> inf limit of lmmse_estimate.
DDVector ml_estimate(const DDVector& r, const DDFrame& x, cd g);

/// Largest-magnitude entry; ties go to the smallest linear index.
Peak peak_pick(const DDVector& h_hat);

/// Beam angle with the largest energy; ties go to the first entry.
double estimate_angle_beamsweep(std::span<const BeamEnergy> sweep);

/// Uniform angle grid [min, max] with the given step, radians.
std::vector<double> angle_grid(double min_rad, double max_rad, double step_rad);

/// Cramer-Rao bound on the channel vector for r = g X h + w, w ~ CN(0, n0 I):
/// Tr[(g^2/n0 X^H X)^{-1}], the summed per-tap error variance.
double crb_h(const DDFrame& x, double n0, double g);

/// Assembles an estimate from a channel-vector estimate and an angle.
SensingEstimate make_estimate(const DDVector& h_hat, double theta_hat);

}  // namespace otfsisac
