#pragma once

#include <vector>

#include "otfsisac/channel.hpp"
#include "otfsisac/grid.hpp"

// Capacity-maximizing power allocation under a sensing CRB constraint and an
// average-power constraint.
//
// The allocation lives on the channel eigenmodes, which for a delay-Doppler
// channel are the time-frequency bins (index m + M n). A frame with
// per-bin powers w is x_DD = SFFT(sqrt(w) .* s) for unit-modulus symbols s.
// Under that parameterization capacity is sum log2(1 + w |H_TF|^2 / n0) and
// the channel-vector CRB is n0/g^2 sum 1/(MN w), which uniform power
// minimizes.
namespace otfsisac {

struct DesignResult {
    std::vector<double> power_allocation;
    double achieved_capacity = 0.0;
    double achieved_crb = 0.0;
    /// Weight on the uniform allocation: (1 - blend) * waterfill + blend * uniform.
    double blend = 0.0;
    bool feasible = true;
};

/// Water-filling over parallel channels with gains |H|^2 / n0. Returns
/// powers summing to total_power; all-zero gains fall back to uniform.
std::vector<double> water_filling(const std::vector<double>& gains, double total_power);

/// Draws a unit-modulus (QPSK) time-frequency frame with the given per-bin
/// powers and returns its delay-Doppler preimage.
DDFrame frame_with_allocation(const std::vector<double>& w, const DDGrid& grid, Rng& rng);

/// Monte-Carlo CRB of an allocation: crb_h averaged over random frames.
/// Rank-deficient frames give +inf.
double allocation_crb(const std::vector<double>& w, const DDGrid& grid, double g, double n0,
                      int frames, Rng& rng);

/// Solves max capacity s.t. CRB <= t_crb, mean(w) == p_total, by blending the
/// water-filling and uniform allocations with the smallest feasible weight on
/// uniform (bisection to 1e-4; 32-point scan if the CRB is seen to be
/// non-monotone in the blend). Throws "T_CRB infeasible at this power" when
/// the uniform allocation still violates the bound.
DesignResult design_allocation(const std::vector<DDPath>& paths, cd g, double n0, double p_total,
                               double t_crb, int frames_for_crb, Rng& rng, const DDGrid& grid);

}  // namespace otfsisac
