// Wasserstein-2 projection onto the congested set {rho <= 1}: exact 1D
// algorithm in quantile coordinates (isotonic regression + box clamp),
// pressure recovery on the saturated zone, and the saturation audit.
#pragma once

#include <vector>

#include "crowdflow/quantile.hpp"

namespace crowdflow {

struct PressureField {
    Grid grid;
    std::vector<double> values;  // p_i >= 0, supported on the saturated zone

    double max() const;
    // sum p_i (1 - rho_i) h; vanishes where the constraint binds.
    double complementarity(const GridDensity& rho) const;
};

// Saturated s-range spliced into the projected quantile: the line c + s on
// [s_lo, s_hi] (slope one, density one).
struct SaturatedRange {
    double s_lo = 0.0, s_hi = 0.0;
    double offset = 0.0;  // x = offset + s on the range
};

struct ProjectionResult {
    GridDensity projected;
    PressureField pressure;
    std::vector<char> saturated;        // per-cell mask B
    std::vector<double> displacement;   // dg_j = g_in(s_j) - g_out(s_j), M samples
    double w2_moved = 0.0;              // (sum dg^2 ds)^(1/2)
    std::vector<SaturatedRange> ranges; // quantile-space saturation structure
};

// Projects a quantile onto the cone {g' >= 1, g(0) >= 0, g(1) <= length}.
// Sample values g_j solve the least-squares cone program exactly (pool
// adjacent violators on g_j - s_j, then clamp to [0, length - 1]); between
// samples the input is kept wherever no pool touched it, so feasible inputs
// pass through unchanged.
QuantileFn cone_project_quantile(const QuantileFn& g);
QuantileFn cone_project_quantile(const QuantileFn& g, std::vector<SaturatedRange>& ranges);

// Full projection onto K = {rho <= 1}: density, pressure (for the step size
// tau), mask, displacement. tau only scales the recovered pressure.
ProjectionResult project_K(const GridDensity& mu, double tau = 1.0);

// Pressure whose gradient matches the optimal displacement / tau, integrated
// inward from the free boundaries of each saturated component (p = 0 where
// rho < 1) and zero-clamped against roundoff. Significantly negative values
// signal a non-optimal map and raise NumericalFailure.
PressureField recover_pressure(const ProjectionResult& result, const GridDensity& input,
                               double tau);

// Mask B = {rho* >= 1 - 1e-8} plus the dichotomy audit: every projected cell
// must equal 1 or the input value within 1e-8, allowing at most two
// straddling cells per saturated component.
std::vector<char> saturation_set(const GridDensity& projected, const GridDensity& input,
                                 const std::vector<SaturatedRange>& ranges);

}  // namespace crowdflow
