// Exact piecewise-linear quantile functions (inverse CDFs) of grid
// densities. All 1D transport in this project runs through this type:
// distances, geodesics and projections become closed-form segment
// arithmetic on quantiles, so no quadrature tolerance enters downstream.
#pragma once

#include <vector>

#include "crowdflow/grid.hpp"

namespace crowdflow {

// Nondecreasing piecewise-linear function g: [0,1] -> R.
//
// Breakpoints (s_k, x_k) with s_0 = 0, s_K = 1. Repeated s-values encode a
// jump (empty region of the density); the function value at a jump follows
// the inf convention (left value). For circle domains the values live on a
// lift of the fundamental domain with total increase <= length.
//
// `sample_count` (M) is the resolution used by consumers that work on
// uniform midpoint samples g_j = g((j+1/2)/M), e.g. the cone projection.
struct QuantileFn {
    Domain domain;
    int sample_count = 0;
    std::vector<double> s;
    std::vector<double> x;

    int knots() const { return static_cast<int>(s.size()); }

    // One-sided evaluation (identical except at jump breakpoints).
    double eval_left(double sv) const;
    double eval_right(double sv) const;
    double operator()(double sv) const { return eval_left(sv); }

    // Uniform midpoint samples g_j at s_j = (j+1/2)/M.
    std::vector<double> samples() const;
    double sample_s(int j) const { return (j + 0.5) / sample_count; }

    void validate() const;  // throws ContractViolation on broken monotonicity
};

// Exact inverse CDF of a grid density. M >= grid.n is required.
QuantileFn to_quantile(const GridDensity& rho, int M);
QuantileFn to_quantile(const GridDensity& rho);  // M = 4n

// Exact pushforward of Lebesgue on [0,1] through g, cell-averaged on the
// grid. Round trip from_quantile(to_quantile(rho), rho.grid) reproduces rho
// exactly (up to roundoff) for any grid density.
GridDensity from_quantile(const QuantileFn& g, const Grid& grid);

// Builds the piecewise-linear interpolant through midpoint samples,
// extended to s in {0,1} by the first/last chord and clamped so values stay
// inside the domain. Used where an operation is defined samplewise.
QuantileFn quantile_from_samples(const Domain& domain, const std::vector<double>& samples);

// Merged-breakpoint view of two quantiles on the same domain: strictly
// increasing s-grid such that both functions are linear inside every
// interval. Jump knots contribute interval endpoints only.
std::vector<double> merged_breakpoints(const QuantileFn& a, const QuantileFn& b);

}  // namespace crowdflow
