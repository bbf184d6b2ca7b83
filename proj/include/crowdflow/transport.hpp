// Exact 1D optimal transport: W_1/W_2 distances, McCann interpolation,
// push-forward by monotone maps, Benamou-Brenier action of sampled curves.
#pragma once

#include <utility>
#include <vector>

#include "crowdflow/quantile.hpp"

namespace crowdflow {

// Monotone transport map sampled at the cell centers of the source grid.
struct TransportMap {
    Grid grid;                  // grid of the source density
    std::vector<double> values; // T(x_i) per cell center

    static TransportMap identity(const Grid& g);
    static TransportMap shift(const Grid& g, double c);
};

// W_p distance, p in {1,2}, evaluated exactly on the piecewise-linear
// quantiles (closed-form per-segment integrals). Circle domains minimize
// over the rotation offset of the cut: ternary search on the convex shift
// objective for p = 2, vertical CDF-median alignment for p = 1.
double wasserstein(const GridDensity& rho, const GridDensity& nu, int p);

// Constant-speed W_2 geodesic between rho and nu at time t in [0,1].
GridDensity mccann_interpolate(const GridDensity& rho, const GridDensity& nu, double t);

// Push-forward of rho through a nondecreasing map T via quantile
// composition g -> T o g. Throws if T decreases on the support of rho.
GridDensity displace(const GridDensity& rho, const TransportMap& T);

// Lower-bound discretization of twice the Benamou-Brenier action:
// sum_k W_2(rho_k, rho_{k+1})^2 / (t_{k+1} - t_k). Nondecreasing under
// refinement of the sample times (Cauchy-Schwarz).
double action_b2(const std::vector<std::pair<double, GridDensity>>& trajectory);

}  // namespace crowdflow
