// Scalar functionals on grid densities: mass, entropy, total variation,
// the graph-length functional, and constraint violation.
#pragma once

#include "crowdflow/grid.hpp"

namespace crowdflow {

double mass(const GridDensity& rho);

// sum rho_i log(rho_i) h with the convention 0 log 0 = 0.
double entropy(const GridDensity& rho);

// Sum of absolute jumps between adjacent cells. Interval domains count
// interior jumps only; circle domains include the wrap-around edge.
double total_variation(const GridDensity& rho);

// Discrete integral of sqrt(eps^2 + |rho'|^2): per edge
// sqrt(eps^2 h^2 + (rho_{i+1}-rho_i)^2), plus the flat eps-contribution of
// the two boundary half-cells on an interval so a constant density yields
// exactly eps * length. Reduces to total_variation at eps = 0.
double graph_length(const GridDensity& rho, double eps);

// max_i (rho_i - 1); negative when the density is strictly feasible.
double sup_violation(const GridDensity& rho);

double sup_norm(const GridDensity& rho);
double min_value(const GridDensity& rho);

// L1 distance between two densities on the same grid.
double l1_distance(const GridDensity& a, const GridDensity& b);

}  // namespace crowdflow
