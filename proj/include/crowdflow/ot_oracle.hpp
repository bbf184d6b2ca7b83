// Exact discrete optimal transport on small instances, used as the
// independent brute-force oracle for W_p values and for the
// capacity-constrained projection. The only component that handles points
// in dimension 2 (at toy sizes).
#pragma once

#include <array>
#include <vector>

#include "crowdflow/common.hpp"
#include "crowdflow/grid.hpp"

namespace crowdflow {

struct DiscreteMeasure {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;  // nonnegative, sum 1 within 1e-12

    void validate() const;
    static DiscreteMeasure from_density(const GridDensity& rho);
};

struct PlanEntry {
    int from = 0, to = 0;
    double amount = 0.0;
};

struct TransportPlan {
    std::vector<PlanEntry> entries;  // gamma_{kl} > 0 only
    std::vector<double> row_marginal, col_marginal;
    double cost = 0.0;
    // max over supported entries of |c_kl - u_k - v_l| plus the worst dual
    // infeasibility; <= 1e-9 certifies optimality.
    double dual_residual = 0.0;
};

inline constexpr int kOracleMaxPoints = 4096;

// Exact optimal plan for cost |x-y|^p, p in {1,2}, via successive shortest
// paths with potentials; optimality audited through the final duals.
TransportPlan solve_ot(const DiscreteMeasure& a, const DiscreteMeasure& b, int p);

// Exact W_2 projection of mu onto the capacity polytope
// {b : 0 <= b_k <= cap_k, sum b = 1}: a transportation problem with a free
// target marginal, encoded by a slack source of mass sum(cap) - 1 wired to
// every target at zero cost.
DiscreteMeasure lp_project(const DiscreteMeasure& mu, const std::vector<double>& cap);

}  // namespace crowdflow
