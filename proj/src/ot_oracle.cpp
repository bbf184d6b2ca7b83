#include "crowdflow/ot_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace crowdflow {

void DiscreteMeasure::validate() const {
    require(points.size() == weights.size(), "points/weights size mismatch");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, "weights must be nonnegative");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "weights must sum to 1 within 1e-12");
}

DiscreteMeasure DiscreteMeasure::from_density(const GridDensity& rho) {
    DiscreteMeasure m;
    m.points.reserve(rho.n());
    m.weights.reserve(rho.n());
    for (int i = 0; i < rho.n(); ++i) {
        m.points.push_back({rho.grid.center(i), 0.0});
        m.weights.push_back(rho.values[i] * rho.h());
    }
    // absorb discretization dust into the heaviest cell
    double total = 0.0;
    for (double w : m.weights) total += w;
    auto it = std::max_element(m.weights.begin(), m.weights.end());
    *it += 1.0 - total;
    return m;
}

namespace {

struct FlowProblem {
    int ns = 0, nt = 0;
    std::vector<double> supply, demand;
    // cost(k, l) callable
    std::vector<std::array<double, 2>> src, dst;
    int p = 2;
    bool has_slack = false;  // last source is the zero-cost slack

    double cost(int k, int l) const {
        if (has_slack && k == ns - 1) return 0.0;
        double dx = src[k][0] - dst[l][0];
        double dy = src[k][1] - dst[l][1];
        double d2 = dx * dx + dy * dy;
        return p == 2 ? d2 : std::sqrt(d2);
    }
};

// Successive shortest paths with potentials on the dense bipartite graph.
// Reduced costs stay nonnegative, so Dijkstra applies after the zero-cost
// initialization (costs themselves are nonnegative).
TransportPlan min_cost_transport(const FlowProblem& fp) {
    const int ns = fp.ns, nt = fp.nt, N = ns + nt;
    require(N <= 2 * kOracleMaxPoints, "oracle instance too large");
    std::vector<double> rem_s = fp.supply, rem_t = fp.demand;
    std::vector<double> pot(N, 0.0);  // potentials: sources [0,ns), sinks [ns,N)
    std::map<std::pair<int, int>, double> flow;

    const double INF = std::numeric_limits<double>::infinity();
    double total_left = 0.0;
    for (double v : rem_s) total_left += v;

    std::vector<double> dist(N);
    std::vector<int> parent(N);
    std::vector<char> done(N);

    long iterations = 0;
    const long max_iterations = 50L * N + 100;
    while (total_left > 1e-13) {
        if (++iterations > max_iterations) {
            if (total_left <= 1e-9) break;  // leftover dust, marginals audit it
            throw NumericalFailure("min-cost flow failed to converge");
        }
        // Dijkstra over the residual graph with reduced costs.
        std::fill(dist.begin(), dist.end(), INF);
        std::fill(parent.begin(), parent.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (int k = 0; k < ns; ++k) {
            if (rem_s[k] > 0.0) dist[k] = 0.0;
        }
        int reached_sink = -1;
        for (int iter = 0; iter < N; ++iter) {
            int u = -1;
            double best = INF;
            for (int v = 0; v < N; ++v) {
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    u = v;
                }
            }
            if (u < 0) break;
            done[u] = 1;
            if (u >= ns) {
                if (rem_t[u - ns] > 0.0 && reached_sink < 0) reached_sink = u;
                // backward edges: sink -> source where flow > 0
                int l = u - ns;
                for (int k = 0; k < ns; ++k) {
                    auto it = flow.find({k, l});
                    if (it == flow.end() || it->second <= 1e-15 || done[k]) continue;
                    double rc = -fp.cost(k, l) - pot[u] + pot[k];
                    double nd = dist[u] + rc;
                    if (nd < dist[k] - 1e-15) {
                        dist[k] = nd;
                        parent[k] = u;
                    }
                }
            } else {
                for (int l = 0; l < nt; ++l) {
                    int v = ns + l;
                    if (done[v]) continue;
                    double rc = fp.cost(u, l) - pot[u] + pot[v];
                    double nd = dist[u] + rc;
                    if (nd < dist[v] - 1e-15) {
                        dist[v] = nd;
                        parent[v] = u;
                    }
                }
            }
        }
        require(reached_sink >= 0, "transport problem infeasible");
        // Update potentials and collect the augmenting path.
        for (int v = 0; v < N; ++v) {
            if (dist[v] < INF) pot[v] -= std::min(dist[v], dist[reached_sink]);
        }
        double push = rem_t[reached_sink - ns];
        std::vector<int> path;
        for (int v = reached_sink; v >= 0; v = parent[v]) path.push_back(v);
        std::reverse(path.begin(), path.end());
        push = std::min(push, rem_s[path.front()]);
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            int u = path[i], v = path[i + 1];
            if (u < ns) continue;  // forward edge has unlimited capacity
            push = std::min(push, flow[{v, u - ns}]);
        }
        for (size_t i = 0; i + 1 < path.size(); ++i) {
            int u = path[i], v = path[i + 1];
            if (u < ns) {
                flow[{u, v - ns}] += push;
            } else {
                flow[{v, u - ns}] -= push;
            }
        }
        rem_s[path.front()] -= push;
        rem_t[reached_sink - ns] -= push;
        total_left -= push;
    }

    TransportPlan plan;
    plan.row_marginal.assign(ns, 0.0);
    plan.col_marginal.assign(nt, 0.0);
    double dual_res = 0.0;
    for (const auto& [kl, amount] : flow) {
        if (amount <= 1e-15) continue;
        auto [k, l] = kl;
        plan.entries.push_back({k, l, amount});
        plan.row_marginal[k] += amount;
        plan.col_marginal[l] += amount;
        plan.cost += amount * fp.cost(k, l);
        // complementary slackness on supported entries
        dual_res = std::max(dual_res, std::abs(fp.cost(k, l) - pot[k] + pot[ns + l]));
    }
    // dual feasibility on all edges
    for (int k = 0; k < ns; ++k) {
        for (int l = 0; l < nt; ++l) {
            double slack = fp.cost(k, l) - pot[k] + pot[ns + l];
            if (slack < 0.0) dual_res = std::max(dual_res, -slack);
        }
    }
    plan.dual_residual = dual_res;
    return plan;
}

}  // namespace

TransportPlan solve_ot(const DiscreteMeasure& a, const DiscreteMeasure& b, int p) {
    a.validate();
    b.validate();
    require(p == 1 || p == 2, "solve_ot supports p in {1,2}");
    require(static_cast<int>(a.points.size() + b.points.size()) <= kOracleMaxPoints,
            "instance exceeds the oracle size cap");
    FlowProblem fp;
    fp.ns = static_cast<int>(a.points.size());
    fp.nt = static_cast<int>(b.points.size());
    fp.supply = a.weights;
    fp.demand = b.weights;
    fp.src = a.points;
    fp.dst = b.points;
    fp.p = p;
    return min_cost_transport(fp);
}

DiscreteMeasure lp_project(const DiscreteMeasure& mu, const std::vector<double>& cap) {
    mu.validate();
    require(cap.size() == mu.points.size(), "one capacity per support point");
    require(static_cast<int>(mu.points.size()) <= kOracleMaxPoints / 2 - 1,
            "instance exceeds the oracle size cap");
    double cap_total = 0.0;
    for (double c : cap) {
        require(c >= 0.0, "capacities must be nonnegative");
        cap_total += c;
    }
    require(cap_total >= 1.0 - 1e-12, "capacities cannot hold unit mass");

    FlowProblem fp;
    fp.ns = static_cast<int>(mu.points.size()) + 1;
    fp.nt = static_cast<int>(mu.points.size());
    fp.supply = mu.weights;
    fp.supply.push_back(cap_total - 1.0);
    fp.demand = cap;
    fp.src = mu.points;
    fp.src.push_back({0.0, 0.0});
    fp.dst = mu.points;
    fp.p = 2;
    fp.has_slack = true;
    TransportPlan plan = min_cost_transport(fp);

    DiscreteMeasure out;
    out.points = mu.points;
    out.weights.assign(mu.points.size(), 0.0);
    for (const auto& e : plan.entries) {
        if (e.from == fp.ns - 1) continue;  // slack flow = unused capacity
        out.weights[e.to] += e.amount;
    }
    double total = 0.0;
    for (double w : out.weights) total += w;
    if (total > 0.0) {
        for (double& w : out.weights) w /= total;
    }
    return out;
}

}  // namespace crowdflow
