#include <cmath>
#include <random>

#include "crowdflow/functionals.hpp"
#include "crowdflow/ot_oracle.hpp"
#include "crowdflow/transport.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace crowdflow;
using cf_test::random_density;

namespace {
Grid igrid(int n, double len = 2.0) { return Grid(Domain(DomainKind::interval, len), n); }

double plan_l1_marginal_error(const TransportPlan& plan, const DiscreteMeasure& a,
                              const DiscreteMeasure& b) {
    double e = 0.0;
    for (size_t k = 0; k < a.weights.size(); ++k) {
        e = std::max(e, std::abs(plan.row_marginal[k] - a.weights[k]));
    }
    for (size_t l = 0; l < b.weights.size(); ++l) {
        e = std::max(e, std::abs(plan.col_marginal[l] - b.weights[l]));
    }
    return e;
}
}  // namespace

TEST_CASE("identical measures transport at zero cost") {
    DiscreteMeasure a;
    a.points = {{0.0, 0.0}, {1.0, 0.0}, {1.5, 0.5}};
    a.weights = {0.25, 0.5, 0.25};
    TransportPlan plan = solve_ot(a, a, 2);
    CHECK(plan.cost == doctest::Approx(0.0));
    CHECK(plan.dual_residual <= 1e-9);
    CHECK(plan_l1_marginal_error(plan, a, a) <= 1e-10);
}

TEST_CASE("two-point instance by hand") {
    DiscreteMeasure a, b;
    a.points = {{0.0, 0.0}, {1.0, 0.0}};
    a.weights = {0.5, 0.5};
    b.points = {{0.5, 0.0}};
    b.weights = {1.0};
    TransportPlan plan = solve_ot(a, b, 2);
    CHECK(plan.cost == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(plan.dual_residual <= 1e-9);
    TransportPlan plan1 = solve_ot(a, b, 1);
    CHECK(plan1.cost == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("oracle agrees with the quantile W_p on 1D instances") {
    std::mt19937_64 rng(101);
    for (int n : {16, 32, 64}) {
        Grid g = igrid(n);
        for (int t = 0; t < 6; ++t) {
            GridDensity r1 = random_density(g, rng);
            GridDensity r2 = random_density(g, rng);
            DiscreteMeasure a = DiscreteMeasure::from_density(r1);
            DiscreteMeasure b = DiscreteMeasure::from_density(r2);
            for (int p : {1, 2}) {
                TransportPlan plan = solve_ot(a, b, p);
                CHECK(plan.dual_residual <= 1e-9);
                CHECK(plan_l1_marginal_error(plan, a, b) <= 1e-10);
                double w = wasserstein(r1, r2, p);
                double oracle = p == 2 ? std::sqrt(plan.cost) : plan.cost;
                CHECK(std::abs(oracle - w) <= 2.0 * g.h * g.domain.length);
            }
        }
    }
}

TEST_CASE("block pair cost matches 1/12 at n = 64") {
    Grid g = igrid(64);
    GridDensity half = make_density(g, PresetProfile::block(0, 0.5, 2));
    GridDensity ind = make_density(g, PresetProfile::block(0, 1, 1));
    TransportPlan plan = solve_ot(DiscreteMeasure::from_density(half),
                                  DiscreteMeasure::from_density(ind), 2);
    CHECK(std::abs(plan.cost - 1.0 / 12.0) <= 2.0 * g.h);
}

TEST_CASE("size cap is enforced") {
    DiscreteMeasure a;
    for (int i = 0; i < 3000; ++i) {
        a.points.push_back({i * 0.001, 0.0});
        a.weights.push_back(1.0 / 3000);
    }
    double total = 0.0;
    for (double w : a.weights) total += w;
    a.weights[0] += 1.0 - total;
    CHECK_THROWS_AS(solve_ot(a, a, 2), ContractViolation);
}

TEST_CASE("lp_project leaves feasible measures unchanged") {
    Grid g = igrid(32);
    GridDensity rho = make_density(g, PresetProfile::uniform());
    DiscreteMeasure mu = DiscreteMeasure::from_density(rho);
    std::vector<double> cap(32, g.h);  // density cap 1
    DiscreteMeasure out = lp_project(mu, cap);
    for (int i = 0; i < 32; ++i) {
        CHECK(out.weights[i] == doctest::Approx(mu.weights[i]).epsilon(1e-10));
    }
}

TEST_CASE("lp_project of the half block saturates [0,1]") {
    Grid g = igrid(64);
    GridDensity half = make_density(g, PresetProfile::block(0, 0.5, 2));
    DiscreteMeasure mu = DiscreteMeasure::from_density(half);
    std::vector<double> cap(64, g.h);
    DiscreteMeasure out = lp_project(mu, cap);
    GridDensity ind = make_density(g, PresetProfile::block(0, 1, 1));
    double l1 = 0.0;
    for (int i = 0; i < 64; ++i) l1 += std::abs(out.weights[i] - ind.values[i] * g.h);
    CHECK(l1 <= 2.0 * g.h);
}

TEST_CASE("lp_project saturation dichotomy and idempotence") {
    Grid g = igrid(48);
    GridDensity tri = make_density(g, PresetProfile::triangle(1.0, 1.2));
    DiscreteMeasure mu = DiscreteMeasure::from_density(tri);
    std::vector<double> cap(48, g.h);
    DiscreteMeasure out = lp_project(mu, cap);
    // each cell is saturated or untouched, except the straddle cells at the
    // free boundaries of each saturated run (at most two per run)
    int fractional = 0, runs = 0;
    bool in_run = false;
    for (int i = 0; i < 48; ++i) {
        double sat = cap[i] - out.weights[i];
        double same = std::abs(out.weights[i] - mu.weights[i]);
        if (std::min(sat, same) > 1e-8) ++fractional;
        bool saturated = sat <= 1e-8;
        if (saturated && !in_run) ++runs;
        in_run = saturated;
    }
    CHECK(runs >= 1);
    CHECK(fractional <= 2 * runs);
    DiscreteMeasure again = lp_project(out, cap);
    double l1 = 0.0;
    for (int i = 0; i < 48; ++i) l1 += std::abs(again.weights[i] - out.weights[i]);
    CHECK(l1 <= 1e-10);
}

TEST_CASE("lp_project rejects infeasible capacities") {
    Grid g = igrid(16);
    DiscreteMeasure mu = DiscreteMeasure::from_density(make_density(g, PresetProfile::uniform()));
    std::vector<double> cap(16, 0.01);  // total 0.16 < 1
    CHECK_THROWS_AS(lp_project(mu, cap), ContractViolation);
}

TEST_CASE("random lp_project instances stay within capacity") {
    std::mt19937_64 rng(7);
    Grid g = igrid(24);
    std::uniform_real_distribution<double> unif(0.5, 3.0);
    for (int t = 0; t < 10; ++t) {
        GridDensity rho = random_density(g, rng);
        DiscreteMeasure mu = DiscreteMeasure::from_density(rho);
        std::vector<double> cap(24);
        for (double& c : cap) c = unif(rng) * g.h;
        double total = 0.0;
        for (double c : cap) total += c;
        if (total < 1.05) continue;
        DiscreteMeasure out = lp_project(mu, cap);
        double m = 0.0;
        for (int i = 0; i < 24; ++i) {
            CHECK(out.weights[i] <= cap[i] + 1e-10);
            m += out.weights[i];
        }
        CHECK(m == doctest::Approx(1.0).epsilon(1e-10));
    }
}
