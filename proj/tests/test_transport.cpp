#include <cmath>
#include <random>

#include "crowdflow/functionals.hpp"
#include "crowdflow/transport.hpp"
#include "doctest.h"
#include "test_helpers.hpp"

using namespace crowdflow;
using cf_test::random_density;

namespace {
Grid igrid(int n, double len = 2.0) { return Grid(Domain(DomainKind::interval, len), n); }

GridDensity indicator01(const Grid& g) { return make_density(g, PresetProfile::block(0, 1, 1)); }
}  // namespace

TEST_CASE("quantile of simple profiles") {
    Grid g = igrid(100);
    QuantileFn qu = to_quantile(make_density(g, PresetProfile::uniform()), 400);
    for (int j = 0; j < 400; ++j) {
        CHECK(qu.samples()[j] == doctest::Approx(2.0 * qu.sample_s(j)).epsilon(1e-13));
    }
    QuantileFn qb = to_quantile(make_density(g, PresetProfile::block(0, 0.5, 2)), 400);
    auto sb = qb.samples();
    for (int j = 0; j < 400; ++j) CHECK(sb[j] == doctest::Approx(qb.sample_s(j) / 2).epsilon(1e-13));
    QuantileFn qi = to_quantile(indicator01(g), 400);
    auto si = qi.samples();
    for (int j = 0; j < 400; ++j) CHECK(si[j] == doctest::Approx(qi.sample_s(j)).epsilon(1e-13));
}

TEST_CASE("round trip is exact for cell-aligned densities") {
    std::mt19937_64 rng(17);
    for (int n : {16, 50, 200}) {
        Grid g = igrid(n);
        for (int t = 0; t < 10; ++t) {
            GridDensity rho = random_density(g, rng);
            GridDensity back = from_quantile(to_quantile(rho, 4 * n), g);
            CHECK(l1_distance(rho, back) <= 1e-10);
        }
    }
    // circle domain too
    Grid gc(Domain(DomainKind::circle, 2.0), 64);
    for (int t = 0; t < 5; ++t) {
        GridDensity rho = random_density(gc, rng);
        CHECK(l1_distance(rho, from_quantile(to_quantile(rho), gc)) <= 1e-10);
    }
}

TEST_CASE("quantile round trip with zero-density gaps") {
    Grid g = igrid(40);
    std::vector<double> v(40, 0.0);
    v[3] = 2.0;
    v[4] = 1.0;
    v[20] = 0.5;
    v[21] = 0.5;
    v[39] = 3.0;
    GridDensity rho = make_density(g, PresetProfile::tabulated(v));
    CHECK(l1_distance(rho, from_quantile(to_quantile(rho), g)) <= 1e-12);
}

TEST_CASE("from_quantile rejects non-monotone input") {
    QuantileFn q;
    q.domain = Domain(DomainKind::interval, 2.0);
    q.sample_count = 8;
    q.s = {0.0, 0.5, 1.0};
    q.x = {0.0, 1.5, 1.0};
    CHECK_THROWS_AS(from_quantile(q, igrid(16)), ContractViolation);
}

TEST_CASE("W_p of translates and the block pair") {
    Grid g = igrid(200);
    GridDensity a = indicator01(g);
    GridDensity b = make_density(g, PresetProfile::block(1, 2, 1));
    CHECK(wasserstein(a, b, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(wasserstein(a, b, 1) == doctest::Approx(1.0).epsilon(1e-12));

    GridDensity half = make_density(g, PresetProfile::block(0, 0.5, 2));
    double w2 = wasserstein(half, a, 2);
    CHECK(w2 * w2 == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(wasserstein(half, a, 1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("wasserstein rejects mismatched domains") {
    GridDensity a = make_density(igrid(16), PresetProfile::uniform());
    GridDensity b = make_density(igrid(16, 3.0), PresetProfile::uniform());
    CHECK_THROWS_AS(wasserstein(a, b, 2), ContractViolation);
}

TEST_CASE("triangle inequality and W1 <= W2 on random triples") {
    Grid g = igrid(48);
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        GridDensity a = random_density(g, rng);
        GridDensity b = random_density(g, rng);
        GridDensity c = random_density(g, rng);
        for (int p : {1, 2}) {
            double ab = wasserstein(a, b, p), bc = wasserstein(b, c, p),
                   ac = wasserstein(a, c, p);
            CHECK(ac <= ab + bc + 1e-9);
        }
        CHECK(wasserstein(a, b, 1) <= wasserstein(a, b, 2) + 1e-12);
    }
}

TEST_CASE("mccann endpoints, translation midpoint, constant speed") {
    Grid g = igrid(200);
    GridDensity a = indicator01(g);
    GridDensity b = make_density(g, PresetProfile::block(1, 2, 1));

    CHECK(l1_distance(mccann_interpolate(a, b, 0.0), a) <= 1e-10);
    CHECK(l1_distance(mccann_interpolate(a, b, 1.0), b) <= 1e-10);

    GridDensity mid = mccann_interpolate(a, b, 0.5);
    GridDensity expect = make_density(g, PresetProfile::block(0.5, 1.5, 1));
    CHECK(l1_distance(mid, expect) <= 1e-10);

    // constant speed is exact when the interpolant stays cell-aligned
    GridDensity c = make_density(g, PresetProfile::block(0.5, 1.5, 1));
    double wac = wasserstein(a, c, 2);
    for (double t : {0.2, 0.5, 0.8}) {  // offsets land on whole cells
        GridDensity mt = mccann_interpolate(a, c, t);
        CHECK(wasserstein(a, mt, 2) == doctest::Approx(t * wac).epsilon(1e-8));
    }
    // for generic pairs the cell-averaged output adds an O(h^2) floor
    std::mt19937_64 rng(5);
    GridDensity r1 = random_density(g, rng);
    GridDensity r2 = random_density(g, rng);
    double w = wasserstein(r1, r2, 2);
    for (double t : {0.25, 0.5, 0.75}) {
        GridDensity mt = mccann_interpolate(r1, r2, t);
        CHECK(wasserstein(r1, mt, 2) == doctest::Approx(t * w).epsilon(5e-4));
    }
    CHECK_THROWS_AS(mccann_interpolate(r1, r2, 1.5), ContractViolation);
}

TEST_CASE("geodesic convexity of the entropy") {
    Grid g = igrid(64);
    std::mt19937_64 rng(31);
    for (int t = 0; t < 20; ++t) {
        GridDensity a = random_density(g, rng);
        GridDensity b = random_density(g, rng);
        double cap = std::max(entropy(a), entropy(b));
        for (double tt : {0.25, 0.5, 0.75}) {
            CHECK(entropy(mccann_interpolate(a, b, tt)) <= cap + 1e-9);
        }
    }
}

TEST_CASE("displace by identity, shift, and contraction") {
    Grid g = igrid(200);
    std::mt19937_64 rng(41);
    GridDensity rho = random_density(g, rng);
    CHECK(l1_distance(displace(rho, TransportMap::identity(g)), rho) <= 1e-10);

    Grid gc(Domain(DomainKind::circle, 2.0), 200);
    GridDensity rc = make_density(gc, PresetProfile::block(0.2, 0.7, 2));
    GridDensity shifted = displace(rc, TransportMap::shift(gc, 0.25));
    GridDensity expect = make_density(gc, PresetProfile::block(0.45, 0.95, 2));
    CHECK(l1_distance(shifted, expect) <= 1e-10);

    // T(x) = x/2 doubles the density of the unit indicator
    GridDensity ind = indicator01(g);
    TransportMap half = TransportMap::identity(g);
    for (double& v : half.values) v *= 0.5;
    GridDensity pushed = displace(ind, half);
    GridDensity target = make_density(g, PresetProfile::block(0, 0.5, 2));
    CHECK(l1_distance(pushed, target) <= 1e-10);
    CHECK(std::abs(mass(pushed) - 1.0) <= 1e-12);
    CHECK(wasserstein(pushed, target, 2) <= 1e-10);

    TransportMap bad = TransportMap::identity(g);
    bad.values[50] = 0.0;  // inside the support of the indicator
    CHECK_THROWS_AS(displace(ind, bad), ContractViolation);
}

TEST_CASE("action of constant and geodesic trajectories") {
    Grid g = igrid(100);
    GridDensity a = indicator01(g);
    GridDensity b = make_density(g, PresetProfile::block(1, 2, 1));

    std::vector<std::pair<double, GridDensity>> constant = {{0.0, a}, {0.5, a}, {1.0, a}};
    CHECK(action_b2(constant) == doctest::Approx(0.0));

    std::vector<std::pair<double, GridDensity>> geo = {
        {0.0, a}, {0.5, mccann_interpolate(a, b, 0.5)}, {1.0, b}};
    CHECK(action_b2(geo) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<std::pair<double, GridDensity>> dup = {{0.0, a}, {0.0, b}};
    CHECK_THROWS_AS(action_b2(dup), ContractViolation);
}

TEST_CASE("circle W2: rotation offsets and seam splits") {
    Grid gc(Domain(DomainKind::circle, 2.0), 128);
    GridDensity a = make_density(gc, PresetProfile::block(0.25, 0.75, 2));
    // small translates move rigidly
    for (double c : {0.125, 0.5}) {
        GridDensity b = displace(a, TransportMap::shift(gc, c));
        CHECK(wasserstein(a, b, 2) == doctest::Approx(c).epsilon(1e-6));
        CHECK(wasserstein(a, b, 1) == doctest::Approx(c).epsilon(1e-6));
    }
    // the half-turn translate splits mass both ways: |displacement| = 3/4
    {
        GridDensity b = displace(a, TransportMap::shift(gc, 1.0));
        CHECK(wasserstein(a, b, 2) == doctest::Approx(0.75).epsilon(1e-6));
        CHECK(wasserstein(a, b, 1) == doctest::Approx(0.75).epsilon(1e-6));
    }
    // c = 1.25: optimal cut at mass 11/14 gives W2^2 = 27/56 (hand KKT)
    {
        GridDensity b = displace(a, TransportMap::shift(gc, 1.25));
        CHECK(wasserstein(a, b, 2) == doctest::Approx(std::sqrt(27.0 / 56.0)).epsilon(1e-6));
        CHECK(wasserstein(a, b, 1) <= wasserstein(a, b, 2) + 1e-9);
    }
    // wrap-around translate: mass crossing the seam must not inflate W2
    GridDensity near_seam = make_density(gc, PresetProfile::block(1.6, 1.9, 2));
    GridDensity wrapped = displace(near_seam, TransportMap::shift(gc, 0.3));
    CHECK(wasserstein(near_seam, wrapped, 2) == doctest::Approx(0.3).epsilon(1e-5));
    CHECK(wasserstein(near_seam, wrapped, 1) == doctest::Approx(0.3).epsilon(1e-6));
}
