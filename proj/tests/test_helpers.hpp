// Shared test utilities: seeded random density generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "crowdflow/grid.hpp"

namespace cf_test {

using namespace crowdflow;

// Random piecewise density: a few blocks and bumps on top of a floor, then
// normalized. With `feasible` the result is rescaled under the cap 1.
inline GridDensity random_density(const Grid& grid, std::mt19937_64& rng, bool feasible = false) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = grid.n;
    const double L = grid.domain.length;
    std::vector<double> v(n, 0.05 * unif(rng));
    int pieces = 2 + static_cast<int>(unif(rng) * 4);
    for (int p = 0; p < pieces; ++p) {
        double c = unif(rng) * L;
        double w = (0.05 + 0.4 * unif(rng)) * L;
        double a = 0.3 + 2.2 * unif(rng);
        bool smooth = unif(rng) < 0.5;
        for (int i = 0; i < n; ++i) {
            double x = grid.center(i);
            double d = std::abs(x - c);
            if (grid.domain.is_circle()) d = std::min(d, L - d);
            if (d < w / 2) v[i] += smooth ? a * (1.0 + std::cos(2.0 * M_PI * d / w)) / 2.0 : a;
        }
    }
    double m = 0.0;
    for (double r : v) m += r * grid.h;
    for (double& r : v) r /= m;
    if (feasible) {
        // squash under the cap, then fix the mass by mixing with uniform
        double top = *std::max_element(v.begin(), v.end());
        if (top > 0.98) {
            for (double& r : v) r *= 0.9 / top;
            double m2 = 0.0;
            for (double r : v) m2 += r * grid.h;
            double fill = (1.0 - m2) / L;
            for (double& r : v) r += fill;
        }
    }
    double m3 = 0.0;
    for (double r : v) m3 += r * grid.h;
    for (double& r : v) r /= m3;
    return GridDensity(grid, std::move(v));
}

}  // namespace cf_test
