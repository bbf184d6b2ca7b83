#include "crowdflow/functionals.hpp"

#include <algorithm>
#include <cmath>

namespace crowdflow {

double mass(const GridDensity& rho) { return rho.mass(); }

double entropy(const GridDensity& rho) {
    double e = 0.0;
    for (double r : rho.values) {
        if (r > 1e-300) e += r * std::log(r);
    }
    return e * rho.h();
}

double total_variation(const GridDensity& rho) {
    const auto& v = rho.values;
    const int n = rho.n();
    double tv = 0.0;
    for (int i = 0; i + 1 < n; ++i) tv += std::abs(v[i + 1] - v[i]);
    if (rho.grid.domain.is_circle()) tv += std::abs(v[0] - v[n - 1]);
    return tv;
}

double graph_length(const GridDensity& rho, double eps) {
    require(eps >= 0.0, "graph_length needs eps >= 0");
    const auto& v = rho.values;
    const int n = rho.n();
    const double h = rho.h();
    double g = 0.0;
    for (int i = 0; i + 1 < n; ++i) g += std::hypot(eps * h, v[i + 1] - v[i]);
    if (rho.grid.domain.is_circle()) {
        g += std::hypot(eps * h, v[0] - v[n - 1]);
    } else {
        g += eps * h;  // two boundary half-cells carry no sampled gradient
    }
    return g;
}

double sup_violation(const GridDensity& rho) {
    return sup_norm(rho) - 1.0;
}

double sup_norm(const GridDensity& rho) {
    return *std::max_element(rho.values.begin(), rho.values.end());
}

double min_value(const GridDensity& rho) {
    return *std::min_element(rho.values.begin(), rho.values.end());
}

double l1_distance(const GridDensity& a, const GridDensity& b) {
    require(a.grid == b.grid, "l1_distance needs matching grids");
    double d = 0.0;
    for (int i = 0; i < a.n(); ++i) d += std::abs(a.values[i] - b.values[i]);
    return d * a.h();
}

}  // namespace crowdflow
