#include "crowdflow/grid.hpp"

#include <algorithm>
#include <cmath>

namespace crowdflow {

GridDensity::GridDensity(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    require(static_cast<int>(values.size()) == grid.n, "density size must match grid");
    for (double r : values) {
        require(std::isfinite(r), "density values must be finite");
        require(r >= 0.0, "density values must be nonnegative");
    }
    require(std::abs(mass() - 1.0) <= 1e-12, "density mass must be 1 within 1e-12");
}

double GridDensity::mass() const {
    double m = 0.0;
    for (double r : values) m += r;
    return m * grid.h;
}

PresetProfile PresetProfile::uniform() { return {Kind::uniform}; }

PresetProfile PresetProfile::block(double a, double b, double height) {
    PresetProfile p{Kind::block};
    p.a = a;
    p.b = b;
    p.height = height;
    return p;
}

PresetProfile PresetProfile::triangle(double center, double width) {
    PresetProfile p{Kind::triangle};
    p.center = center;
    p.width = width;
    return p;
}

PresetProfile PresetProfile::finger(int K, double r) {
    PresetProfile p{Kind::finger};
    p.fingers = K;
    p.radius = r;
    return p;
}

PresetProfile PresetProfile::tabulated(std::vector<double> values) {
    PresetProfile p{Kind::tabulated};
    p.table = std::move(values);
    return p;
}

namespace {

// Antiderivative of the tent profile max(0, peak * (1 - |x-c| / w2)).
double tent_integral(double x, double c, double w2, double peak) {
    double lo = c - w2, hi = c + w2;
    x = std::clamp(x, lo, hi);
    if (x <= c) {
        double t = x - lo;
        return peak * (t - t * t / (2.0 * w2));
    }
    double t = x - c;
    return peak * (w2 / 2.0 + t - t * t / (2.0 * w2));
}

// Antiderivative of sqrt(r^2 - (x-t)^2) on [t-r, t+r].
double semicircle_integral(double x, double t, double r) {
    double z = std::clamp(x - t, -r, r);
    return 0.5 * (z * std::sqrt(std::max(0.0, r * r - z * z)) + r * r * std::asin(z / r)) +
           0.25 * M_PI * r * r;
}

}  // namespace

GridDensity make_density(const Grid& grid, const PresetProfile& profile) {
    const int n = grid.n;
    const double h = grid.h;
    std::vector<double> v(n, 0.0);

    using K = PresetProfile::Kind;
    switch (profile.kind) {
        case K::uniform: {
            std::fill(v.begin(), v.end(), 1.0);
            break;
        }
        case K::block: {
            require(profile.b > profile.a, "block needs b > a");
            require(profile.height > 0.0, "block needs positive height");
            for (int i = 0; i < n; ++i) {
                double lo = std::max(profile.a, grid.left_edge(i));
                double hi = std::min(profile.b, grid.left_edge(i) + h);
                if (hi > lo) v[i] = profile.height * (hi - lo) / h;
            }
            break;
        }
        case K::triangle: {
            require(profile.width > 0.0, "triangle needs positive width");
            double w2 = profile.width / 2.0;
            double peak = 2.0 / profile.width;  // unit raw mass
            for (int i = 0; i < n; ++i) {
                double lo = grid.left_edge(i), hi = lo + h;
                v[i] = (tent_integral(hi, profile.center, w2, peak) -
                        tent_integral(lo, profile.center, w2, peak)) /
                       h;
            }
            break;
        }
        case K::finger: {
            const int Kf = profile.fingers;
            const double r = profile.radius;
            require(Kf >= 1 && r > 0.0, "finger needs K >= 1 and r > 0");
            require(4.0 * r * Kf <= grid.domain.length + 1e-12,
                    "finger construction does not fit the domain");
            const double plateau = 1.0 - M_PI * r / 4.0;
            require(plateau > 0.0, "finger radius too large");
            // Bumps sit on intervals J_i = [2ri, 2r(i+1)] with i odd; each
            // carries a plateau of height L plus a semicircle reaching L + r.
            for (int i = 0; i < n; ++i) {
                double lo = grid.left_edge(i), hi = lo + h;
                double acc = 0.0;
                int i_lo = static_cast<int>(std::floor(lo / (2.0 * r)));
                int i_hi = static_cast<int>(std::floor((hi - 1e-15) / (2.0 * r)));
                for (int b = std::max(1, i_lo | 1); b <= std::min(i_hi, 2 * Kf - 1); b += 2) {
                    double jl = 2.0 * r * b, jr = jl + 2.0 * r, t = jl + r;
                    double s_lo = std::max(lo, jl), s_hi = std::min(hi, jr);
                    if (s_hi <= s_lo) continue;
                    acc += plateau * (s_hi - s_lo);
                    acc += semicircle_integral(s_hi, t, r) - semicircle_integral(s_lo, t, r);
                }
                v[i] = std::max(acc, 0.0) / h;  // sliver cancellation guard
            }
            break;
        }
        case K::tabulated: {
            require(static_cast<int>(profile.table.size()) == n,
                    "tabulated profile needs one value per cell");
            for (int i = 0; i < n; ++i) {
                require(profile.table[i] >= 0.0, "tabulated values must be nonnegative");
                v[i] = profile.table[i];
            }
            break;
        }
    }

    double raw = 0.0;
    for (double r : v) raw += r * h;
    require(raw > 0.0, "profile has zero mass");
    for (double& r : v) r /= raw;
    // Kill the last-ulp drift so the mass invariant is exact by summation.
    return GridDensity(grid, std::move(v));
}

}  // namespace crowdflow
