#include "crowdflow/transport.hpp"

#include <algorithm>
#include <cmath>

namespace crowdflow {

namespace {

// Exact integral of |g_a - g_b|^p over [0,1]; the difference is linear on
// every merged segment.
double quantile_gap_integral(const QuantileFn& a, const QuantileFn& b, int p) {
    std::vector<double> s = merged_breakpoints(a, b);
    double acc = 0.0;
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        double len = s[k + 1] - s[k];
        if (len <= 0.0) continue;
        double d0 = a.eval_right(s[k]) - b.eval_right(s[k]);
        double d1 = a.eval_left(s[k + 1]) - b.eval_left(s[k + 1]);
        if (p == 2) {
            acc += len * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
        } else if (d0 * d1 >= 0.0) {
            acc += len * 0.5 * (std::abs(d0) + std::abs(d1));
        } else {
            double z = d0 / (d0 - d1);  // root position within the segment
            acc += len * 0.5 * (std::abs(d0) * z + std::abs(d1) * (1.0 - z));
        }
    }
    return acc;
}

double mean_gap(const QuantileFn& a, const QuantileFn& b) {
    std::vector<double> s = merged_breakpoints(a, b);
    double m = 0.0;
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        double len = s[k + 1] - s[k];
        if (len <= 0.0) continue;
        m += len * 0.5 *
             ((a.eval_right(s[k]) - b.eval_right(s[k])) +
              (a.eval_left(s[k + 1]) - b.eval_left(s[k + 1])));
    }
    return m;
}

// View of a circle quantile shifted by `alpha` in mass: g_a(s) = g(s - alpha)
// on the lift, where g(t + 1) = g(t) + length.
QuantileFn shifted_quantile(const QuantileFn& g, double alpha) {
    const double L = g.domain.length;
    double base = std::floor(alpha);
    double frac = alpha - base;
    QuantileFn out;
    out.domain = g.domain;
    out.sample_count = g.sample_count;
    if (frac < 1e-15 || frac > 1.0 - 1e-15) {
        out = g;
        double off = -(frac > 0.5 ? base + 1.0 : base) * L;
        for (double& xv : out.x) xv += off;
        return out;
    }
    const double tc = 1.0 - frac;  // cut point in the original parameter
    // s in [0, frac] comes from t in [tc, 1] shifted down by one period.
    out.s.push_back(0.0);
    out.x.push_back(g.eval_right(tc) - L);
    for (int k = 0; k < g.knots(); ++k) {
        if (g.s[k] > tc) {
            out.s.push_back(std::min(g.s[k] - tc, frac));
            out.x.push_back(g.x[k] - L);
        }
    }
    // s in [frac, 1] comes from t in [0, tc].
    out.s.push_back(frac);
    out.x.push_back(g.x.front());
    for (int k = 0; k < g.knots(); ++k) {
        if (g.s[k] > 0.0 && g.s[k] < tc) {
            out.s.push_back(std::clamp(g.s[k] + frac, frac, 1.0));
            out.x.push_back(g.x[k]);
        }
    }
    out.s.push_back(1.0);
    out.x.push_back(g.eval_left(tc));
    for (double& xv : out.x) xv -= base * L;
    out.validate();
    return out;
}

// Optimal rotation offset between two circle quantiles for the W_2 cost:
// ternary search around the zero-mean-displacement shift (the squared-gap
// objective is convex in the shift).
double circle_best_shift(const QuantileFn& qa, const QuantileFn& qb) {
    const double L = qa.domain.length;
    // mean displacement is linear in the shift with slope L and vanishes at
    // the optimum to within +-L/2, so this brackets the minimizer
    double center = -mean_gap(qa, qb) / L;
    auto cost = [&](double alpha) {
        return quantile_gap_integral(qa, shifted_quantile(qb, alpha), 2);
    };
    double lo = center - 0.75, hi = center + 0.75;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (cost(m1) <= cost(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    double mid = 0.5 * (lo + hi);
    return cost(mid) <= cost(0.0) ? mid : 0.0;
}

// Classic circular W_1: minimize the vertical shift of the CDF difference,
// int |F_rho - F_nu - c| dx, with c the Lebesgue median of the difference.
double circle_w1(const GridDensity& rho, const GridDensity& nu) {
    const double L = rho.grid.domain.length;
    std::vector<double> edges;
    for (int i = 0; i <= rho.n(); ++i) edges.push_back(rho.grid.left_edge(i));
    for (int i = 0; i <= nu.n(); ++i) edges.push_back(nu.grid.left_edge(i));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<double> pref_rho(rho.n() + 1, 0.0), pref_nu(nu.n() + 1, 0.0);
    for (int i = 0; i < rho.n(); ++i) pref_rho[i + 1] = pref_rho[i] + rho.values[i] * rho.h();
    for (int i = 0; i < nu.n(); ++i) pref_nu[i + 1] = pref_nu[i] + nu.values[i] * nu.h();
    auto cdf = [](const GridDensity& d, const std::vector<double>& pref, double xv) {
        int i = std::min(d.n() - 1, static_cast<int>(xv / d.h()));
        return pref[i] + d.values[i] * (xv - i * d.h());
    };
    const size_t K = edges.size();
    std::vector<double> dval(K);
    for (size_t k = 0; k < K; ++k) {
        dval[k] = cdf(rho, pref_rho, edges[k]) - cdf(nu, pref_nu, edges[k]);
    }
    auto measure_below = [&](double c) {
        double m = 0.0;
        for (size_t k = 0; k + 1 < K; ++k) {
            double len = edges[k + 1] - edges[k];
            double a = dval[k], b = dval[k + 1];
            if (a > b) std::swap(a, b);
            if (c >= b) {
                m += len;
            } else if (c > a) {
                m += len * (c - a) / (b - a);
            }
        }
        return m;
    };
    double lo = *std::min_element(dval.begin(), dval.end());
    double hi = *std::max_element(dval.begin(), dval.end());
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (measure_below(mid) < 0.5 * L ? lo : hi) = mid;
    }
    double c = 0.5 * (lo + hi);
    double acc = 0.0;
    for (size_t k = 0; k + 1 < K; ++k) {
        double len = edges[k + 1] - edges[k];
        double d0 = dval[k] - c, d1 = dval[k + 1] - c;
        if (d0 * d1 >= 0.0) {
            acc += len * 0.5 * (std::abs(d0) + std::abs(d1));
        } else {
            double z = d0 / (d0 - d1);
            acc += len * 0.5 * (std::abs(d0) * z + std::abs(d1) * (1.0 - z));
        }
    }
    return acc;
}

}  // namespace

TransportMap TransportMap::identity(const Grid& g) {
    TransportMap T{g, std::vector<double>(g.n)};
    for (int i = 0; i < g.n; ++i) T.values[i] = g.center(i);
    return T;
}

TransportMap TransportMap::shift(const Grid& g, double c) {
    TransportMap T = identity(g);
    for (double& v : T.values) v += c;
    return T;
}

double wasserstein(const GridDensity& rho, const GridDensity& nu, int p) {
    require(rho.grid.domain == nu.grid.domain, "wasserstein needs a common domain");
    require(p == 1 || p == 2, "wasserstein supports p in {1,2}");
    if (rho.grid.domain.is_circle()) {
        if (p == 1) return circle_w1(rho, nu);
        QuantileFn qa = to_quantile(rho), qb = to_quantile(nu);
        double alpha = circle_best_shift(qa, qb);
        return std::sqrt(std::max(0.0, quantile_gap_integral(qa, shifted_quantile(qb, alpha), 2)));
    }
    double v = quantile_gap_integral(to_quantile(rho), to_quantile(nu), p);
    return p == 2 ? std::sqrt(std::max(0.0, v)) : v;
}

GridDensity mccann_interpolate(const GridDensity& rho, const GridDensity& nu, double t) {
    require(rho.grid.domain == nu.grid.domain, "mccann needs a common domain");
    require(t >= 0.0 && t <= 1.0, "mccann time must lie in [0,1]");
    QuantileFn qa = to_quantile(rho);
    QuantileFn qb = to_quantile(nu);
    if (rho.grid.domain.is_circle()) {
        qb = shifted_quantile(qb, circle_best_shift(qa, qb));
    }
    std::vector<double> s = merged_breakpoints(qa, qb);
    QuantileFn out;
    out.domain = rho.grid.domain;
    out.sample_count = std::max(qa.sample_count, qb.sample_count);
    for (double sv : s) {
        double la = qa.eval_left(sv), ra = qa.eval_right(sv);
        double lb = qb.eval_left(sv), rb = qb.eval_right(sv);
        out.s.push_back(sv);
        out.x.push_back((1.0 - t) * la + t * lb);
        if (ra != la || rb != lb) {
            out.s.push_back(sv);
            out.x.push_back((1.0 - t) * ra + t * rb);
        }
    }
    out.validate();
    return from_quantile(out, rho.grid);
}

GridDensity displace(const GridDensity& rho, const TransportMap& T) {
    require(rho.grid == T.grid, "displace needs the map sampled on the density grid");
    const Grid& grid = rho.grid;
    const int n = grid.n;
    QuantileFn q = to_quantile(rho);

    int prev = -1;
    for (int i = 0; i < n; ++i) {
        if (rho.values[i] <= 0.0) continue;
        if (prev >= 0 && T.values[i] < T.values[prev] - 1e-12) {
            throw ContractViolation("transport map decreases on the support");
        }
        prev = i;
    }

    // Piecewise-linear interpolant of T through cell centers, chords
    // extended over the two half-cell stubs.
    auto eval_T = [&](double xv) {
        double t = xv / grid.h - 0.5;
        int i = std::clamp(static_cast<int>(std::floor(t)), 0, n - 2);
        return T.values[i] + (t - i) * (T.values[i + 1] - T.values[i]);
    };

    QuantileFn out;
    out.domain = grid.domain;
    out.sample_count = q.sample_count;
    for (int k = 0; k < q.knots(); ++k) {
        if (k > 0 && q.s[k] > q.s[k - 1] && q.x[k] > q.x[k - 1]) {
            // interior map knots (cell centers) crossed by this segment
            double xa = q.x[k - 1], xb = q.x[k];
            int ca = std::max(0, static_cast<int>(std::ceil(xa / grid.h - 0.5)));
            int cb = std::min(n - 1, static_cast<int>(std::floor(xb / grid.h - 0.5)));
            for (int c = ca; c <= cb; ++c) {
                double xc = grid.center(c);
                if (xc <= xa || xc >= xb) continue;
                out.s.push_back(q.s[k - 1] + (xc - xa) / (xb - xa) * (q.s[k] - q.s[k - 1]));
                out.x.push_back(T.values[c]);
            }
        }
        out.s.push_back(q.s[k]);
        out.x.push_back(eval_T(q.x[k]));
    }
    for (size_t k = 0; k + 1 < out.x.size(); ++k) {
        if (out.x[k + 1] < out.x[k]) out.x[k + 1] = out.x[k];  // roundoff guard
    }
    if (!grid.domain.is_circle()) {
        for (double& xv : out.x) xv = std::clamp(xv, 0.0, grid.domain.length);
    }
    out.validate();
    return from_quantile(out, grid);
}

double action_b2(const std::vector<std::pair<double, GridDensity>>& trajectory) {
    require(trajectory.size() >= 2, "action needs at least two samples");
    double acc = 0.0;
    for (size_t k = 0; k + 1 < trajectory.size(); ++k) {
        double dt = trajectory[k + 1].first - trajectory[k].first;
        require(dt > 0.0, "trajectory times must be strictly increasing");
        double w = wasserstein(trajectory[k].second, trajectory[k + 1].second, 2);
        acc += w * w / dt;
    }
    return acc;
}

}  // namespace crowdflow
