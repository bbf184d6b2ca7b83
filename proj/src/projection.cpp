#include "crowdflow/projection.hpp"

#include <algorithm>
#include <cmath>

namespace crowdflow {

double PressureField::max() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
}

double PressureField::complementarity(const GridDensity& rho) const {
    require(rho.grid == grid, "pressure/density grid mismatch");
    double r = 0.0;
    for (int i = 0; i < grid.n; ++i) r += values[i] * (1.0 - rho.values[i]) * grid.h;
    return std::abs(r);
}

namespace {

struct Pool {
    int start = 0, count = 0;
    double sum = 0.0, value = 0.0;
    bool touched = false;
};

// Least-squares nondecreasing fit of h (pool adjacent violators). Pools that
// were never merged keep their input value bit-exactly, which is what lets
// feasible regions pass through the projection untouched.
std::vector<Pool> pav(const std::vector<double>& h) {
    std::vector<Pool> pools;
    pools.reserve(h.size());
    for (int j = 0; j < static_cast<int>(h.size()); ++j) {
        pools.push_back({j, 1, h[j], h[j], false});
        while (pools.size() >= 2 && pools[pools.size() - 2].value > pools.back().value) {
            Pool b = pools.back();
            pools.pop_back();
            Pool& a = pools.back();
            a.count += b.count;
            a.sum += b.sum;
            a.value = a.sum / a.count;
            a.touched = true;
        }
    }
    return pools;
}

// First s in (lo, hi] where g(s) - s crosses the level c (the input enters
// the pool line). Returns hi when no crossing exists.
double crossing(const QuantileFn& g, double lo, double hi, double c) {
    double pa = g.eval_right(lo) - lo - c;
    if (pa >= 0.0) return lo;
    // walk the breakpoints of g inside (lo, hi]
    auto it = std::upper_bound(g.s.begin(), g.s.end(), lo);
    double sa = lo;
    while (true) {
        double sb = hi, xb;
        if (it != g.s.end() && *it < hi) {
            sb = *it;
            xb = g.x[it - g.s.begin()];
        } else {
            xb = g.eval_left(hi);
        }
        double pb = xb - sb - c;
        if (pb >= 0.0) {
            // linear segment from (sa, pa) to (sb, pb), or a jump at sb
            if (sb > sa && pb > pa) {
                double t = -pa / (pb - pa);
                double sc = sa + t * (sb - sa);
                // a jump knot crossing resolves to the knot position itself
                if (g.eval_left(sc) - sc - c < -1e-15 && g.eval_right(sb) != g.eval_left(sb)) {
                    return sb;
                }
                return std::min(sc, hi);
            }
            return sb;
        }
        if (sb >= hi) return hi;
        sa = sb;
        pa = g.eval_right(sb) - sb - c;
        if (pa >= 0.0) return sb;
        ++it;
    }
}

void push_knot(QuantileFn& out, double s, double x) {
    if (!out.s.empty() && out.s.back() == s && out.x.back() == x) return;
    if (!out.x.empty()) x = std::max(x, out.x.back());
    out.s.push_back(s);
    out.x.push_back(x);
}

// Copy the input breakpoints on (lo, hi) into out, with one-sided endpoint
// knots at lo and hi.
void copy_input(QuantileFn& out, const QuantileFn& g, double lo, double hi) {
    if (hi <= lo) return;
    push_knot(out, lo, g.eval_right(lo));
    auto it = std::upper_bound(g.s.begin(), g.s.end(), lo);
    for (; it != g.s.end() && *it < hi; ++it) {
        push_knot(out, *it, g.x[it - g.s.begin()]);
    }
    push_knot(out, hi, g.eval_left(hi));
}

}  // namespace

QuantileFn cone_project_quantile(const QuantileFn& g) {
    std::vector<SaturatedRange> ranges;
    return cone_project_quantile(g, ranges);
}

QuantileFn cone_project_quantile(const QuantileFn& g, std::vector<SaturatedRange>& ranges) {
    g.validate();
    const int M = g.sample_count;
    const double ds = 1.0 / M;
    const double L = g.domain.length;
    ranges.clear();

    std::vector<double> gs = g.samples();
    std::vector<double> h(M);
    for (int j = 0; j < M; ++j) h[j] = gs[j] - g.sample_s(j);

    std::vector<Pool> pools = pav(h);

    const double B = L - 1.0;
    if (g.domain.is_circle()) {
        // Positions are free modulo L; only the window h_max - h_min <= B
        // binds (the support of a unit-mass density at cap 1 has length in
        // [1, L]). Optimize the window offset if it is active.
        double lo = pools.front().value, hi = pools.back().value;
        if (hi - lo > B) {
            auto clamped_cost = [&](double w) {
                double c = 0.0;
                for (const Pool& p : pools) {
                    double d = std::clamp(p.value, w, w + B) - p.value;
                    c += d * d * p.count;
                }
                return c;
            };
            double a = hi - B, b = lo;  // window start range
            for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
                double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
                if (clamped_cost(m1) <= clamped_cost(m2)) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            double w = 0.5 * (a + b);
            for (Pool& p : pools) {
                double cv = std::clamp(p.value, w, w + B);
                if (cv != p.value) {
                    p.value = cv;
                    p.touched = true;
                }
            }
        }
    } else {
        for (Pool& p : pools) {
            double cv = std::clamp(p.value, 0.0, B);
            if (cv != p.value) {
                p.value = cv;
                p.touched = true;
            }
        }
    }

    // merge adjacent touched pools that ended on a common value
    std::vector<Pool> merged;
    for (const Pool& p : pools) {
        if (!merged.empty() && merged.back().touched && p.touched &&
            merged.back().value == p.value) {
            merged.back().count += p.count;
        } else {
            merged.push_back(p);
        }
    }

    bool any = false;
    for (const Pool& p : merged) any = any || p.touched;
    if (!any) return g;  // feasible input: the projection is the identity

    QuantileFn out;
    out.domain = g.domain;
    out.sample_count = M;

    double cur = 0.0;       // current s position of the assembled output
    bool copy_gap = true;   // whether [cur, next alpha] keeps the input
    for (size_t pi = 0; pi < merged.size(); ++pi) {
        const Pool& p = merged[pi];
        if (!p.touched) continue;
        int a = p.start, b = p.start + p.count - 1;
        double c = p.value;
        double s_a = (a + 0.5) * ds, s_b = (b + 0.5) * ds;

        double alpha;
        if (a == 0) {
            alpha = 0.0;
            copy_gap = false;
        } else if (pi > 0 && merged[pi - 1].touched &&
                   merged[pi - 1].start + merged[pi - 1].count == a) {
            alpha = s_a;  // adjacent pools connect by a chord
            copy_gap = false;
        } else {
            alpha = crossing(g, s_a - ds, s_a, c);
        }
        double beta;
        bool next_adjacent = (pi + 1 < merged.size() && merged[pi + 1].touched &&
                              merged[pi + 1].start == b + 1);
        if (b == M - 1) {
            beta = 1.0;
        } else if (next_adjacent) {
            beta = s_b;
        } else {
            // mirrored crossing: last s in [s_b, s_b + ds) where the input
            // sits below the line
            double hi = s_b + ds;
            double pb = g.eval_left(hi) - hi - c;
            if (pb <= 0.0) {
                beta = hi;
            } else {
                // walk back: find first s where input rises through the line
                beta = s_b;
                auto it = std::upper_bound(g.s.begin(), g.s.end(), s_b);
                double sa = s_b, pa = g.eval_right(s_b) - s_b - c;
                if (pa >= 0.0) {
                    beta = s_b;
                } else {
                    while (true) {
                        double sb2 = hi, xb2;
                        if (it != g.s.end() && *it < hi) {
                            sb2 = *it;
                            xb2 = g.x[it - g.s.begin()];
                        } else {
                            xb2 = g.eval_left(hi);
                        }
                        double pb2 = xb2 - sb2 - c;
                        if (pb2 >= 0.0) {
                            beta = (sb2 > sa && pb2 > pa) ? sa + (-pa / (pb2 - pa)) * (sb2 - sa)
                                                          : sb2;
                            break;
                        }
                        if (sb2 >= hi) {
                            beta = hi;
                            break;
                        }
                        sa = sb2;
                        pa = g.eval_right(sb2) - sb2 - c;
                        if (pa >= 0.0) {
                            beta = sb2;
                            break;
                        }
                        ++it;
                    }
                }
            }
        }

        if (copy_gap) copy_input(out, g, cur, alpha);
        push_knot(out, alpha, c + alpha);
        push_knot(out, beta, c + beta);
        ranges.push_back({alpha, beta, c});
        cur = beta;
        copy_gap = !next_adjacent;
    }
    if (cur < 1.0) copy_input(out, g, cur, 1.0);
    if (out.s.front() != 0.0) {
        out.s.insert(out.s.begin(), 0.0);
        out.x.insert(out.x.begin(), out.x.front());
    }
    if (out.s.back() != 1.0) {
        out.s.push_back(1.0);
        out.x.push_back(out.x.back());
    }
    out.validate();
    return out;
}

ProjectionResult project_K(const GridDensity& mu, double tau) {
    require(tau > 0.0, "projection step size must be positive");
    const Grid& grid = mu.grid;
    QuantileFn q = to_quantile(mu);
    std::vector<SaturatedRange> ranges;
    QuantileFn qp = cone_project_quantile(q, ranges);

    ProjectionResult res{from_quantile(qp, grid), PressureField{grid, {}}, {}, {}, 0.0, ranges};

    const int M = q.sample_count;
    const double ds = 1.0 / M;
    res.displacement.assign(M, 0.0);
    double acc = 0.0;
    if (!ranges.empty()) {
        std::vector<double> gin = q.samples();
        for (const SaturatedRange& r : ranges) {
            int j0 = std::max(0, static_cast<int>(std::ceil(r.s_lo / ds - 0.5)));
            int j1 = std::min(M - 1, static_cast<int>(std::floor(r.s_hi / ds - 0.5)));
            for (int j = j0; j <= j1; ++j) {
                double sj = (j + 0.5) * ds;
                if (sj < r.s_lo || sj > r.s_hi) continue;
                res.displacement[j] = gin[j] - (r.offset + sj);
                acc += res.displacement[j] * res.displacement[j];
            }
        }
    }
    res.w2_moved = std::sqrt(acc * ds);
    res.saturated = saturation_set(res.projected, mu, ranges);
    res.pressure = recover_pressure(res, mu, tau);
    return res;
}

PressureField recover_pressure(const ProjectionResult& result, const GridDensity& input,
                               double tau) {
    require(tau > 0.0, "pressure recovery needs tau > 0");
    const Grid& grid = result.projected.grid;
    const int n = grid.n;
    const double h = grid.h;
    const double L = grid.domain.length;
    PressureField p{grid, std::vector<double>(n, 0.0)};
    if (result.ranges.empty()) return p;

    // Cell-averaged pressure gradient from the sampled displacement. Only
    // saturated ranges carry displacement; positions follow the slope-one
    // line of each range.
    std::vector<double> grad(n, 0.0);
    std::vector<int> cnt(n, 0);
    const int M = static_cast<int>(result.displacement.size());
    const double ds = 1.0 / M;
    for (const SaturatedRange& r : result.ranges) {
        int j0 = std::max(0, static_cast<int>(std::ceil(r.s_lo / ds - 0.5)));
        int j1 = std::min(M - 1, static_cast<int>(std::floor(r.s_hi / ds - 0.5)));
        for (int j = j0; j <= j1; ++j) {
            double sj = (j + 0.5) * ds;
            if (sj < r.s_lo || sj > r.s_hi) continue;
            double x = r.offset + sj;
            if (grid.domain.is_circle()) x -= L * std::floor(x / L);
            int i = grid.cell_of(x);
            grad[i] += result.displacement[j] / tau;
            cnt[i] += 1;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (cnt[i] > 0) grad[i] /= cnt[i];
    }

    const std::vector<char>& mask = result.saturated;
    auto unsat = [&](int i) { return !mask[(i % n + n) % n]; };

    // connected saturated components (wrap-aware on the circle)
    std::vector<std::pair<int, int>> comps;  // [first, last] in scan indices
    int start_scan = 0;
    bool wrap = grid.domain.is_circle();
    if (wrap) {
        start_scan = -1;
        for (int i = 0; i < n; ++i) {
            if (unsat(i)) {
                start_scan = i;
                break;
            }
        }
        if (start_scan < 0) {
            // fully saturated circle: flat pressure is the minimal choice
            return p;
        }
    }
    int i = start_scan;
    int seen = 0;
    while (seen < n) {
        if (!unsat(i)) {
            int first = i;
            while (seen < n && !unsat(i)) {
                ++i;
                ++seen;
            }
            comps.push_back({first, i - 1});
        } else {
            ++i;
            ++seen;
        }
    }

    auto cell = [&](int idx) { return (idx % n + n) % n; };
    double max_abs = 0.0;
    for (auto [first, last] : comps) {
        bool free_left = wrap ? true : (first > 0);
        bool free_right = wrap ? true : (cell(last) < n - 1);
        if (!wrap) {
            if (first > 0 && !unsat(first - 1)) free_left = false;
            if (cell(last) < n - 1 && !unsat(last + 1)) free_right = false;
        }
        if (free_right || !free_left) {
            // anchor at the right free edge, integrate leftward
            double pe = 0.0;
            for (int k = last; k >= first; --k) {
                int c = cell(k);
                double pc = pe + 0.5 * h * (-grad[c]);
                p.values[c] = pc;
                pe = pc + 0.5 * h * (-grad[c]);
                max_abs = std::max(max_abs, std::abs(pc));
            }
        } else {
            double pe = 0.0;
            for (int k = first; k <= last; ++k) {
                int c = cell(k);
                double pc = pe + 0.5 * h * grad[c];
                p.values[c] = pc;
                pe = pc + 0.5 * h * grad[c];
                max_abs = std::max(max_abs, std::abs(pc));
            }
        }
    }

    double fail_tol = std::max(1e-9, 1e-6 * max_abs);
    for (double& v : p.values) {
        if (v < -fail_tol) {
            throw NumericalFailure("recovered pressure is significantly negative");
        }
        if (v < 0.0) v = 0.0;
    }
    return p;
}

std::vector<char> saturation_set(const GridDensity& projected, const GridDensity& input,
                                 const std::vector<SaturatedRange>& ranges) {
    require(projected.grid == input.grid, "saturation audit needs matching grids");
    const Grid& grid = projected.grid;
    const int n = grid.n;
    const double L = grid.domain.length;
    std::vector<char> mask(n, 0);
    for (int i = 0; i < n; ++i) mask[i] = projected.values[i] >= 1.0 - 1e-8;

    // dichotomy audit: rho* = 1 on B, = input elsewhere, with at most two
    // straddling cells per saturated range
    std::vector<int> allowance(ranges.size(), 2);
    for (int i = 0; i < n; ++i) {
        bool is_one = std::abs(projected.values[i] - 1.0) <= 1e-8;
        bool is_input = std::abs(projected.values[i] - input.values[i]) <= 1e-8;
        if (is_one || is_input) continue;
        double xl = grid.left_edge(i), xr = xl + grid.h;
        bool charged = false;
        for (size_t r = 0; r < ranges.size(); ++r) {
            double a = ranges[r].offset + ranges[r].s_lo - grid.h;
            double b = ranges[r].offset + ranges[r].s_hi + grid.h;
            bool hit;
            if (grid.domain.is_circle()) {
                double shift = L * std::floor(a / L);
                double aa = a - shift, bb = b - shift;
                hit = (xl < bb && xr > aa) || (xl + L < bb && xr + L > aa) ||
                      (xl - L < bb && xr - L > aa);
            } else {
                hit = xl < b && xr > a;
            }
            if (hit && allowance[r] > 0) {
                --allowance[r];
                charged = true;
                break;
            }
        }
        if (!charged) {
            throw NumericalFailure("projection saturation dichotomy violated at cell " +
                                   std::to_string(i));
        }
    }
    return mask;
}

}  // namespace crowdflow
