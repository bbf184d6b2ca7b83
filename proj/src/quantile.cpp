#include "crowdflow/quantile.hpp"

#include <algorithm>
#include <cmath>

namespace crowdflow {

void QuantileFn::validate() const {
    require(s.size() == x.size() && s.size() >= 2, "quantile needs >= 2 breakpoints");
    require(s.front() == 0.0 && s.back() == 1.0, "quantile breakpoints must span [0,1]");
    require(sample_count >= 2, "quantile sample count too small");
    for (size_t k = 0; k + 1 < s.size(); ++k) {
        require(s[k + 1] >= s[k], "quantile s-breakpoints must be nondecreasing");
        if (!(x[k + 1] >= x[k] - 1e-13)) {
            throw ContractViolation("non-monotone quantile values");
        }
    }
}

double QuantileFn::eval_left(double sv) const {
    sv = std::clamp(sv, 0.0, 1.0);
    auto it = std::lower_bound(s.begin(), s.end(), sv);
    size_t k = static_cast<size_t>(it - s.begin());
    if (k < s.size() && s[k] == sv) return x[k];
    // sv lies strictly inside segment [k-1, k]
    double t = (sv - s[k - 1]) / (s[k] - s[k - 1]);
    return x[k - 1] + t * (x[k] - x[k - 1]);
}

double QuantileFn::eval_right(double sv) const {
    sv = std::clamp(sv, 0.0, 1.0);
    auto it = std::upper_bound(s.begin(), s.end(), sv);
    size_t k = static_cast<size_t>(it - s.begin());
    if (k > 0 && s[k - 1] == sv) return x[k - 1];
    double t = (sv - s[k - 1]) / (s[k] - s[k - 1]);
    return x[k - 1] + t * (x[k] - x[k - 1]);
}

std::vector<double> QuantileFn::samples() const {
    std::vector<double> g(sample_count);
    // Single sweep: samples and breakpoints are both sorted.
    size_t k = 1;
    for (int j = 0; j < sample_count; ++j) {
        double sv = sample_s(j);
        while (k + 1 < s.size() && s[k] < sv) ++k;
        if (s[k] <= sv) {
            // only possible at sv == s[k] == ... == 1 tail
            g[j] = x[k];
            continue;
        }
        double ds = s[k] - s[k - 1];
        g[j] = ds > 0.0 ? x[k - 1] + (sv - s[k - 1]) / ds * (x[k] - x[k - 1]) : x[k - 1];
    }
    return g;
}

QuantileFn to_quantile(const GridDensity& rho, int M) {
    const Grid& grid = rho.grid;
    require(M >= grid.n, "quantile sample count must be >= grid.n");
    QuantileFn q;
    q.domain = grid.domain;
    q.sample_count = M;

    const int n = grid.n;
    const double h = grid.h;
    double cum = 0.0;
    bool started = false;
    double last_x = 0.0;
    for (int i = 0; i < n; ++i) {
        double m = rho.values[i] * h;
        if (m <= 0.0) continue;
        double xl = grid.left_edge(i);
        if (!started) {
            q.s.push_back(0.0);
            q.x.push_back(xl);
            started = true;
        } else if (xl > last_x) {
            // gap of empty cells: vertical jump at the current mass level
            q.s.push_back(cum);
            q.x.push_back(xl);
        }
        cum += m;
        last_x = xl + h;
        q.s.push_back(cum);
        q.x.push_back(last_x);
    }
    require(started, "cannot take the quantile of a zero density");
    // cum == 1 within 1e-12 by the mass invariant; pin it exactly.
    q.s.back() = 1.0;
    for (double& sv : q.s) sv = std::min(sv, 1.0);
    q.validate();
    return q;
}

QuantileFn to_quantile(const GridDensity& rho) { return to_quantile(rho, 4 * rho.grid.n); }

namespace {

// Deposit `m` units of mass spread uniformly over [xa, xb] into cells.
// Coordinates outside the interval are clamped to the boundary cells; on the
// circle the segment is wrapped.
void deposit(std::vector<double>& v, const Grid& grid, double xa, double xb, double m) {
    const int n = grid.n;
    const double h = grid.h;
    const double L = grid.domain.length;
    if (m <= 0.0) return;
    if (xb <= xa) {  // atom
        v[grid.cell_of(std::min(xa, xb))] += m;
        return;
    }
    if (grid.domain.is_circle()) {
        double shift = L * std::floor(xa / L);
        xa -= shift;
        xb -= shift;
        while (xb > L + 1e-300) {
            double cut = L;
            if (xa < cut) {
                deposit(v, grid, xa, cut, m * (cut - xa) / (xb - xa));
                m *= (xb - cut) / (xb - xa);
            }
            xa = 0.0;
            xb -= L;
        }
    }
    double density = m / (xb - xa);
    double lo = std::max(xa, 0.0), hi = std::min(xb, L);
    if (lo > xa) v[0] += density * (lo - xa);
    if (xb > hi) v[n - 1] += density * (xb - hi);
    if (hi <= lo) return;
    int i0 = std::min(n - 1, static_cast<int>(lo / h));
    int i1 = std::min(n - 1, static_cast<int>((hi - 1e-300) / h));
    for (int i = i0; i <= i1; ++i) {
        double cl = std::max(lo, grid.left_edge(i));
        double cr = std::min(hi, grid.left_edge(i) + h);
        if (cr > cl) v[i] += density * (cr - cl);
    }
}

}  // namespace

GridDensity from_quantile(const QuantileFn& g, const Grid& grid) {
    require(g.domain == grid.domain, "quantile and grid domains differ");
    g.validate();
    std::vector<double> v(grid.n, 0.0);
    for (int k = 0; k + 1 < g.knots(); ++k) {
        double ds = g.s[k + 1] - g.s[k];
        if (ds <= 0.0) continue;
        deposit(v, grid, g.x[k], g.x[k + 1], ds);
    }
    double total = 0.0;
    for (double& r : v) r /= grid.h;
    for (double r : v) total += r * grid.h;
    for (double& r : v) r /= total;  // remove last-ulp drift; total = 1 +- eps
    return GridDensity(grid, std::move(v));
}

QuantileFn quantile_from_samples(const Domain& domain, const std::vector<double>& samples) {
    const int M = static_cast<int>(samples.size());
    require(M >= 2, "need at least two samples");
    for (int j = 0; j + 1 < M; ++j) {
        if (!(samples[j + 1] >= samples[j] - 1e-13)) {
            throw ContractViolation("non-monotone quantile samples");
        }
    }
    const double ds = 1.0 / M;
    QuantileFn q;
    q.domain = domain;
    q.sample_count = M;
    q.s.reserve(M + 2);
    q.x.reserve(M + 2);
    double first_slope = (samples[1] - samples[0]) / ds;
    double last_slope = (samples[M - 1] - samples[M - 2]) / ds;
    double x0 = samples[0] - 0.5 * ds * first_slope;
    double x1 = samples[M - 1] + 0.5 * ds * last_slope;
    if (!domain.is_circle()) {
        x0 = std::clamp(x0, 0.0, domain.length);
        x1 = std::clamp(x1, std::max(x0, samples[M - 1]), domain.length);
        x0 = std::min(x0, samples[0]);
    }
    q.s.push_back(0.0);
    q.x.push_back(x0);
    for (int j = 0; j < M; ++j) {
        q.s.push_back((j + 0.5) * ds);
        q.x.push_back(std::max(samples[j], q.x.back()));
    }
    q.s.push_back(1.0);
    q.x.push_back(std::max(x1, q.x.back()));
    q.validate();
    return q;
}

std::vector<double> merged_breakpoints(const QuantileFn& a, const QuantileFn& b) {
    std::vector<double> s;
    s.reserve(a.s.size() + b.s.size());
    std::merge(a.s.begin(), a.s.end(), b.s.begin(), b.s.end(), std::back_inserter(s));
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

}  // namespace crowdflow
