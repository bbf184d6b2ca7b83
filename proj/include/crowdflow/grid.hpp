// 1D domains (interval or circle), uniform cell grids, and cell-averaged
// probability densities.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "crowdflow/common.hpp"

namespace crowdflow {

enum class DomainKind : std::uint8_t { interval, circle };

struct Domain {
    DomainKind kind = DomainKind::interval;
    double length = 2.0;

    Domain() = default;
    Domain(DomainKind k, double len) : kind(k), length(len) {
        // |domain| > 1 keeps the constraint set {rho <= 1} nontrivial.
        require(len > 1.0, "domain length must exceed 1");
        require(std::isfinite(len), "domain length must be finite");
    }

    bool is_circle() const { return kind == DomainKind::circle; }
    friend bool operator==(const Domain& a, const Domain& b) {
        return a.kind == b.kind && a.length == b.length;
    }
};

struct Grid {
    Domain domain;
    int n = 0;       // cell count
    double h = 0.0;  // cell width, n*h == length exactly

    Grid() = default;
    Grid(Domain d, int cells) : domain(d), n(cells) {
        require(cells >= 8, "grid needs at least 8 cells");
        h = d.length / cells;
    }

    double center(int i) const { return (i + 0.5) * h; }
    double left_edge(int i) const { return i * h; }

    // Cell index of a point; x is clamped into the domain first.
    int cell_of(double x) const {
        if (domain.is_circle()) {
            x -= domain.length * std::floor(x / domain.length);
        } else {
            x = std::fmin(std::fmax(x, 0.0), domain.length);
        }
        int i = static_cast<int>(x / h);
        return i >= n ? n - 1 : (i < 0 ? 0 : i);
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.domain == b.domain && a.n == b.n;
    }
};

// Cell-averaged density with unit mass. Values may exceed 1: the constraint
// set {rho <= 1} is *not* an invariant of this type (pre-projection states
// violate it by design).
struct GridDensity {
    Grid grid;
    std::vector<double> values;  // one per cell, >= 0

    GridDensity() = default;
    GridDensity(Grid g, std::vector<double> v);

    double mass() const;
    int n() const { return grid.n; }
    double h() const { return grid.h; }
};

// Initial-profile presets for make_density.
struct PresetProfile {
    enum class Kind { uniform, block, triangle, finger, tabulated } kind;
    // block: [a,b] at the given height.
    double a = 0.0, b = 0.0, height = 1.0;
    // triangle: tent centered at `center` with base `width` (peak fixed by
    // normalization to 2/width).
    double center = 0.0, width = 0.0;
    // finger: K semicircular bumps of radius r on plateaus L = 1 - pi*r/4,
    // on 2K consecutive intervals of width 2r starting at x = 0.
    int fingers = 0;
    double radius = 0.0;
    std::vector<double> table;

    static PresetProfile uniform();
    static PresetProfile block(double a, double b, double height);
    static PresetProfile triangle(double center, double width);
    static PresetProfile finger(int K, double r);
    static PresetProfile tabulated(std::vector<double> values);
};

// Builds a valid GridDensity from a preset; the discretized profile is
// renormalized so the mass is exactly 1. Zero-mass profiles are an error.
GridDensity make_density(const Grid& grid, const PresetProfile& profile);

}  // namespace crowdflow
