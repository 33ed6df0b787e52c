// wigner_grid.hpp — Wigner function sampled on a rectangular grid of the
// phase-space coordinate xi = x + i p. Values use the d^2xi measure, so a
// normalized state integrates to 1 with cell area dx * dp.

#pragma once

#include <vector>

namespace rlg {

struct WignerGridSpec {
    double x_min, x_max;  // Re(xi) range
    double p_min, p_max;  // Im(xi) range
    int nx = 0;           // samples along Re(xi), >= 2
    int np = 0;           // samples along Im(xi), >= 2

    double x_at(int i) const;
    double p_at(int j) const;
    double cell_area() const;
};

void validate(const WignerGridSpec& spec);

struct WignerGrid {
    WignerGridSpec spec;
    std::vector<double> values;  // row-major: values[i * np + j] at (x_i, p_j)
    bool truncation_warning = false;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * spec.np + j]; }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * spec.np + j]; }

    // Riemann quadrature with the cell area; within 1e-3 of 1 when the grid
    // covers the state.
    double integral() const;
};

}  // namespace rlg
