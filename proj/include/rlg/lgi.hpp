// lgi.hpp — Leggett-Garg witness W = C12 + C23 - C13 for equidistant Ramsey
// measurements on a thermal oscillator, phase maximization, and parameter
// sweeps. Conventions: a common real displacement magnitude alpha, free
// rotation angle theta = omega (t2 - t1) = omega (t3 - t2), and maximization
// over the three full measurement phases.

#pragma once

#include <array>
#include <span>
#include <vector>

namespace rlg::lgi {

// Two-time correlation between identical windows separated by theta:
//   C = 1/2 [ cos(p1 + p2 + gamma) e^{-x (1 + cos theta)}
//           + cos(p1 - p2 - gamma) e^{-x (1 - cos theta)} ],
// with x = alpha^2 (2 nbar + 1) and gamma = alpha^2 sin(theta).
double thermal_two_time(double alpha, double theta, double nbar, double p1, double p2);

double lgi_w(double alpha, double theta, double nbar,
             const std::array<double, 3>& phases);

// Diagnostic surrogate with the non-commutativity phase gamma deleted. This
// is exactly the macrorealistic correlation with <x_c^2> = (2 nbar + 1)/2 and
// never exceeds 1.
double lgi_w_without_gamma(double alpha, double theta, double nbar,
                           const std::array<double, 3>& phases);

struct OptimizerOpts {
    int grid_resolution = 24;  // coarse grid points per phase axis, >= 8
    int refine_starts = 5;     // simplex restarts from the best cells
    double tol_w = 1e-9;       // stop when the simplex W-spread is below this
    int max_iterations = 400;  // per simplex start
    bool include_gamma = true;
};

struct LgiPoint {
    double alpha = 0.0;
    double theta = 0.0;
    double nbar = 0.0;
    double w_max = 0.0;
    std::array<double, 3> argmax_phases{};  // wrapped to [0, 2 pi)
};

// Coarse grid over [0, 2 pi)^3 followed by Nelder-Mead refinement from the
// best cells. Deterministic given opts; ties broken by lexicographically
// smallest phases. Warns on stderr if w_max exceeds 1.5 + 1e-6.
LgiPoint maximize_w(double alpha, double theta, double nbar,
                    const OptimizerOpts& opts = {});

// maximize_w over the alpha x theta grid, row-major in (alpha, theta).
// Cells are independent and evaluated on `threads` workers; the output order
// is the deterministic grid order regardless of scheduling.
std::vector<LgiPoint> sweep(std::span<const double> alphas,
                            std::span<const double> thetas, double nbar,
                            const OptimizerOpts& opts = {}, int threads = 1);

// Smallest nbar at which the maximized witness stops violating the bound,
// located by bisection on w_max(nbar) - 1 at the given small alpha.
// Returns 0 when there is no violation even at nbar = 0.
double nbar_threshold(double theta, double alpha_small);

}  // namespace rlg::lgi
