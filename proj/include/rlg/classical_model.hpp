// classical_model.hpp — Macrorealistic baseline: a qubit driven by a
// classical thermal oscillation x_c(t) = A cos(omega t + delta0) with
// Rayleigh-distributed amplitude and uniform initial phase. Closed-form
// correlations plus a Monte-Carlo sampler over (A, delta0) trajectories as an
// independent oracle. One (A, delta0) pair per trajectory feeds every
// measurement, which is exactly the single-joint-distribution premise that
// bounds these correlations by the LGI.

#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "rlg/ramsey.hpp"

namespace rlg::classical {

struct ClassicalFieldParams {
    double variance;  // <x_c^2>, >= 0
    double omega;     // oscillation frequency
    double lambda;    // coupling, same convention as the quantum model
};

void validate(const ClassicalFieldParams& p);

// <Z(t1)> = cos(phi1) exp(-|alpha(tau1)|^2 <x_c^2>),
// |alpha(tau)|^2 = (2 lambda/omega)^2 sin^2(omega tau / 2).
double classical_single(double phi1, double tau1, const ClassicalFieldParams& p);

// <Z(t2)Z(t1)> for identical windows separated by theta:
//   1/2 [ cos(phi1+phi2) e^{-2 |alpha|^2 v (1+cos theta)}
//       + cos(phi1-phi2) e^{-2 |alpha|^2 v (1-cos theta)} ]
double classical_two_time(double phi1, double phi2, double tau, double theta,
                          const ClassicalFieldParams& p);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte-Carlo estimate of <Z(t_n)...Z(t_1)> for 2 or 3 measurements. The
// accumulated phase of each window comes from the defining integral
// Phi_n = -sqrt(2) lambda int_{t_n - tau_n}^{t_n} x_c(s) ds. Deterministic
// per seed; shards merge with compensated sums so the thread count does not
// change the result.
McEstimate monte_carlo_correlation(std::span<const MeasurementSpec> specs,
                                   const ClassicalFieldParams& p,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   int threads = 1);

// LGI combination of classical_two_time at a given displacement magnitude;
// bounded by 1 up to rounding.
double classical_lgi_w(double alpha_mag, double theta, double variance,
                       const std::array<double, 3>& phases);

}  // namespace rlg::classical
