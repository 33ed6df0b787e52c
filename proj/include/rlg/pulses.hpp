// pulses.hpp — Pulse schedules in the toggling frame and their exact
// state-dependent displacement amplitudes and geometric phases.
//
// A schedule is a list of piecewise-constant segments. f_e(t) and f_g(t)
// track the two qubit branches through the pi-pulse pattern; delta is a
// classical detuning. All integrals below are evaluated with per-segment
// antiderivatives, so the results are exact up to floating point.

#pragma once

#include <vector>

#include "rlg/phase_space.hpp"

namespace rlg {

struct SystemParams {
    double omega;   // oscillator angular frequency, > 0
    double lambda;  // qubit-oscillator coupling, >= 0
};

void validate(const SystemParams& params);

struct Segment {
    double dt;           // duration, > 0
    int f_e;             // branch toggle, in {-1, 0, 1}
    int f_g;             // branch toggle, in {-1, 0, 1}
    double delta = 0.0;  // classical detuning during the segment
};

struct PulseSchedule {
    std::vector<Segment> segments;

    double total_duration() const;
};

// Throws std::invalid_argument on an empty schedule, non-positive durations
// or out-of-range toggles.
void validate(const PulseSchedule& schedule);

// Branch displacements and phases at the end of the schedule:
//   alpha_x(t) = -i lambda int_0^t f_x(s) e^{-i omega (t-s)} ds
//   phi_x(t)   = lambda^2 int_0^t ds1 int_0^s1 ds2 f_x(s1) f_x(s2) sin(omega(s1-s2))
//                - int_0^t f_x(s) delta(s) ds
struct DisplacementRecord {
    ComplexAmp alpha_e;
    ComplexAmp alpha_g;
    double phi_e = 0.0;
    double phi_g = 0.0;
    ComplexAmp alpha_rel;  // alpha_e - alpha_g
    double phi_tot = 0.0;  // phi_e - phi_g - Im(alpha_g conj(alpha_e))
};

DisplacementRecord integrate_schedule(const SystemParams& params,
                                      const PulseSchedule& schedule);

// Same total phase by the single double integral with the f_- outer and f_+
// inner kernels (f_pm = f_e +- f_g). Agrees with DisplacementRecord::phi_tot;
// kept as an independent route for consistency checks.
double integrate_combined_phase(const SystemParams& params,
                                const PulseSchedule& schedule);

// One segment with the qubit pinned on the e branch.
PulseSchedule static_window(double tau, double delta = 0.0);

// Resonant pi-pulse train: n_pulses half-period segments of length pi/omega
// with f_e toggling 1,0,1,... so the flips are spaced by pi/omega. For
// n_pulses = 0 this degenerates to a single static half-period window.
// Integrating the result gives alpha_rel = (-1)^n_pulses (2 lambda/omega) n_pulses.
PulseSchedule resonant_train(const SystemParams& params, int n_pulses);

// Three-level scheme: f_g = -1 throughout while f_e toggles 1,0,1,... with
// period pi/omega. n_pulses counts the half-period segments and must be even
// and positive so the total duration is a multiple of 2 pi/omega, which makes
// alpha_g vanish while alpha_e is amplified.
PulseSchedule asymmetric_schedule(const SystemParams& params, int n_pulses);

}  // namespace rlg
