// ramsey.hpp — The measurement layer: single-shot expectations, conditioned
// post-measurement superpositions, and the analytic n-point correlation
// engine built on the measurement superoperator product.
//
// Time bookkeeping follows the rotating-amplitude convention: free evolution
// between measurement windows is folded into the window amplitudes as
// alpha_n = alpha(tau_n) e^{i omega t_n}, with t_n the completion time of the
// n-th window. Conditioned states are reported in this frame (they coincide
// with the lab-frame states up to a global phase-space rotation).

#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "rlg/phase_space.hpp"
#include "rlg/pulses.hpp"

namespace rlg {

struct MeasurementSpec {
    double phi;    // adjustable phase of the opening pi/2 pulse
    double tau;    // window duration; must equal the schedule duration
    double t_end;  // completion time of the window, >= tau
    PulseSchedule schedule;
};

void validate(const MeasurementSpec& spec);

struct CorrelationRequest {
    std::vector<MeasurementSpec> specs;  // strictly increasing t_end, non-overlapping
    OscillatorState initial;
};

void validate(const CorrelationRequest& request);

// Window quantities entering the measurement superoperator: branch
// displacement amplitudes rotated to the t = 0 frame, the superoperator
// phase psi = phi + phi_e - phi_g, and the full measurement phase
// phibar = phi + phi_tot.
struct WindowOps {
    ComplexAmp alpha_e;
    ComplexAmp alpha_g;
    ComplexAmp alpha_rel;
    double psi = 0.0;
    double phibar = 0.0;
};

WindowOps window_ops(const MeasurementSpec& spec, const SystemParams& params);

// phi + phi_tot(tau) of the window.
double phibar(const MeasurementSpec& spec, const SystemParams& params);

// <Z(t_1)> = Re{ e^{i phibar_1} <D(alpha_1)> } for a single measurement.
double single_expectation(const OscillatorState& state, const MeasurementSpec& spec,
                          const SystemParams& params);

struct ConditionedOutcome {
    double probability = 0.0;
    // Cat with twice the input component count; absent when the outcome
    // probability is below 1e-14 (the state would be numerical noise).
    std::optional<OscillatorState> state;
};

// Applies the Kraus pair of one Ramsey window to a pure analytic state and
// returns the (+, -) outcomes. Thermal input is rejected: a conditioned mixed
// state has no finite cat representation, use the Fock oracle instead.
std::pair<ConditionedOutcome, ConditionedOutcome> measure_conditioned(
    const OscillatorState& state, const MeasurementSpec& spec,
    const SystemParams& params);

// n-point correlation <Z(t_n)...Z(t_1)> by expanding the superoperator
// product into 2^n displacement strings. Supports modulated couplings
// (both branches displaced). n is capped at 20; beyond that the expansion
// is no longer checkable against anything.
double correlation(const CorrelationRequest& request, const SystemParams& params);

// Two-time correlation directly from the closed form
//   C = 1/2 Re{ e^{i(p1+p2+gamma)} <D(a1+a2)> }
//     + 1/2 Re{ e^{i(p1-p2-gamma)} <D(a1-a2)> },   gamma = Im(a1* a2).
// Fast path and independent check of correlation() at n = 2.
double two_time_closed_form(ComplexAmp alpha1, ComplexAmp alpha2, double phibar1,
                            double phibar2, const OscillatorState& state);

// Three-point correlator of plain modular-variable operators; requires the
// three window amplitudes to mutually commute (Im(a_i* a_j) = 0 within 1e-10).
double three_point_commuting(const std::array<MeasurementSpec, 3>& specs,
                             const OscillatorState& state, const SystemParams& params);

}  // namespace rlg
