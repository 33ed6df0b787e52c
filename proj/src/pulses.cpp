#include "rlg/pulses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rlg {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

bool valid_toggle(int f) { return f == -1 || f == 0 || f == 1; }

// Accumulates one branch of the toggling-frame integrals. G carries
// int_0^t f(s) e^{i omega s} ds; phi carries the geometric double integral
// minus the detuning integral.
struct BranchAccumulator {
    std::complex<double> g = 0.0;
    double phi = 0.0;

    // Segment [t0, t0+dt] with constant toggle f and detuning delta.
    // seg_int = int_{t0}^{t0+dt} e^{i omega s} ds.
    void add(double omega, double lambda, double f, double delta, double dt,
             std::complex<double> seg_int) {
        const double l2 = lambda * lambda;
        const double w2 = omega * omega;
        phi += l2 * f * std::imag(std::conj(g) * seg_int);
        phi += l2 * f * f * (omega * dt - std::sin(omega * dt)) / w2;
        phi -= f * delta * dt;
        g += f * seg_int;
    }
};

}  // namespace

void validate(const SystemParams& params) {
    if (!(params.omega > 0.0) || !std::isfinite(params.omega)) {
        throw std::invalid_argument("SystemParams: omega must be positive and finite");
    }
    if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
        throw std::invalid_argument("SystemParams: lambda must be non-negative and finite");
    }
}

double PulseSchedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) {
        t += s.dt;
    }
    return t;
}

void validate(const PulseSchedule& schedule) {
    if (schedule.segments.empty()) {
        throw std::invalid_argument("PulseSchedule: empty schedule");
    }
    for (const auto& s : schedule.segments) {
        if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
            throw std::invalid_argument("PulseSchedule: segment duration must be positive");
        }
        if (!valid_toggle(s.f_e) || !valid_toggle(s.f_g)) {
            throw std::invalid_argument("PulseSchedule: toggles must be in {-1,0,1}");
        }
        if (!std::isfinite(s.delta)) {
            throw std::invalid_argument("PulseSchedule: non-finite detuning");
        }
    }
}

DisplacementRecord integrate_schedule(const SystemParams& params,
                                      const PulseSchedule& schedule) {
    validate(params);
    validate(schedule);

    const double omega = params.omega;
    const double lambda = params.lambda;

    BranchAccumulator e;
    BranchAccumulator g;
    double t = 0.0;
    for (const auto& seg : schedule.segments) {
        const std::complex<double> e0 = std::exp(kI * (omega * t));
        const std::complex<double> e1 = std::exp(kI * (omega * (t + seg.dt)));
        const std::complex<double> seg_int = (e1 - e0) / (kI * omega);
        e.add(omega, lambda, seg.f_e, seg.delta, seg.dt, seg_int);
        g.add(omega, lambda, seg.f_g, seg.delta, seg.dt, seg_int);
        t += seg.dt;
    }

    const std::complex<double> frame = std::exp(-kI * (omega * t));
    DisplacementRecord rec;
    rec.alpha_e = frame * (-kI * lambda * e.g);
    rec.alpha_g = frame * (-kI * lambda * g.g);
    rec.phi_e = e.phi;
    rec.phi_g = g.phi;
    rec.alpha_rel = rec.alpha_e - rec.alpha_g;
    rec.phi_tot = rec.phi_e - rec.phi_g - std::imag(rec.alpha_g * std::conj(rec.alpha_e));
    return rec;
}

double integrate_combined_phase(const SystemParams& params,
                                const PulseSchedule& schedule) {
    validate(params);
    validate(schedule);

    const double omega = params.omega;
    const double l2 = params.lambda * params.lambda;
    const double w2 = omega * omega;

    std::complex<double> g_plus = 0.0;  // int f_+(s) e^{i omega s} ds
    double phi = 0.0;
    double t = 0.0;
    for (const auto& seg : schedule.segments) {
        const double f_minus = seg.f_e - seg.f_g;
        const double f_plus = seg.f_e + seg.f_g;
        const std::complex<double> e0 = std::exp(kI * (omega * t));
        const std::complex<double> e1 = std::exp(kI * (omega * (t + seg.dt)));
        const std::complex<double> seg_int = (e1 - e0) / (kI * omega);

        phi += l2 * f_minus * std::imag(std::conj(g_plus) * seg_int);
        phi += l2 * f_minus * f_plus * (omega * seg.dt - std::sin(omega * seg.dt)) / w2;
        phi -= f_minus * seg.delta * seg.dt;

        g_plus += f_plus * seg_int;
        t += seg.dt;
    }
    return phi;
}

PulseSchedule static_window(double tau, double delta) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("static_window: tau must be positive");
    }
    return PulseSchedule{{Segment{tau, 1, 0, delta}}};
}

PulseSchedule resonant_train(const SystemParams& params, int n_pulses) {
    validate(params);
    if (n_pulses < 0) {
        throw std::invalid_argument("resonant_train: n_pulses must be >= 0");
    }
    const double tau_p = std::numbers::pi / params.omega;
    const int n_segments = std::max(n_pulses, 1);
    PulseSchedule schedule;
    schedule.segments.reserve(static_cast<std::size_t>(n_segments));
    for (int n = 0; n < n_segments; ++n) {
        const int f_e = (n % 2 == 0) ? 1 : 0;
        schedule.segments.push_back(Segment{tau_p, f_e, 1 - f_e, 0.0});
    }
    return schedule;
}

PulseSchedule asymmetric_schedule(const SystemParams& params, int n_pulses) {
    validate(params);
    if (n_pulses <= 0 || n_pulses % 2 != 0) {
        throw std::invalid_argument(
            "asymmetric_schedule: n_pulses must be even and positive so the total "
            "duration is a multiple of 2 pi/omega");
    }
    const double tau_p = std::numbers::pi / params.omega;
    PulseSchedule schedule;
    schedule.segments.reserve(static_cast<std::size_t>(n_pulses));
    for (int n = 0; n < n_pulses; ++n) {
        const int f_e = (n % 2 == 0) ? 1 : 0;
        schedule.segments.push_back(Segment{tau_p, f_e, -1, 0.0});
    }
    return schedule;
}

}  // namespace rlg
