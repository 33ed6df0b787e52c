#include "rlg/ramsey.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rlg {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr int kMaxWindows = 20;
constexpr double kProbFloor = 1e-14;

}  // namespace

void validate(const MeasurementSpec& spec) {
    validate(spec.schedule);
    if (!std::isfinite(spec.phi)) {
        throw std::invalid_argument("MeasurementSpec: non-finite pulse phase");
    }
    const double dur = spec.schedule.total_duration();
    if (std::abs(spec.tau - dur) > 1e-9 * std::max(1.0, dur)) {
        throw std::invalid_argument("MeasurementSpec: tau does not match schedule duration");
    }
    if (spec.t_end < spec.tau - 1e-12) {
        throw std::invalid_argument("MeasurementSpec: t_end < tau");
    }
}

void validate(const CorrelationRequest& request) {
    if (request.specs.empty()) {
        throw std::invalid_argument("CorrelationRequest: no measurements");
    }
    if (request.specs.size() > kMaxWindows) {
        throw std::length_error("CorrelationRequest: more than 20 measurements");
    }
    double prev_end = 0.0;
    bool first = true;
    for (const auto& spec : request.specs) {
        validate(spec);
        if (!first) {
            if (spec.t_end <= prev_end) {
                throw std::invalid_argument("CorrelationRequest: t_end not increasing");
            }
            if (spec.t_end - spec.tau < prev_end - 1e-12) {
                throw std::invalid_argument("CorrelationRequest: overlapping windows");
            }
        }
        prev_end = spec.t_end;
        first = false;
    }
}

WindowOps window_ops(const MeasurementSpec& spec, const SystemParams& params) {
    const DisplacementRecord rec = integrate_schedule(params, spec.schedule);
    const std::complex<double> rot = std::exp(kI * (params.omega * spec.t_end));
    WindowOps ops;
    ops.alpha_e = rot * rec.alpha_e;
    ops.alpha_g = rot * rec.alpha_g;
    ops.alpha_rel = rot * rec.alpha_rel;
    ops.psi = spec.phi + rec.phi_e - rec.phi_g;
    ops.phibar = spec.phi + rec.phi_tot;
    return ops;
}

double phibar(const MeasurementSpec& spec, const SystemParams& params) {
    return spec.phi + integrate_schedule(params, spec.schedule).phi_tot;
}

double single_expectation(const OscillatorState& state, const MeasurementSpec& spec,
                          const SystemParams& params) {
    validate(spec);
    const WindowOps ops = window_ops(spec, params);
    return modular_variable_expectation(state, ops.phibar, ops.alpha_rel);
}

std::pair<ConditionedOutcome, ConditionedOutcome> measure_conditioned(
    const OscillatorState& state, const MeasurementSpec& spec,
    const SystemParams& params) {
    validate(spec);
    if (!is_pure(state)) {
        throw std::invalid_argument(
            "measure_conditioned: thermal input is unsupported, use the Fock oracle");
    }

    Cat input;
    if (std::holds_alternative<Ground>(state)) {
        input.components = {{1.0, ComplexAmp{0.0, 0.0}}};
    } else if (const auto* co = std::get_if<Coherent>(&state)) {
        input.components = {{1.0, co->amp}};
    } else {
        input = std::get<Cat>(state);
    }

    const WindowOps ops = window_ops(spec, params);
    const DisplacementRecord rec = integrate_schedule(params, spec.schedule);
    const std::complex<double> g_factor = 0.5 * std::exp(kI * rec.phi_g);
    const std::complex<double> e_factor = 0.5 * std::exp(kI * (rec.phi_e + spec.phi));

    // E_pm |a> = 1/2 [ e^{i phi_g} D(alpha_g) +- e^{i(phi_e + phi)} D(alpha_e) ] |a>
    // in the rotated-amplitude frame; each component splits into two.
    auto branch = [](std::complex<double> factor, ComplexAmp disp,
                     const CatComponent& c) {
        const double phase = std::imag(disp * std::conj(c.amp));
        return CatComponent{factor * c.weight * std::exp(kI * phase), disp + c.amp};
    };

    Cat plus;
    Cat minus;
    plus.components.reserve(2 * input.components.size());
    minus.components.reserve(2 * input.components.size());
    for (const auto& c : input.components) {
        const CatComponent cg = branch(g_factor, ops.alpha_g, c);
        const CatComponent ce = branch(e_factor, ops.alpha_e, c);
        plus.components.push_back(cg);
        plus.components.push_back(ce);
        minus.components.push_back(cg);
        minus.components.push_back(CatComponent{-ce.weight, ce.amp});
    }

    auto finalize = [](Cat cat) {
        ConditionedOutcome out;
        out.probability = cat_norm_squared(cat);
        if (out.probability < kProbFloor) {
            out.probability = std::max(out.probability, 0.0);
            return out;
        }
        const double scale = 1.0 / std::sqrt(out.probability);
        for (auto& c : cat.components) {
            c.weight *= scale;
        }
        out.state = OscillatorState{std::move(cat)};
        return out;
    };

    return {finalize(std::move(plus)), finalize(std::move(minus))};
}

double correlation(const CorrelationRequest& request, const SystemParams& params) {
    validate(request);
    const std::size_t n = request.specs.size();

    std::vector<WindowOps> windows;
    windows.reserve(n);
    for (const auto& spec : request.specs) {
        windows.push_back(window_ops(spec, params));
    }

    // Expand Tr{Q_n ... Q_1 rho}: each superoperator contributes either
    // e^{+i psi_k} D(ae_k) . D(ag_k)^dag or e^{-i psi_k} D(ag_k) . D(ae_k)^dag.
    // The left and right strings reduce to single displacements, and
    // Tr{D(L) rho D(R)^dag} = e^{-i Im(R L*)} <D(L - R)>.
    std::complex<double> sum = 0.0;
    const std::size_t terms = std::size_t{1} << n;
    const double weight = std::ldexp(1.0, -static_cast<int>(n));
    for (std::size_t mask = 0; mask < terms; ++mask) {
        DisplacementProduct left{ComplexAmp{0.0, 0.0}, 0.0};
        DisplacementProduct right{ComplexAmp{0.0, 0.0}, 0.0};
        double phase = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool take_e_left = (mask >> k) & 1u;
            const WindowOps& w = windows[k];
            const ComplexAmp bl = take_e_left ? w.alpha_e : w.alpha_g;
            const ComplexAmp br = take_e_left ? w.alpha_g : w.alpha_e;
            phase += take_e_left ? w.psi : -w.psi;
            left.accumulated_phase += std::imag(bl * std::conj(left.total_amp));
            left.total_amp += bl;
            right.accumulated_phase += std::imag(br * std::conj(right.total_amp));
            right.total_amp += br;
        }
        phase += left.accumulated_phase - right.accumulated_phase -
                 std::imag(right.total_amp * std::conj(left.total_amp));
        sum += std::exp(kI * phase) *
               expect_displacement(request.initial, left.total_amp - right.total_amp);
    }
    return weight * std::real(sum);
}

double two_time_closed_form(ComplexAmp alpha1, ComplexAmp alpha2, double phibar1,
                            double phibar2, const OscillatorState& state) {
    const double gamma = std::imag(std::conj(alpha1) * alpha2);
    const std::complex<double> sum_term =
        std::exp(kI * (phibar1 + phibar2 + gamma)) *
        expect_displacement(state, alpha1 + alpha2);
    const std::complex<double> diff_term =
        std::exp(kI * (phibar1 - phibar2 - gamma)) *
        expect_displacement(state, alpha1 - alpha2);
    return 0.5 * (std::real(sum_term) + std::real(diff_term));
}

double three_point_commuting(const std::array<MeasurementSpec, 3>& specs,
                             const OscillatorState& state, const SystemParams& params) {
    std::array<WindowOps, 3> windows;
    std::array<double, 3> phases;
    for (std::size_t k = 0; k < 3; ++k) {
        validate(specs[k]);
        windows[k] = window_ops(specs[k], params);
        phases[k] = windows[k].phibar;
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            const double comm =
                std::imag(std::conj(windows[i].alpha_rel) * windows[j].alpha_rel);
            if (std::abs(comm) > 1e-10) {
                throw std::invalid_argument(
                    "three_point_commuting: amplitudes " + std::to_string(i + 1) +
                    " and " + std::to_string(j + 1) +
                    " do not commute (Im(a_i* a_j) = " + std::to_string(comm) + ")");
            }
        }
    }

    // Product of three plain operators Q(phibar, alpha): 8 signed displacements.
    std::complex<double> sum = 0.0;
    for (unsigned mask = 0; mask < 8; ++mask) {
        double phase = 0.0;
        DisplacementProduct prod{ComplexAmp{0.0, 0.0}, 0.0};
        for (std::size_t k = 0; k < 3; ++k) {
            const double sign = ((mask >> k) & 1u) ? 1.0 : -1.0;
            phase += sign * phases[k];
            const ComplexAmp a = sign * windows[k].alpha_rel;
            prod.accumulated_phase += std::imag(a * std::conj(prod.total_amp));
            prod.total_amp += a;
        }
        sum += std::exp(kI * (phase + prod.accumulated_phase)) *
               expect_displacement(state, prod.total_amp);
    }
    return 0.125 * std::real(sum);
}

}  // namespace rlg
