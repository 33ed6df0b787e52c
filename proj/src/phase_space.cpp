#include "rlg/phase_space.hpp"

#include <cmath>
#include <stdexcept>

namespace rlg {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

// <a_k| D(alpha) |a_j> in closed form:
// D(alpha)|a_j> = e^{i Im(alpha a_j*)} |alpha + a_j>
std::complex<double> displaced_matrix_element(ComplexAmp a_k, ComplexAmp alpha,
                                              ComplexAmp a_j) {
    const double phase = std::imag(alpha * std::conj(a_j));
    return std::exp(kI * phase) * coherent_overlap(a_k, alpha + a_j);
}

}  // namespace

double cat_norm_squared(const Cat& cat) {
    std::complex<double> acc = 0.0;
    for (const auto& j : cat.components) {
        for (const auto& k : cat.components) {
            acc += std::conj(k.weight) * j.weight * coherent_overlap(k.amp, j.amp);
        }
    }
    return std::real(acc);
}

OscillatorState make_cat(std::vector<CatComponent> components, double tol) {
    if (components.empty()) {
        throw std::invalid_argument("make_cat: no components");
    }
    Cat cat{std::move(components)};
    const double n2 = cat_norm_squared(cat);
    if (std::abs(n2 - 1.0) > tol) {
        throw std::invalid_argument("make_cat: superposition is not normalized");
    }
    return cat;
}

Cat normalize_cat(Cat cat) {
    const double n2 = cat_norm_squared(cat);
    if (!(n2 > 0.0)) {
        throw std::invalid_argument("normalize_cat: zero-norm superposition");
    }
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& c : cat.components) {
        c.weight *= scale;
    }
    return cat;
}

bool is_pure(const OscillatorState& state) {
    return !std::holds_alternative<Thermal>(state);
}

DisplacementProduct compose_displacements(std::span<const ComplexAmp> amps) {
    if (amps.empty()) {
        throw std::invalid_argument("compose_displacements: empty list");
    }
    DisplacementProduct out{ComplexAmp{0.0, 0.0}, 0.0};
    for (const ComplexAmp& a : amps) {
        out.accumulated_phase += std::imag(a * std::conj(out.total_amp));
        out.total_amp += a;
    }
    return out;
}

DisplacementProduct compose_products(const DisplacementProduct& left,
                                     const DisplacementProduct& right) {
    DisplacementProduct out;
    out.accumulated_phase = left.accumulated_phase + right.accumulated_phase +
                            std::imag(left.total_amp * std::conj(right.total_amp));
    out.total_amp = left.total_amp + right.total_amp;
    return out;
}

std::complex<double> coherent_overlap(ComplexAmp a, ComplexAmp b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

std::complex<double> expect_displacement(const OscillatorState& state, ComplexAmp alpha) {
    const double a2 = std::norm(alpha);
    if (std::holds_alternative<Ground>(state)) {
        return std::exp(-0.5 * a2);
    }
    if (const auto* th = std::get_if<Thermal>(&state)) {
        if (th->nbar < 0.0) {
            throw std::invalid_argument("expect_displacement: nbar < 0");
        }
        return std::exp(-0.5 * a2 * (2.0 * th->nbar + 1.0));
    }
    if (const auto* co = std::get_if<Coherent>(&state)) {
        const ComplexAmp b = co->amp;
        return std::exp(-0.5 * a2) * std::exp(alpha * std::conj(b) - std::conj(alpha) * b);
    }
    const auto& cat = std::get<Cat>(state);
    std::complex<double> acc = 0.0;
    for (const auto& j : cat.components) {
        for (const auto& k : cat.components) {
            acc += std::conj(k.weight) * j.weight *
                   displaced_matrix_element(k.amp, alpha, j.amp);
        }
    }
    return acc;
}

double modular_variable_expectation(const OscillatorState& state, double phi,
                                    ComplexAmp alpha) {
    const std::complex<double> chi = expect_displacement(state, alpha);
    return std::real(std::exp(kI * phi) * chi);
}

}  // namespace rlg
