// phase_space.hpp — Displacement-operator algebra and expectation values over
// Gaussian and cat states. Everything here is a closed form; no truncation.

#pragma once

#include <complex>
#include <span>
#include <variant>
#include <vector>

namespace rlg {

// Dimensionless coherent amplitude / displacement argument.
using ComplexAmp = std::complex<double>;

// ---------------------------------------------------------------------------
// Oscillator states

struct Ground {};

struct Coherent {
    ComplexAmp amp;
};

struct Thermal {
    double nbar = 0.0;  // mean occupation, >= 0
};

struct CatComponent {
    std::complex<double> weight;
    ComplexAmp amp;
};

// Weighted superposition of coherent states, sum_j w_j |a_j>.
// Components are kept as given; coincident amplitudes are not merged.
struct Cat {
    std::vector<CatComponent> components;
};

using OscillatorState = std::variant<Ground, Coherent, Thermal, Cat>;

// <psi|psi> of the superposition described by `cat` (Gram-matrix sum).
double cat_norm_squared(const Cat& cat);

// Validating constructor: requires |<psi|psi> - 1| <= tol.
OscillatorState make_cat(std::vector<CatComponent> components, double tol = 1e-10);

// Rescales weights so the superposition has unit norm.
Cat normalize_cat(Cat cat);

bool is_pure(const OscillatorState& state);

// ---------------------------------------------------------------------------
// Displacement products

// e^{i accumulated_phase} D(total_amp), the scalar remainder of a product of
// displacement operators D(a_k)...D(a_1) reduced via
// D(b)D(a) = e^{i Im(b a*)} D(a+b).
struct DisplacementProduct {
    ComplexAmp total_amp;
    double accumulated_phase = 0.0;  // radians, unwrapped
};

// Reduces the operator product D(a_n)...D(a_2)D(a_1) for the given list
// [a_1, a_2, ..., a_n] by a left fold. Throws std::invalid_argument on an
// empty list.
DisplacementProduct compose_displacements(std::span<const ComplexAmp> amps);

// Composes two already-reduced products, left acting after right:
// e^{i l.phase} D(l.amp) . e^{i r.phase} D(r.amp).
DisplacementProduct compose_products(const DisplacementProduct& left,
                                     const DisplacementProduct& right);

// ---------------------------------------------------------------------------
// Expectation values

// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)
std::complex<double> coherent_overlap(ComplexAmp a, ComplexAmp b);

// Tr{ D(alpha) rho } for the given analytic state:
//   ground        exp(-|alpha|^2/2)
//   thermal(nbar) exp(-|alpha|^2 (2 nbar + 1)/2)
//   coherent(b)   exp(-|alpha|^2/2) exp(alpha b* - alpha* b)
//   cat           double sum over components
std::complex<double> expect_displacement(const OscillatorState& state, ComplexAmp alpha);

// Re{ e^{i phi} <D(alpha)> }, the modular-variable expectation; in [-1, 1].
double modular_variable_expectation(const OscillatorState& state, double phi,
                                    ComplexAmp alpha);

}  // namespace rlg
