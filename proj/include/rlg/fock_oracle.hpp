// fock_oracle.hpp — Brute-force engine on a truncated Fock space: explicit
// operator matrices, Kraus measurements, full two-level x oscillator sequence
// evolution, Lindblad integration and displaced-parity Wigner functions.
// Everything the analytic modules claim is cross-checked against this.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "rlg/decoherence.hpp"
#include "rlg/phase_space.hpp"
#include "rlg/pulses.hpp"
#include "rlg/ramsey.hpp"
#include "rlg/wigner_grid.hpp"

namespace rlg::fock {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class truncation_error : public std::runtime_error {
public:
    truncation_error(const std::string& what, int required)
        : std::runtime_error(what), required_dim(required) {}

    int required_dim;
};

// Truncation dimension with a comfortable Poisson-tail margin for a total
// displacement budget `displacement_sum` (sum of |alpha_e| + |alpha_g| over
// the windows of a request), plus extra levels for the thermal tail.
int adequate_dim(double displacement_sum, double nbar = 0.0);

struct FockDensity {
    Matrix rho;

    int dim() const { return static_cast<int>(rho.rows()); }
};

struct FockOperator {
    Matrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// State constructors. Each validates that the truncated trace deficit is
// below 1e-10 (throwing truncation_error otherwise) and then normalizes the
// trace exactly.
FockDensity fock_ground(int dim);
FockDensity fock_coherent(int dim, ComplexAmp amp);
FockDensity fock_thermal(int dim, double nbar);
FockDensity fock_state(int dim, const OscillatorState& state);

// Diagnostics for the FockDensity invariants.
double hermiticity_defect(const FockDensity& rho);   // max |rho - rho^dag|
double trace_defect(const FockDensity& rho);         // |Tr rho - 1|
double min_eigenvalue(const FockDensity& rho);
double tail_population(const FockDensity& rho, double tail_fraction = 0.1);

// D(alpha) = exp(alpha a^dag - alpha* a) by scaling-and-squaring Pade of the
// dense generator. Throws truncation_error if dim < adequate_dim(|alpha|).
FockOperator build_displacement(int dim, ComplexAmp alpha);

// U0(t) = diag(e^{-i omega n t})
FockOperator build_free_rotation(int dim, double omega_t);

// Photon-number parity diag((-1)^n)
FockOperator build_parity(int dim);

// Operator 2-norm of M restricted to the non-tail block (lowest
// (1 - tail_fraction) levels).
double non_tail_norm(const Matrix& m, double tail_fraction = 0.1);

// The Kraus pair of one Ramsey window,
//   E_pm = (e^{i phi_g} D(alpha_g) +- e^{i (phi_e + phi)} D(alpha_e)) U0(tau) / 2,
// acting on a state given at the window start.
struct KrausPair {
    FockOperator e_plus;
    FockOperator e_minus;
};

KrausPair build_kraus(int dim, const MeasurementSpec& spec, const SystemParams& params);

struct KrausOutcome {
    double p_plus = 0.0;
    double p_minus = 0.0;
    // Conditioned states; absent when the outcome probability is below 1e-14.
    std::optional<FockDensity> rho_plus;
    std::optional<FockDensity> rho_minus;
};

KrausOutcome kraus_measure(const FockDensity& rho, const MeasurementSpec& spec,
                           const SystemParams& params);

// ---------------------------------------------------------------------------
// Joint two-level (x) oscillator states for full sequence evolution. The
// toggling functions of the schedule play the role of the pi-pulse pattern:
// each branch evolves under H_q = omega a^dag a + f_q (delta + lambda (a + a^dag)).

enum class QubitBranch { g, e };

struct JointState {
    // 2 dim x 2 dim, ordered as blocks [gg, ge; eg, ee] of the oscillator.
    Matrix rho;

    int fock_dim() const { return static_cast<int>(rho.rows()) / 2; }
    Eigen::Block<Matrix> block(QubitBranch row, QubitBranch col);
    Eigen::Block<const Matrix> block(QubitBranch row, QubitBranch col) const;
};

JointState make_joint(const FockDensity& osc, QubitBranch q = QubitBranch::g);

// pi/2 rotation R(phi): |g> -> (|g> + e^{i phi} |e>)/sqrt(2).
void apply_pi_half(JointState& state, double phi);

// Branch-resolved unitary evolution through the schedule segments.
void evolve_schedule(JointState& state, const PulseSchedule& schedule,
                     const SystemParams& params);

// Same evolution with the mechanical dissipator and qubit dephasing active
// (adaptive fixed-step RK4, halved until converged to 1e-9 in trace norm).
void evolve_schedule_lindblad(JointState& state, const PulseSchedule& schedule,
                              const SystemParams& params, const deco::BathParams& bath);

struct Readout {
    double p_plus = 0.0;   // qubit found in |e>
    double p_minus = 0.0;  // qubit found in |g>
    std::optional<FockDensity> rho_plus;
    std::optional<FockDensity> rho_minus;
};

Readout measure_z(const JointState& state);

// Conditional coherent amplitude Tr{a rho_qq} / Tr{rho_qq} of one branch.
ComplexAmp conditional_amplitude(const JointState& state, QubitBranch q);

// Full Ramsey window (pi/2, schedule, pi/2, projective readout); the
// independent derivation of kraus_measure.
Readout ramsey_window(const FockDensity& rho, const MeasurementSpec& spec,
                      const SystemParams& params);

// ---------------------------------------------------------------------------
// Lindblad propagation of the oscillator alone (free rotation + damping).

FockDensity lindblad_propagate(const FockDensity& rho, double t,
                               const SystemParams& params,
                               const deco::BathParams& bath);

// Undo a free rotation: e^{i omega_t n} rho e^{-i omega_t n}. Wigner closed
// forms for waiting periods are written in the co-rotating frame, so oracle
// states are counter-rotated before comparing.
FockDensity rotate_frame(const FockDensity& rho, double omega_t);

// ---------------------------------------------------------------------------
// Displaced-parity Wigner function W(xi) = (2/pi) Tr[rho D(xi) P D(xi)^dag],
// evaluated from the spectral decomposition of rho. Sets truncation_warning
// when the grid reaches displacements the truncation cannot support.
WignerGrid wigner_displaced_parity(const FockDensity& rho, const WignerGridSpec& grid);

// ---------------------------------------------------------------------------
// End-to-end correlator: the measurement superoperator product evaluated with
// explicit matrices, with free (or, when a bath is given, Lindblad) evolution
// between windows. n <= 4. dim = 0 picks adequate_dim from the request.
double oracle_correlation(const CorrelationRequest& request, const SystemParams& params,
                          const deco::BathParams* bath = nullptr, int dim = 0);

// Two-time correlator for explicitly given window amplitudes and phases; used
// by the CLI map mode where amplitudes are swept directly.
double oracle_two_time(ComplexAmp alpha1, ComplexAmp alpha2, double phibar1,
                       double phibar2, const FockDensity& rho);

}  // namespace rlg::fock
