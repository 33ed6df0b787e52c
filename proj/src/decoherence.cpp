#include "rlg/decoherence.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rlg {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

}  // namespace

void validate(const WignerGridSpec& spec) {
    if (!(spec.x_max > spec.x_min) || !(spec.p_max > spec.p_min)) {
        throw std::invalid_argument("WignerGridSpec: empty ranges");
    }
    if (spec.nx < 2 || spec.np < 2) {
        throw std::invalid_argument("WignerGridSpec: need at least 2 samples per axis");
    }
}

double WignerGridSpec::x_at(int i) const {
    return x_min + (x_max - x_min) * i / (nx - 1);
}

double WignerGridSpec::p_at(int j) const {
    return p_min + (p_max - p_min) * j / (np - 1);
}

double WignerGridSpec::cell_area() const {
    return (x_max - x_min) / (nx - 1) * (p_max - p_min) / (np - 1);
}

double WignerGrid::integral() const {
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum * spec.cell_area();
}

}  // namespace rlg

namespace rlg::deco {

void validate(const BathParams& bath) {
    if (!(bath.gamma >= 0.0) || !std::isfinite(bath.gamma)) {
        throw std::invalid_argument("BathParams: gamma must be >= 0");
    }
    if (!(bath.n_eq >= 0.0) || !std::isfinite(bath.n_eq)) {
        throw std::invalid_argument("BathParams: n_eq must be >= 0");
    }
    if (!(bath.t2 > 0.0)) {
        throw std::invalid_argument("BathParams: t2 must be positive");
    }
}

double decayed_two_time(ComplexAmp alpha2, double dt, const BathParams& bath,
                        const std::function<double(ComplexAmp)>& coherent_fn) {
    validate(bath);
    if (dt < 0.0) {
        throw std::invalid_argument("decayed_two_time: dt must be >= 0");
    }
    const double decay = std::exp(-bath.gamma * dt);
    const double blur =
        std::exp(-(bath.n_eq + 0.5) * std::norm(alpha2) * (1.0 - decay));
    return blur * coherent_fn(alpha2 * std::sqrt(decay));
}

WignerGrid cat_wigner(ComplexAmp alpha1, double phibar1, double p_plus, double dt,
                      const BathParams& bath, const WignerGridSpec& grid) {
    validate(bath);
    validate(grid);
    if (dt < 0.0) {
        throw std::invalid_argument("cat_wigner: dt must be >= 0");
    }
    const double p_expected =
        0.5 * (1.0 + std::cos(phibar1) * std::exp(-0.5 * std::norm(alpha1)));
    if (std::abs(p_plus - p_expected) > 1e-6) {
        throw std::invalid_argument("cat_wigner: p_plus inconsistent with (alpha1, phibar1)");
    }

    const double decay = std::exp(-bath.gamma * dt);
    const double nu = 1.0 + 2.0 * bath.n_eq * (1.0 - decay);
    const ComplexAmp a_dec = alpha1 * std::sqrt(decay);
    const double fringe_damp = std::exp(-0.5 * std::norm(alpha1) * (1.0 - decay / nu));
    const double norm = 1.0 / (2.0 * std::numbers::pi * nu * p_plus);

    WignerGrid out;
    out.spec = grid;
    out.values.resize(static_cast<std::size_t>(grid.nx) * grid.np);
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.np; ++j) {
            const ComplexAmp xi{grid.x_at(i), grid.p_at(j)};
            const double g0 = std::exp(-2.0 * std::norm(xi) / nu);
            const double g1 = std::exp(-2.0 * std::norm(xi - a_dec) / nu);
            const double gf = std::exp(-2.0 * std::norm(xi - 0.5 * a_dec) / nu);
            const double fringe =
                2.0 * gf * fringe_damp *
                std::cos(phibar1 + 2.0 / nu * std::imag(std::conj(xi) * a_dec));
            out.at(i, j) = norm * (g0 + g1 + fringe);
        }
    }
    return out;
}

WindowSolution propagate_window(const PulseSchedule& schedule,
                                const SystemParams& params, const BathParams& bath) {
    rlg::validate(params);
    rlg::validate(schedule);
    validate(bath);

    const std::complex<double> mu{bath.gamma / 2.0, params.omega};  // decay rate i w + G/2
    const double lambda = params.lambda;

    // Per segment the four ODEs are linear with constant forcing:
    //   alpha' = -mu alpha + c,   c = -i lambda f_+/2  (alpha_+)
    //                             c = +i lambda f_-    (alpha_-)
    //   phase' = -f_- delta - 2 lambda f_- Re(alpha_+)
    //   zeta'  =  2 lambda f_- Im(alpha_-)
    // so each update uses the exact exponential and its integral.
    WindowSolution s{};
    for (const auto& seg : schedule.segments) {
        const double f_minus = seg.f_e - seg.f_g;
        const double f_plus = seg.f_e + seg.f_g;
        const std::complex<double> decay = std::exp(-mu * seg.dt);
        const std::complex<double> c_plus = -kI * (0.5 * lambda * f_plus);
        const std::complex<double> c_minus = kI * (lambda * f_minus);

        // int_0^dt alpha(s) ds for alpha' = -mu alpha + c
        auto segment_integral = [&](std::complex<double> a0, std::complex<double> c) {
            const std::complex<double> fixed = c / mu;
            return (a0 - fixed) * (1.0 - decay) / mu + fixed * seg.dt;
        };

        const std::complex<double> int_plus = segment_integral(s.alpha_plus, c_plus);
        const std::complex<double> int_minus = segment_integral(s.alpha_minus, c_minus);

        s.phase += -f_minus * seg.delta * seg.dt -
                   2.0 * lambda * f_minus * std::real(int_plus);
        s.zeta += 2.0 * lambda * f_minus * std::imag(int_minus);

        auto step = [&](std::complex<double> a0, std::complex<double> c) {
            const std::complex<double> fixed = c / mu;
            return decay * (a0 - fixed) + fixed;
        };
        s.alpha_plus = step(s.alpha_plus, c_plus);
        s.alpha_minus = step(s.alpha_minus, c_minus);
    }
    return s;
}

double measurement_window_expectation(const MeasurementSpec& spec,
                                      const SystemParams& params,
                                      const BathParams& bath, const Thermal& state) {
    rlg::validate(spec);
    validate(bath);
    if (std::abs(state.nbar - bath.n_eq) > 1e-9) {
        throw std::invalid_argument(
            "measurement_window_expectation: the window solution assumes a thermal "
            "state at the bath occupation");
    }
    const WindowSolution s = propagate_window(spec.schedule, params, bath);
    const double t = spec.schedule.total_duration();
    const double dephasing = std::isinf(bath.t2) ? 1.0 : std::exp(-t / bath.t2);
    return std::cos(spec.phi + s.phase) * dephasing *
           std::exp(-(bath.n_eq + 0.5) * s.zeta);
}

double zeta_weak_damping(const SystemParams& params, double gamma, double t) {
    const double r = params.lambda / params.omega;
    return 2.0 * r * r *
           (1.0 - std::cos(params.omega * t) * std::exp(-0.5 * gamma * t) +
            0.5 * gamma * t);
}

DecoherenceRate effective_decoherence_rate(const SystemParams& params,
                                           const BathParams& bath) {
    rlg::validate(params);
    validate(bath);
    DecoherenceRate rate;
    rate.quoted = (std::isinf(bath.t2) ? 0.0 : 1.0 / bath.t2) +
                  (2.0 * bath.n_eq + 1.0) * bath.gamma;

    // Least-squares slope of t/T2 + (N + 1/2) zeta(t) for a static window,
    // sampled over omega t in [20 pi, 40 pi].
    const int n = 201;
    const double t_lo = 20.0 * std::numbers::pi / params.omega;
    const double t_hi = 40.0 * std::numbers::pi / params.omega;
    double st = 0.0, se = 0.0, stt = 0.0, ste = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (n - 1);
        const WindowSolution s = propagate_window(static_window(t), params, bath);
        const double envelope =
            (std::isinf(bath.t2) ? 0.0 : t / bath.t2) + (bath.n_eq + 0.5) * s.zeta;
        st += t;
        se += envelope;
        stt += t * t;
        ste += t * envelope;
    }
    rate.fitted_slope = (n * ste - st * se) / (n * stt - st * st);
    return rate;
}

}  // namespace rlg::deco
