#include <doctest.h>

#include <cmath>

#include "rlg/decoherence.hpp"
#include "rlg/fock_oracle.hpp"
#include "test_helpers.hpp"

using namespace rlg;
using deco::BathParams;
using testing::kPi;

TEST_CASE("decayed_two_time limits") {
    SUBCASE("no damping is the identity") {
        const BathParams bath{0.0, 0.7};
        const ComplexAmp a2{1.2, -0.4};
        int calls = 0;
        const double value = deco::decayed_two_time(a2, 3.0, bath, [&](ComplexAmp a) {
            ++calls;
            CHECK(std::abs(a - a2) < 1e-15);
            return 0.42;
        });
        CHECK(calls == 1);
        CHECK(value == doctest::Approx(0.42).epsilon(1e-15));
    }
    SUBCASE("long waits wash the fringes out") {
        const BathParams bath{0.5, 1.5};
        const ComplexAmp a2{2.0, 0.0};
        const double value = deco::decayed_two_time(a2, 1e6, bath, [&](ComplexAmp a) {
            CHECK(std::abs(a) < 1e-8);
            return 1.0;
        });
        CHECK(value == doctest::Approx(std::exp(-2.0 * 4.0)).epsilon(1e-10));
    }
    SUBCASE("negative wait rejected") {
        const BathParams bath{0.1, 0.0};
        CHECK_THROWS_AS(
            deco::decayed_two_time({1.0, 0.0}, -1.0, bath, [](ComplexAmp) { return 0.0; }),
            std::invalid_argument);
    }
}

TEST_CASE("window propagation reduces to the closed system at Gamma = 0") {
    CounterRng rng(3);
    const BathParams bath{0.0, 0.0};
    for (int i = 0; i < 30; ++i) {
        const SystemParams params{rng.uniform(0.5, 2.0), rng.uniform(0.1, 1.0)};
        const auto schedule = testing::random_two_level_schedule(rng);
        const auto sol = deco::propagate_window(schedule, params, bath);
        const auto rec = integrate_schedule(params, schedule);
        CHECK(sol.phase == doctest::Approx(rec.phi_tot).epsilon(1e-11));
        CHECK(sol.zeta == doctest::Approx(std::norm(rec.alpha_rel)).epsilon(1e-11));
    }
}

TEST_CASE("measurement_window_expectation") {
    SUBCASE("closed-system limit equals the coherent expectation") {
        CounterRng rng(5);
        const BathParams closed{0.0, 0.8};
        for (int i = 0; i < 20; ++i) {
            const SystemParams params{1.0, rng.uniform(0.1, 1.0)};
            const auto schedule = testing::random_two_level_schedule(rng);
            const double tau = schedule.total_duration();
            const MeasurementSpec spec{rng.uniform(0.0, 2.0 * kPi), tau, tau, schedule};
            CHECK(deco::measurement_window_expectation(spec, params, closed,
                                                       Thermal{0.8}) ==
                  doctest::Approx(single_expectation(Thermal{0.8}, spec, params))
                      .epsilon(1e-11));
        }
    }
    SUBCASE("initial occupation must match the bath") {
        const SystemParams params{1.0, 0.4};
        const BathParams bath{0.01, 1.0};
        const MeasurementSpec spec{0.0, 1.0, 1.0, static_window(1.0)};
        CHECK_THROWS_AS(
            deco::measurement_window_expectation(spec, params, bath, Thermal{0.3}),
            std::invalid_argument);
    }
    SUBCASE("weak-damping zeta asymptote") {
        const SystemParams params{1.0, 0.7};
        const double gamma = 1e-3;
        const BathParams bath{gamma, 0.0};
        for (const double t : {2.0, 7.0, 15.0, 12.0 * kPi}) {
            const auto sol = deco::propagate_window(static_window(t), params, bath);
            const double approx = deco::zeta_weak_damping(params, gamma, t);
            CHECK(std::abs(sol.zeta - approx) <
                  20.0 * gamma * (2.0 * params.lambda * params.lambda) * (1.0 + t));
        }
    }
    SUBCASE("zeta is non-negative and secularly increasing") {
        CounterRng rng(7);
        for (int i = 0; i < 25; ++i) {
            const SystemParams params{1.0, rng.uniform(0.1, 1.0)};
            const BathParams bath{rng.uniform(0.0, 0.05), rng.uniform(0.0, 2.0)};
            const auto schedule = testing::random_three_level_schedule(rng);
            CHECK(deco::propagate_window(schedule, params, bath).zeta >= -1e-12);
        }
        const SystemParams params{1.0, 0.6};
        const BathParams bath{0.01, 1.0};
        double prev = 0.0;
        for (int k = 1; k <= 8; ++k) {
            const double zeta =
                deco::propagate_window(static_window(2.0 * kPi * k), params, bath).zeta;
            CHECK(zeta >= prev - 1e-12);
            prev = zeta;
        }
    }
}

TEST_CASE("window expectation matches the Lindblad oracle") {
    // lambda/omega = 1, omega t = 4 pi, Gamma/omega = 0.01, N = 1, T2 = inf
    const SystemParams params{1.0, 1.0};
    const BathParams bath{0.01, 1.0};
    const double t = 4.0 * kPi;
    const MeasurementSpec spec{0.6, t, t, static_window(t)};

    const double analytic =
        deco::measurement_window_expectation(spec, params, bath, Thermal{1.0});

    const int dim = 60;
    fock::JointState joint = fock::make_joint(fock::fock_thermal(dim, 1.0));
    fock::apply_pi_half(joint, spec.phi);
    fock::evolve_schedule_lindblad(joint, spec.schedule, params, bath);
    fock::apply_pi_half(joint, 0.0);
    const auto readout = fock::measure_z(joint);
    const double oracle = readout.p_plus - readout.p_minus;

    CHECK(std::abs(analytic - oracle) < 1e-3);

    SUBCASE("finite T2 and a pulsed window") {
        const SystemParams p2{1.0, 0.3};
        const BathParams b2{0.02, 0.5, 40.0};
        const auto schedule = resonant_train(p2, 3);
        const double tau = schedule.total_duration();
        const MeasurementSpec s2{1.2, tau, tau, schedule};
        const double a2 = deco::measurement_window_expectation(s2, p2, b2, Thermal{0.5});

        fock::JointState j2 = fock::make_joint(fock::fock_thermal(48, 0.5));
        fock::apply_pi_half(j2, s2.phi);
        fock::evolve_schedule_lindblad(j2, s2.schedule, p2, b2);
        fock::apply_pi_half(j2, 0.0);
        const auto r2 = fock::measure_z(j2);
        CHECK(std::abs(a2 - (r2.p_plus - r2.p_minus)) < 1e-3);
    }
}

TEST_CASE("effective decoherence rate") {
    SUBCASE("closed system has zero rate") {
        const auto rate =
            deco::effective_decoherence_rate({1.0, 1.0}, BathParams{0.0, 0.0});
        CHECK(rate.quoted == 0.0);
        CHECK(std::abs(rate.fitted_slope) < 1e-12);
    }
    SUBCASE("quoted value and the factor-two tension of the exact slope") {
        const SystemParams params{1.0, 1.0};
        const BathParams bath{0.001, 10.0};
        const auto rate = deco::effective_decoherence_rate(params, bath);
        CHECK(rate.quoted == doctest::Approx(0.021).epsilon(1e-12));
        // exact envelope slope is (N + 1/2) (lambda/omega)^2 Gamma
        CHECK(rate.fitted_slope == doctest::Approx(0.0105).epsilon(0.02));
    }
    SUBCASE("pure dephasing limit") {
        const auto rate =
            deco::effective_decoherence_rate({1.0, 0.1}, BathParams{0.0, 0.0, 5.0});
        CHECK(rate.quoted == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(rate.fitted_slope == doctest::Approx(0.2).epsilon(1e-6));
    }
}

TEST_CASE("cat_wigner closed form") {
    const ComplexAmp alpha1{2.0, 1.0};
    const double phibar1 = 0.7;
    const double p_plus =
        0.5 * (1.0 + std::cos(phibar1) * std::exp(-0.5 * std::norm(alpha1)));
    const double extent = std::abs(alpha1) + 5.0;
    const WignerGridSpec grid{-extent, extent, -extent, extent, 101, 101};

    SUBCASE("pure cat integrates to one") {
        const BathParams bath{0.0, 0.0};
        const auto w = deco::cat_wigner(alpha1, phibar1, p_plus, 0.0, bath, grid);
        CHECK(std::abs(w.integral() - 1.0) < 1e-3);
    }
    SUBCASE("decohered cat stays normalized") {
        const BathParams bath{0.05, 2.0};
        const auto w = deco::cat_wigner(alpha1, phibar1, p_plus, 3.0, bath, grid);
        CHECK(std::abs(w.integral() - 1.0) < 1e-3);
    }
    SUBCASE("inconsistent p_plus rejected") {
        const BathParams bath{0.0, 0.0};
        CHECK_THROWS_AS(
            deco::cat_wigner(alpha1, phibar1, p_plus + 1e-3, 0.0, bath, grid),
            std::invalid_argument);
    }
    SUBCASE("fringe amplitude carries the printed damping factor") {
        const BathParams bath{0.002, 20.0};  // Gamma_th dt = 0.04 at dt = 1
        const double dt = 1.0;
        const double decay = std::exp(-bath.gamma * dt);
        const double nu = 1.0 + 2.0 * bath.n_eq * (1.0 - decay);
        const ComplexAmp a_dec = alpha1 * std::sqrt(decay);
        const ComplexAmp center = 0.5 * a_dec;
        const WignerGridSpec point{center.real(), center.real() + 1e-3,
                                   center.imag(), center.imag() + 1e-3, 2, 2};
        const auto w = deco::cat_wigner(alpha1, phibar1, p_plus, dt, bath, point);

        const double gaussians =
            std::exp(-2.0 * std::norm(center) / nu) +
            std::exp(-2.0 * std::norm(center - a_dec) / nu);
        const double fringe_damp =
            std::exp(-0.5 * std::norm(alpha1) * (1.0 - decay / nu));
        const double expected =
            (gaussians + 2.0 * fringe_damp *
                             std::cos(phibar1 + 2.0 / nu * std::imag(std::conj(center) * a_dec))) /
            (2.0 * kPi * nu * p_plus);
        CHECK(w.at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("long waits leave a two-Gaussian mixture") {
        const ComplexAmp big{5.0, 5.0};
        const double p_big = 0.5 * (1.0 + std::cos(0.0) * std::exp(-0.5 * std::norm(big)));
        const BathParams bath{0.3, 1.0};
        const double dt = 200.0;
        const ComplexAmp center = 0.5 * big * std::exp(-0.5 * bath.gamma * dt);
        const WignerGridSpec point{center.real(), center.real() + 1e-3,
                                   center.imag(), center.imag() + 1e-3, 2, 2};
        const auto w = deco::cat_wigner(big, 0.0, p_big, dt, bath, point);
        const double nu = 1.0 + 2.0 * bath.n_eq;
        const double gaussians_only =
            (std::exp(-2.0 * std::norm(center) / nu) +
             std::exp(-2.0 * std::norm(center) / nu)) /
            (2.0 * kPi * nu * p_big);
        CHECK(std::abs(w.at(0, 0) - gaussians_only) / gaussians_only < 1e-10);
    }
}
