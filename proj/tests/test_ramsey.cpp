#include <doctest.h>

#include <array>
#include <cmath>

#include "rlg/fock_oracle.hpp"
#include "rlg/ramsey.hpp"
#include "test_helpers.hpp"

using namespace rlg;
using testing::kPi;

namespace {

// Two identical static windows realizing |alpha(tau)| = alpha_mag, separated
// by theta = omega (t2 - t1).
CorrelationRequest two_window_request(const SystemParams& params, double omega_tau,
                                      double theta, double phibar1, double phibar2,
                                      OscillatorState initial) {
    const double tau = omega_tau / params.omega;
    const double t1 = tau;
    const double t2 = t1 + theta / params.omega;
    CorrelationRequest req;
    req.specs = {testing::static_spec(params, omega_tau, t1, phibar1),
                 testing::static_spec(params, omega_tau, t2, phibar2)};
    req.initial = std::move(initial);
    return req;
}

}  // namespace

TEST_CASE("single_expectation closed forms") {
    SUBCASE("ground state, static window, phibar = 0") {
        const SystemParams params{1.0, 0.8};
        const double tau = 1.7;
        MeasurementSpec spec{0.0, tau, tau, static_window(tau)};
        spec.phi = -integrate_schedule(params, spec.schedule).phi_tot;
        const auto rec = integrate_schedule(params, spec.schedule);
        CHECK(single_expectation(Ground{}, spec, params) ==
              doctest::Approx(std::exp(-0.5 * std::norm(rec.alpha_rel))).epsilon(1e-12));
    }
    SUBCASE("no coupling measures cos(phi)") {
        const SystemParams params{1.0, 0.0};
        const MeasurementSpec spec{1.1, 2.0, 2.0, static_window(2.0)};
        CHECK(single_expectation(Thermal{0.7}, spec, params) ==
              doctest::Approx(std::cos(1.1)).epsilon(1e-13));
    }
    SUBCASE("thermal nbar = 1 at unit displacement") {
        // |alpha(tau)| = 1 via omega tau = pi, lambda/omega = 1/2
        const SystemParams params{1.0, 0.5};
        const auto spec = testing::static_spec(params, kPi, kPi, kPi / 3.0);
        CHECK(single_expectation(Thermal{1.0}, spec, params) ==
              doctest::Approx(0.5 * std::exp(-1.5)).epsilon(1e-12));
    }
}

TEST_CASE("measure_conditioned reproduces the conditioned superposition") {
    const SystemParams params{1.0, 0.5};
    const double phibar1 = 0.9;
    const auto spec = testing::static_spec(params, kPi, kPi, phibar1);
    const auto ops = window_ops(spec, params);

    const auto [plus, minus] = measure_conditioned(Ground{}, spec, params);
    const double a2 = std::norm(ops.alpha_rel);
    CHECK(plus.probability ==
          doctest::Approx(0.5 * (1.0 + std::cos(phibar1) * std::exp(-0.5 * a2)))
              .epsilon(1e-12));
    CHECK(plus.probability + minus.probability == doctest::Approx(1.0).epsilon(1e-12));

    // |psi+> = (|0> + e^{i phibar} |alpha_1>) / sqrt(4 p+)
    const std::complex<double> phase{std::cos(phibar1), std::sin(phibar1)};
    Cat expected{{{0.5 / std::sqrt(plus.probability), {0.0, 0.0}},
                  {0.5 * phase / std::sqrt(plus.probability), ops.alpha_rel}}};
    CounterRng rng(3);
    for (int i = 0; i < 10; ++i) {
        const auto probe = testing::random_amp(rng, 2.0);
        CHECK(std::abs(expect_displacement(*plus.state, probe) -
                       expect_displacement(OscillatorState{expected}, probe)) < 1e-12);
    }
}

TEST_CASE("two sequential measurements build the four-component superposition") {
    const SystemParams params{1.0, 0.5};
    const double phibar1 = 0.4, phibar2 = -0.7;
    const auto spec1 = testing::static_spec(params, kPi, kPi, phibar1);
    const auto spec2 = testing::static_spec(params, kPi, kPi + 2.2, phibar2);

    const auto ops1 = window_ops(spec1, params);
    const auto ops2 = window_ops(spec2, params);
    const auto [plus1, minus1] = measure_conditioned(Ground{}, spec1, params);
    const auto [plus2, minus2] = measure_conditioned(*plus1.state, spec2, params);

    CHECK(std::get<Cat>(*plus2.state).components.size() == 4);

    // (|0> + e^{i pb1}|a1> + e^{i pb2}|a2> + e^{i(pb1+pb2+gamma)}|a1+a2>) / norm
    const double gamma = std::imag(std::conj(ops1.alpha_rel) * ops2.alpha_rel);
    auto ph = [](double p) { return std::complex<double>{std::cos(p), std::sin(p)}; };
    Cat expected{{{1.0, {0.0, 0.0}},
                  {ph(phibar1), ops1.alpha_rel},
                  {ph(phibar2), ops2.alpha_rel},
                  {ph(phibar1 + phibar2 + gamma), ops1.alpha_rel + ops2.alpha_rel}}};
    const OscillatorState reference = normalize_cat(expected);

    CounterRng rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto probe = testing::random_amp(rng, 2.0);
        CHECK(std::abs(expect_displacement(*plus2.state, probe) -
                       expect_displacement(reference, probe)) < 1e-11);
    }
}

TEST_CASE("two_time_closed_form edge cases") {
    SUBCASE("no displacements factorize") {
        CHECK(two_time_closed_form({0.0, 0.0}, {0.0, 0.0}, 0.7, 1.9, Thermal{0.4}) ==
              doctest::Approx(std::cos(0.7) * std::cos(1.9)).epsilon(1e-14));
    }
    SUBCASE("opposite amplitudes keep an undamped fringe term") {
        // theta = pi makes alpha2 = -alpha1; the D(alpha1 + alpha2) = 1 term
        // survives at any amplitude while the other is crushed.
        const ComplexAmp a{4.0, 3.0};
        const double p1 = 0.3, p2 = 1.4;
        const double gamma = std::imag(std::conj(a) * (-a));
        const double c = two_time_closed_form(a, -a, p1, p2, Thermal{1.0});
        CHECK(c == doctest::Approx(0.5 * std::cos(p1 + p2 + gamma)).epsilon(1e-12));
    }
}

TEST_CASE("analytic conditioned probabilities match the matrix Kraus pair") {
    CounterRng rng(43);
    for (int i = 0; i < 10; ++i) {
        const SystemParams params{1.0, rng.uniform(0.1, 0.6)};
        const auto schedule = (i % 2 == 0)
                                  ? static_window(rng.uniform(0.5, 2.5))
                                  : testing::random_two_level_schedule(rng, false);
        const double tau = schedule.total_duration();
        const MeasurementSpec spec{rng.uniform(0.0, 2.0 * kPi), tau, tau, schedule};

        const OscillatorState state =
            (i % 3 == 0) ? OscillatorState{Ground{}}
                         : OscillatorState{Coherent{testing::random_amp(rng, 0.8)}};
        const auto [plus, minus] = measure_conditioned(state, spec, params);

        const auto rec = integrate_schedule(params, spec.schedule);
        const int dim = fock::adequate_dim(std::abs(rec.alpha_e) +
                                           std::abs(rec.alpha_g) + 1.0);
        const auto oracle =
            fock::kraus_measure(fock::fock_state(dim, state), spec, params);
        CHECK(plus.probability == doctest::Approx(oracle.p_plus).epsilon(1e-8));
        CHECK(minus.probability == doctest::Approx(oracle.p_minus).epsilon(1e-8));
    }
}

TEST_CASE("measure_conditioned edge cases") {
    SUBCASE("no coupling, phi = 0 is a deterministic plus outcome") {
        const SystemParams params{1.0, 0.0};
        const MeasurementSpec spec{0.0, 1.0, 1.0, static_window(1.0)};
        const OscillatorState in = Coherent{{0.7, -0.3}};
        const auto [plus, minus] = measure_conditioned(in, spec, params);
        CHECK(plus.probability == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(minus.probability == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(!minus.state.has_value());
        CounterRng rng(7);
        for (int i = 0; i < 5; ++i) {
            const auto probe = testing::random_amp(rng, 1.5);
            CHECK(std::abs(expect_displacement(*plus.state, probe) -
                           expect_displacement(in, probe)) < 1e-12);
        }
    }
    SUBCASE("thermal input is rejected") {
        const SystemParams params{1.0, 0.3};
        const MeasurementSpec spec{0.0, 1.0, 1.0, static_window(1.0)};
        CHECK_THROWS_AS(measure_conditioned(Thermal{0.5}, spec, params),
                        std::invalid_argument);
    }
}

TEST_CASE("correlation reproduces the thermal two-time closed form") {
    // theta = pi/2, |alpha| = 1, nbar = 0, phibar = 0: C = cos(1)/e
    const double omega_tau = kPi / 4.0;
    const SystemParams params{1.0, testing::lambda_for_alpha(1.0, 1.0, omega_tau)};
    const auto req =
        two_window_request(params, omega_tau, kPi / 2.0, 0.0, 0.0, Ground{});
    CHECK(correlation(req, params) ==
          doctest::Approx(std::cos(1.0) * std::exp(-1.0)).epsilon(1e-12));

    SUBCASE("general thermal grid matches the printed formula") {
        CounterRng rng(11);
        for (int i = 0; i < 50; ++i) {
            const double alpha = rng.uniform(0.1, 1.5);
            const double theta = rng.uniform(omega_tau, 2.0 * kPi);
            const double nbar = rng.uniform(0.0, 1.5);
            const double p1 = rng.uniform(0.0, 2.0 * kPi);
            const double p2 = rng.uniform(0.0, 2.0 * kPi);
            const SystemParams sp{1.0, testing::lambda_for_alpha(alpha, 1.0, omega_tau)};
            const auto request =
                two_window_request(sp, omega_tau, theta, p1, p2, Thermal{nbar});

            const double x = alpha * alpha * (2.0 * nbar + 1.0);
            const double gamma = alpha * alpha * std::sin(theta);
            const double expected =
                0.5 * (std::cos(p1 + p2 + gamma) * std::exp(-x * (1.0 + std::cos(theta))) +
                       std::cos(p1 - p2 - gamma) * std::exp(-x * (1.0 - std::cos(theta))));
            CHECK(correlation(request, sp) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("no displacement factorizes into cosines") {
    const SystemParams params{1.0, 0.0};
    const auto req = two_window_request(params, 0.5, 2.0, 0.8, -0.4, Thermal{2.0});
    CHECK(correlation(req, params) ==
          doctest::Approx(std::cos(0.8) * std::cos(-0.4)).epsilon(1e-13));
}

TEST_CASE("correlation equals two_time_closed_form at n = 2") {
    CounterRng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const SystemParams params{1.0, rng.uniform(0.05, 1.2)};
        const double tau1 = rng.uniform(0.2, 2.0);
        const double tau2 = rng.uniform(0.2, 2.0);
        const double t1 = tau1 + rng.uniform(0.0, 1.0);
        const double t2 = t1 + tau2 + rng.uniform(0.0, 3.0);
        MeasurementSpec s1{rng.uniform(0.0, 2.0 * kPi), tau1, t1, static_window(tau1)};
        MeasurementSpec s2{rng.uniform(0.0, 2.0 * kPi), tau2, t2, static_window(tau2)};

        OscillatorState state;
        const double which = rng.uniform01();
        if (which < 0.4) {
            state = Thermal{rng.uniform(0.0, 2.0)};
        } else if (which < 0.7) {
            state = Ground{};
        } else {
            state = Coherent{testing::random_amp(rng, 1.0)};
        }

        const CorrelationRequest req{{s1, s2}, state};
        const auto w1 = window_ops(s1, params);
        const auto w2 = window_ops(s2, params);
        const double direct = two_time_closed_form(w1.alpha_rel, w2.alpha_rel,
                                                   w1.phibar, w2.phibar, state);
        CHECK(correlation(req, params) == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("correlation magnitude never exceeds 1") {
    CounterRng rng(17);
    for (int i = 0; i < 200; ++i) {
        const SystemParams params{1.0, rng.uniform(0.0, 1.0)};
        const int n = 1 + static_cast<int>(rng.uniform01() * 4);
        CorrelationRequest req;
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            const double tau = rng.uniform(0.2, 1.5);
            t += tau + rng.uniform(0.0, 1.0);
            req.specs.push_back(MeasurementSpec{rng.uniform(0.0, 2.0 * kPi), tau, t,
                                                static_window(tau)});
        }
        req.initial = Thermal{rng.uniform(0.0, 1.0)};
        CHECK(std::abs(correlation(req, params)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("reconstruction from conditioned states equals the correlator") {
    CounterRng rng(19);
    for (int i = 0; i < 50; ++i) {
        const SystemParams params{1.0, rng.uniform(0.1, 0.9)};
        const double tau1 = rng.uniform(0.3, 1.5);
        const double tau2 = rng.uniform(0.3, 1.5);
        const double t1 = tau1;
        const double t2 = t1 + tau2 + rng.uniform(0.0, 2.0);
        const MeasurementSpec s1{rng.uniform(0.0, 2.0 * kPi), tau1, t1,
                                 static_window(tau1)};
        const MeasurementSpec s2{rng.uniform(0.0, 2.0 * kPi), tau2, t2,
                                 static_window(tau2)};

        const OscillatorState initial =
            (i % 2 == 0) ? OscillatorState{Ground{}}
                         : OscillatorState{Coherent{testing::random_amp(rng, 0.8)}};

        const auto [plus, minus] = measure_conditioned(initial, s1, params);
        double reconstructed = 0.0;
        if (plus.state.has_value()) {
            reconstructed += plus.probability * single_expectation(*plus.state, s2, params);
        }
        if (minus.state.has_value()) {
            reconstructed -= minus.probability * single_expectation(*minus.state, s2, params);
        }
        const double direct = correlation({{s1, s2}, initial}, params);
        CHECK(reconstructed == doctest::Approx(direct).epsilon(1e-12));
    }
}

TEST_CASE("modulated coupling matches the closed form with the shifted gamma") {
    CounterRng rng(23);
    for (int i = 0; i < 50; ++i) {
        const SystemParams params{1.0, rng.uniform(0.05, 0.4)};
        PulseSchedule mod1 = testing::random_two_level_schedule(rng, false);
        PulseSchedule mod2 = testing::random_two_level_schedule(rng, false);
        const double tau1 = mod1.total_duration();
        const double tau2 = mod2.total_duration();
        const double t1 = tau1;
        const double t2 = t1 + tau2 + rng.uniform(0.0, 2.0);
        const MeasurementSpec s1{rng.uniform(0.0, 2.0 * kPi), tau1, t1, mod1};
        const MeasurementSpec s2{rng.uniform(0.0, 2.0 * kPi), tau2, t2, mod2};
        const double nbar = rng.uniform(0.0, 1.0);

        const auto rec1 = integrate_schedule(params, mod1);
        const auto rec2 = integrate_schedule(params, mod2);
        const auto w1 = window_ops(s1, params);
        const auto w2 = window_ops(s2, params);

        // gamma = Im{ alpha(tau2) (alpha_e(tau1) + alpha_g(tau1))* e^{i omega (t2-t1)} }
        const std::complex<double> rot =
            std::exp(std::complex<double>(0.0, params.omega * (t2 - t1)));
        const double gamma = std::imag(rec2.alpha_rel *
                                       std::conj(rec1.alpha_e + rec1.alpha_g) * rot);

        const OscillatorState state = Thermal{nbar};
        const double e_plus = std::real(
            expect_displacement(state, w1.alpha_rel + w2.alpha_rel));
        const double e_minus = std::real(
            expect_displacement(state, w1.alpha_rel - w2.alpha_rel));
        const double closed =
            0.5 * (std::cos(w1.phibar + w2.phibar + gamma) * e_plus +
                   std::cos(w1.phibar - w2.phibar - gamma) * e_minus);

        const double full = correlation({{s1, s2}, state}, params);
        CHECK(full == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("three_point_commuting") {
    const SystemParams zero{1.0, 0.0};
    SUBCASE("no displacement factorizes") {
        std::array<MeasurementSpec, 3> specs{
            MeasurementSpec{0.3, 1.0, 1.0, static_window(1.0)},
            MeasurementSpec{1.1, 1.0, 3.0, static_window(1.0)},
            MeasurementSpec{2.2, 1.0, 5.0, static_window(1.0)}};
        CHECK(three_point_commuting(specs, Thermal{0.5}, zero) ==
              doctest::Approx(std::cos(0.3) * std::cos(1.1) * std::cos(2.2))
                  .epsilon(1e-13));
    }

    SUBCASE("collinear displacements against the Fock-matrix product") {
        // Real amplitudes {+0.5, +0.5, -1.0} via window lengths and end times.
        const SystemParams params{1.0, testing::lambda_for_alpha(0.5, 1.0, kPi / 6.0)};
        const double tau_a = kPi / 6.0;
        // |alpha| = 1 needs sin(omega tau/2) twice as large
        const double tau_b = 2.0 * std::asin(2.0 * std::sin(kPi / 12.0));

        auto end_time = [&](double tau, int k, double sign_angle) {
            // arg(alpha(tau) e^{i omega t}) = -pi/2 - omega tau/2 + omega t;
            // choose t so the rotated amplitude lands on the requested axis.
            return (sign_angle + kPi / 2.0 + 0.5 * tau) + 2.0 * kPi * k;
        };
        const double t1 = end_time(tau_a, 0, 0.0);
        const double t2 = end_time(tau_a, 1, 0.0);
        const double t3 = end_time(tau_b, 2, kPi);

        std::array<MeasurementSpec, 3> specs{
            testing::static_spec(params, tau_a, t1, 0.0),
            testing::static_spec(params, tau_a, t2, 0.0),
            testing::static_spec(params, tau_b, t3, 0.0)};

        const auto w1 = window_ops(specs[0], params);
        const auto w2 = window_ops(specs[1], params);
        const auto w3 = window_ops(specs[2], params);
        REQUIRE(std::abs(w1.alpha_rel - ComplexAmp{0.5, 0.0}) < 1e-12);
        REQUIRE(std::abs(w2.alpha_rel - ComplexAmp{0.5, 0.0}) < 1e-12);
        REQUIRE(std::abs(w3.alpha_rel - ComplexAmp{-1.0, 0.0}) < 1e-12);

        // Oracle: explicit product of modular-variable matrices on |0><0|.
        const int dim = 32;
        auto q_matrix = [&](ComplexAmp a) {
            const auto d = fock::build_displacement(dim, a);
            return (0.5 * (d.mat + d.mat.adjoint())).eval();
        };
        const Eigen::MatrixXcd product =
            q_matrix(w3.alpha_rel) * q_matrix(w2.alpha_rel) * q_matrix(w1.alpha_rel);
        const double oracle = std::real(product(0, 0));

        const double value = three_point_commuting(specs, Ground{}, params);
        CHECK(value == doctest::Approx(oracle).epsilon(1e-9));
        // same eight-term sum by hand: (2 + 2 e^-2 + 4 e^-1/2)/8
        const double hand =
            (2.0 + 2.0 * std::exp(-2.0) + 4.0 * std::exp(-0.5)) / 8.0;
        CHECK(value == doctest::Approx(hand).epsilon(1e-12));
    }

    SUBCASE("non-commuting pair is rejected with the pair named") {
        const SystemParams params{1.0, 0.5};
        std::array<MeasurementSpec, 3> specs{
            testing::static_spec(params, kPi, kPi, 0.0),
            testing::static_spec(params, kPi, kPi + kPi / 2.0, 0.0),
            testing::static_spec(params, kPi, kPi + kPi, 0.0)};
        CHECK_THROWS_WITH_AS(three_point_commuting(specs, Ground{}, params),
                             doctest::Contains("1 and 2"), std::invalid_argument);
    }
}

TEST_CASE("request validation") {
    const SystemParams params{1.0, 0.3};
    SUBCASE("window cap") {
        CorrelationRequest req;
        double t = 0.0;
        for (int i = 0; i < 21; ++i) {
            t += 1.0;
            req.specs.push_back(MeasurementSpec{0.0, 1.0, t, static_window(1.0)});
        }
        req.initial = Ground{};
        CHECK_THROWS_AS(correlation(req, params), std::length_error);
    }
    SUBCASE("overlapping windows") {
        CorrelationRequest req;
        req.specs = {MeasurementSpec{0.0, 1.0, 1.0, static_window(1.0)},
                     MeasurementSpec{0.0, 1.0, 1.5, static_window(1.0)}};
        req.initial = Ground{};
        CHECK_THROWS_AS(correlation(req, params), std::invalid_argument);
    }
    SUBCASE("tau / schedule mismatch") {
        CHECK_THROWS_AS(validate(MeasurementSpec{0.0, 2.0, 2.0, static_window(1.0)}),
                        std::invalid_argument);
    }
}
