#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "kinchem/internal.hpp"

using namespace kinchem;

namespace {

// Matrix-exponential oracle for the linear excitation/adaptation system with
// constant S: y' = A y + b, A upper-triangular with distinct eigenvalues.
YState linear_exact(const LinearExcAdapt& m, const YState& y0, double s, double t) {
    const double h = h_eval(m.h, s);
    const double le = -1.0 / m.tau_e, la = -1.0 / m.tau_a;
    // y2(t) = h + (y2(0) - h) e^{la t}
    const double y2 = h + (y0[1] - h) * std::exp(la * t);
    // y1' = le y1 + (h - y2(t))/tau_e ; particular + homogeneous solution
    // h - y2(t) = -(y2(0) - h) e^{la t}
    const double c = -(y0[1] - h) / m.tau_e;
    // y1(t) = e^{le t} y1(0) + c (e^{la t} - e^{le t})/(la - le)
    const double y1 = std::exp(le * t) * y0[0] +
                      c * (std::exp(la * t) - std::exp(le * t)) / (la - le);
    return {y1, y2};
}

std::vector<double> const_path(double s, std::size_t n) { return std::vector<double>(n, s); }

}  // namespace

TEST_CASE("h specs: saturating and power-cap") {
    CHECK(h_eval(SaturatingH{}, 0.0) == 0.0);
    CHECK(h_eval(SaturatingH{}, 1.0) == doctest::Approx(0.5));
    CHECK(h_eval(SaturatingH{}, 1e9) < 1.0);
    CHECK(h_eval(PowerCapH{0.5}, 4.0) == doctest::Approx(2.0));
    // nondecreasing
    double prev = -1;
    for (double s = 0; s < 10; s += 0.1) {
        const double v = h_eval(SaturatingH{}, s);
        CHECK(v >= prev);
        prev = v;
    }
    CHECK_THROWS_AS(h_eval(SaturatingH{}, -1.0), std::domain_error);
    CHECK_THROWS_AS(validate_model(LinearExcAdapt{0.01, 1.0, PowerCapH{1.5}}),
                    std::invalid_argument);
}

TEST_CASE("linear model: rhs vanishes at the limit state (0, h(S))") {
    const LinearExcAdapt m{0.01, 1.0, SaturatingH{}};
    const double s = 0.7;
    const YState rhs = internal_rhs(m, {0.0, h_eval(m.h, s)}, s);
    CHECK(rhs[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rhs[1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("fhn: rhs vanishes at the resting equilibrium from the 2x2 root solve") {
    FhnExcAdapt m;  // q(u) = u(u-1)(u-0.2), h saturating
    const double s = 0.4;
    const YState eq = equilibrium(m, s);
    CHECK(eq[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(eq[1] == doctest::Approx(0.4 / 1.4).epsilon(1e-12));
    const YState rhs = internal_rhs(m, eq, s);
    CHECK(std::abs(rhs[0]) <= 1e-12);
    CHECK(std::abs(rhs[1]) <= 1e-12);
}

TEST_CASE("growth certificate: |G| <= C (1 + |y| + S^alpha) on a 10^3 sample") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<InternalModel> models = {
        LinearExcAdapt{0.01, 1.0, PowerCapH{0.5}},
        AlgebraicExcAdapt{1.0, PowerCapH{0.5}},
        FhnExcAdapt{0.05, 1.0, {1.0, -1.2, 0.2, 0.0}, PowerCapH{0.5}},
        GrowthBoundary{0.7},
    };
    const double Y = 5.0 * std::sqrt(2.0);
    for (const auto& model : models) {
        const double C = growth_constant(model, Y);
        const double alpha = 0.5;
        for (int trial = 0; trial < 1000; ++trial) {
            const YState y{-5.0 + 10.0 * unif(gen), -5.0 + 10.0 * unif(gen)};
            const double s = 100.0 * unif(gen);
            const YState g = internal_rhs(model, y, s);
            const double gmag = std::hypot(g[0], g[1]);
            const double bound = C * (1.0 + std::hypot(y[0], y[1]) + std::pow(s, alpha));
            CHECK(gmag <= bound * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("rk4 against the matrix-exponential oracle at constant S") {
    const LinearExcAdapt m{0.05, 1.0, SaturatingH{}};
    const double s = 0.8, dt = 0.005, t_end = 5.0;  // 5 tau_a
    YState y{0.3, -0.2};
    const YState exact = linear_exact(m, y, s, t_end);
    y = integrate_internal(m, y, const_path(s, static_cast<std::size_t>(t_end / dt)), dt);
    CHECK(std::abs(y[0] - exact[0]) <= 1e-8);
    CHECK(std::abs(y[1] - exact[1]) <= 1e-8);
}

TEST_CASE("rk4 is fourth order on the linear variant") {
    const LinearExcAdapt m{0.1, 1.0, SaturatingH{}};
    const double s = 0.5, t_end = 1.0;
    const YState y0{0.4, 0.1};
    const YState exact = linear_exact(m, y0, s, t_end);
    auto err = [&](double dt) {
        const YState y =
            integrate_internal(m, y0, const_path(s, static_cast<std::size_t>(t_end / dt)), dt);
        return std::hypot(y[0] - exact[0], y[1] - exact[1]);
    };
    const double e1 = err(0.01), e2 = err(0.005);
    CHECK(e1 / e2 >= 12.0);
    CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("integrate_internal rejects dt above the stiffness guard") {
    const LinearExcAdapt m{0.01, 1.0, SaturatingH{}};
    std::vector<double> path(10, 0.5);
    CHECK_THROWS_AS(integrate_internal(m, {0, 0}, path, 0.01), std::invalid_argument);
    CHECK_NOTHROW(integrate_internal(m, {0, 0}, path, 0.001));
}

TEST_CASE("zero state with zero signal stays exactly zero") {
    const LinearExcAdapt m{0.01, 1.0, SaturatingH{}};
    const YState y = integrate_internal(m, {0, 0}, const_path(0.0, 100), 0.001);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 0.0);
}

TEST_CASE("adaptation: both linear components converge at their own rates") {
    const LinearExcAdapt m{0.01, 1.0, SaturatingH{}};
    const double s = 1.0, h = h_eval(m.h, s);
    YState y{0.5, 0.0};
    const double dt = 0.001;
    // after 3 tau_a the adaptation variable is within e^{-3} of h
    y = integrate_internal(m, y, const_path(s, 3000), dt);
    CHECK(std::abs(y[1] - h) <= 1.1 * std::exp(-3.0) * h);
    // after 20 tau_a both are at equilibrium
    y = integrate_internal(m, y, const_path(s, 17000), dt);
    CHECK(std::abs(y[0]) <= 1e-6);
    CHECK(std::abs(y[1] - h) <= 1e-6);
}

TEST_CASE("algebraic variant rectifies downward steps exactly") {
    const AlgebraicExcAdapt m{1.0, SaturatingH{}};
    // equilibrated at S = 1.0, then S drops to 0.2
    YState y = equilibrium(m, 1.0);
    const double dt = 0.01;
    for (int step = 0; step < 500; ++step) {
        y = rk4_step(m, y, 0.2, dt);
        CHECK(y[0] == 0.0);  // excitation clamps at zero for all t
    }
    CHECK(y[1] == doctest::Approx(h_eval(m.h, 0.2)).epsilon(1e-2));
}

TEST_CASE("fhn excitability: dS = 0.1 gives at least 5x the excursion of dS = 0.01") {
    FhnExcAdapt m;
    m.tau_e = 0.01;
    m.tau_a = 1.0;
    const double s0 = 0.4, dt = 0.001;
    auto excursion = [&](double ds) {
        YState y = equilibrium(m, s0);
        double peak = y[0];
        const double s1 = s0 + ds;
        for (int step = 0; step < 20000; ++step) {
            y = rk4_step(m, y, s1, dt);
            peak = std::max(peak, y[0]);
        }
        return peak;
    };
    const double big = excursion(0.1);
    const double small = excursion(0.01);
    CHECK(big >= 5.0 * small);
    // and the excursion is a genuine O(1) spike
    CHECK(big >= 0.5);
}

TEST_CASE("fhn adaptation: returns to the new equilibrium by 20 tau_a") {
    FhnExcAdapt m;
    const double s0 = 0.4, s1 = 0.5, dt = 0.001;
    YState y = equilibrium(m, s0);
    const YState target = equilibrium(m, s1);
    for (int step = 0; step < 20000; ++step) y = rk4_step(m, y, s1, dt);  // t = 20 tau_a
    CHECK(std::hypot(y[0] - target[0], y[1] - target[1]) <= 1e-3);
}

TEST_CASE("fhn validation enforces the slow-fast separation") {
    FhnExcAdapt bad;
    bad.tau_e = 0.5;
    bad.tau_a = 1.0;
    CHECK_THROWS_AS(validate_model(bad), std::invalid_argument);
}

TEST_CASE("tumbling rate: affine clamped form and linear growth bound") {
    TumblingRate r{1.0, 0.5, 0};
    CHECK(tumbling_rate(r, {0.0, 7.0}) == doctest::Approx(1.0));
    CHECK(tumbling_rate(r, {-3.0, 0.0}) == doctest::Approx(1.0));
    CHECK(tumbling_rate(r, {2.0, 0.0}) == doctest::Approx(2.0));
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const YState y{unif(gen), unif(gen)};
        const double lam = tumbling_rate(r, y);
        CHECK(lam >= 0.0);
        CHECK(lam <= (r.lambda0 + r.lambda1) * (1.0 + std::hypot(y[0], y[1])) + 1e-12);
    }
}

TEST_CASE("growth boundary model saturates d|y|/dt = c (1 + |y|) exactly") {
    const GrowthBoundary m{0.5};
    YState y{1.0, 0.0};
    const double dt = 0.01;
    const int steps = 200;
    for (int s = 0; s < steps; ++s) y = rk4_step(m, y, 0.0, dt);
    const double exact = (1.0 + 1.0) * std::exp(0.5 * dt * steps) - 1.0;
    CHECK(std::hypot(y[0], y[1]) == doctest::Approx(exact).epsilon(1e-9));
}
