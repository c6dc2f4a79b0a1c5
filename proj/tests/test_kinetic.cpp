#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "kinchem/kinetic.hpp"
#include "kinchem/presets.hpp"

using namespace kinchem;

namespace {

KineticDensity bump_density(int n, double L, int n_v, double width = 1.0, double mass = 1.0) {
    const PeriodicGrid g = PeriodicGrid::make(2, n, L);
    ParticleInit init;
    init.width = width;
    return make_initial_kinetic(g, circle_velocity_set(n_v), init, mass);
}

// circular (torus) centroid of a density along one axis
double centroid(const ScalarField& rho, int axis) {
    const int n = rho.grid.resolution;
    const double k = 2.0 * M_PI / rho.grid.extent;
    double re = 0, im = 0;
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j, ++idx) {
            const double x = (axis == 0 ? i : j) * rho.grid.spacing();
            re += rho.values[idx] * std::cos(k * x);
            im += rho.values[idx] * std::sin(k * x);
        }
    double c = std::atan2(im, re) / k;
    if (c < 0) c += rho.grid.extent;
    return c;
}

}  // namespace

TEST_CASE("velocity sets: weights, symmetry, speed") {
    const VelocitySet circle = circle_velocity_set(16);
    CHECK(circle.measure() == doctest::Approx(2.0 * M_PI).epsilon(1e-13));
    const VelocitySet sphere = sphere_velocity_set(3, 8);
    CHECK(sphere.measure() == doctest::Approx(4.0 * M_PI).epsilon(1e-13));
    for (const VelocitySet* vs : {&circle, &sphere}) {
        double m[3] = {0, 0, 0};
        double max_speed = 0;
        for (std::size_t j = 0; j < vs->size(); ++j) {
            for (int d = 0; d < 3; ++d) m[d] += vs->weights[j] * vs->nodes[j][d];
            max_speed = std::max(max_speed, std::hypot(vs->nodes[j][0], vs->nodes[j][1],
                                                       vs->nodes[j][2]));
        }
        for (int d = 0; d < 3; ++d) CHECK(std::abs(m[d]) <= 1e-12);
        CHECK(max_speed == doctest::Approx(1.0).epsilon(1e-13));
    }
    const VelocitySet disk = disk_velocity_set(8, 32);
    CHECK(disk.measure() == doctest::Approx(M_PI).epsilon(1e-13));
    const VelocitySet ball = ball_velocity_set(6, 3, 8);
    CHECK(ball.measure() == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
}

TEST_CASE("transport: x-independent states are unchanged") {
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 5.0);
    KineticDensity f = KineticDensity::zeros(g, circle_velocity_set(8));
    for (std::size_t j = 0; j < f.vel.size(); ++j)
        for (std::size_t c = 0; c < g.cells(); ++c) f.f[j * g.cells() + c] = 1.0 + 0.25 * j;
    const KineticDensity before = f;
    transport_in_place(f, 0.37);
    for (std::size_t i = 0; i < f.f.size(); ++i)
        CHECK(f.f[i] == doctest::Approx(before.f[i]).epsilon(1e-13));
}

TEST_CASE("transport: forward then backward shift is the identity") {
    KineticDensity f = bump_density(32, 10.0, 8);
    const KineticDensity f0 = f;
    transport_in_place(f, 0.173);
    transport_in_place(f, -0.173);
    double max_err = 0;
    for (std::size_t i = 0; i < f.f.size(); ++i)
        max_err = std::max(max_err, std::abs(f.f[i] - f0.f[i]));
    CHECK(max_err <= 1e-12 * f.max_abs());
}

TEST_CASE("transport: bump centroid moves by v t modulo L") {
    const PeriodicGrid g = PeriodicGrid::make(2, 64, 10.0);
    const VelocitySet vel = circle_velocity_set(4);  // axis-aligned nodes
    ParticleInit init;
    init.width = 0.8;
    KineticDensity f = make_initial_kinetic(g, vel, init, 1.0);
    // keep only node 0 (v = +e_x)
    for (std::size_t j = 1; j < vel.size(); ++j)
        for (std::size_t c = 0; c < g.cells(); ++c) f.f[j * g.cells() + c] = 0.0;
    const double t = 7.3;  // wraps around the L = 10 box
    const double c_before = centroid(f.density(), 0);
    transport_in_place(f, t);
    const double c_after = centroid(f.density(), 0);
    const double expected = std::fmod(c_before + t, g.extent);
    CHECK(std::abs(c_after - expected) <= 1e-6);
    CHECK(centroid(f.density(), 1) == doctest::Approx(g.extent / 2).epsilon(1e-6));
}

TEST_CASE("transport conserves mass to round-off over many steps") {
    KineticDensity f = bump_density(32, 10.0, 8);
    const double m0 = f.mass();
    for (int s = 0; s < 1000; ++s) transport_in_place(f, 0.01);
    CHECK(std::abs(f.mass() - m0) <= 1e-12 * m0);
}

TEST_CASE("scattering: zero kernel is the identity") {
    KineticDensity f = bump_density(16, 5.0, 8);
    const KineticDensity f0 = f;
    const ChemState chem = make_chem_state(f.density(), 0.0);
    scattering_in_place(f, chem, ConstantKernel{0.0}, 0.1);
    for (std::size_t i = 0; i < f.f.size(); ++i) CHECK(f.f[i] == f0.f[i]);
}

TEST_CASE("scattering: uniform-in-v state is a fixed point of any velocity-independent kernel") {
    KineticDensity f = bump_density(16, 5.0, 8);
    const KineticDensity f0 = f;
    const ChemState chem = make_chem_state(f.density(), 0.0);
    scattering_in_place(f, chem, PointwiseLinearKernel{1.0}, 0.01);
    double max_rel = 0;
    for (std::size_t i = 0; i < f.f.size(); ++i)
        max_rel = std::max(max_rel, std::abs(f.f[i] - f0.f[i]));
    CHECK(max_rel <= 1e-12 * f.max_abs());
}

TEST_CASE("scattering: 2-node constant kernel relaxes toward the mean at rate |V|") {
    const PeriodicGrid g = PeriodicGrid::make(2, 4, 1.0);
    const VelocitySet vel = circle_velocity_set(2);
    KineticDensity f = KineticDensity::zeros(g, vel);
    const double a = 2.0, b = 0.5;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        f.f[c] = a;
        f.f[g.cells() + c] = b;
    }
    const ChemState chem = make_chem_state(f.density(), 0.0);
    const double dt = 0.01;
    const int steps = 40;
    for (int s = 0; s < steps; ++s) scattering_in_place(f, chem, ConstantKernel{1.0}, dt);
    // explicit Euler on the exact 2-node ODE: (a-b)' = -|V| (a-b)
    const double diff = f.f[0] - f.f[g.cells()];
    const double euler = (a - b) * std::pow(1.0 - dt * vel.measure(), steps);
    CHECK(diff == doctest::Approx(euler).epsilon(1e-12));
    const double exact = (a - b) * std::exp(-vel.measure() * dt * steps);
    CHECK(std::abs(diff - exact) <= 0.05 * std::abs(a - b));
    // mean is conserved exactly
    CHECK(f.f[0] + f.f[g.cells()] == doctest::Approx(a + b).epsilon(1e-13));
}

TEST_CASE("scattering: CFL violation is rejected with the rate reported") {
    KineticDensity f = bump_density(16, 5.0, 8);
    const ChemState chem = make_chem_state(f.density(), 0.0);
    const KineticDensity f0 = f;
    try {
        scattering_in_place(f, chem, ConstantKernel{10.0}, 1.0);  // dt rate |V| >> 0.9
        FAIL("expected CflError");
    } catch (const CflError& e) {
        CHECK(e.max_rate == doctest::Approx(10.0 * 2.0 * M_PI).epsilon(1e-12));
    }
    // rejected step left the state untouched
    for (std::size_t i = 0; i < f.f.size(); ++i) CHECK(f.f[i] == f0.f[i]);
}

TEST_CASE("scattering conserves cell mass and positivity for a full pairwise kernel") {
    KineticDensity f = bump_density(16, 5.0, 12);
    // perturb the v-distribution so scattering acts
    const std::size_t nc = f.grid.cells();
    for (std::size_t j = 0; j < f.vel.size(); ++j)
        for (std::size_t c = 0; c < nc; ++c)
            f.f[j * nc + c] *= 1.0 + 0.5 * std::sin(2.0 * M_PI * j / f.vel.size());
    const ChemState chem = make_chem_state(f.density(), 0.0);
    const double m0 = f.mass();
    for (int s = 0; s < 50; ++s)
        scattering_in_place(f, chem, SymmetricKernel{0.3, 0.3, 0.5}, 0.05);
    CHECK(std::abs(f.mass() - m0) <= 1e-12 * m0);
    CHECK(f.min_value() >= -1e-12 * f.max_abs());
}

TEST_CASE("exponential-loss mode conserves mass and handles stiff rates") {
    KineticDensity f = bump_density(16, 5.0, 8);
    const std::size_t nc = f.grid.cells();
    for (std::size_t j = 0; j < f.vel.size(); ++j)
        for (std::size_t c = 0; c < nc; ++c) f.f[j * nc + c] *= 1.0 + 0.3 * (j % 2);
    const ChemState chem = make_chem_state(f.density(), 0.0);
    const double m0 = f.mass();
    // dt * rate * |V| = 2 * 2pi >> 0.9 would be rejected in explicit mode
    scattering_in_place(f, chem, ConstantKernel{2.0}, 1.0, ScatteringMode::ExponentialLoss);
    CHECK(std::abs(f.mass() - m0) <= 1e-12 * m0);
    CHECK(f.min_value() >= 0.0);
}

TEST_CASE("run_kinetic: free transport keeps mass constant over 1000 steps") {
    KineticDensity f = bump_density(32, 10.0, 8);
    const double m0 = f.mass();
    KineticRunOptions opts;
    opts.track_rho_p = {2.0};
    const KineticRunResult res = run_kinetic(std::move(f), ConstantKernel{0.0}, 10.0, 0.01, opts);
    CHECK(!res.aborted);
    CHECK(res.diag.rows.size() == 1001);
    for (double m : res.diag.column("mass")) CHECK(std::abs(m - m0) <= 1e-12 * m0);
}

TEST_CASE("run_kinetic: mass conservation across kernel variants") {
    for (const KernelSpec& spec :
         {KernelSpec(PointwiseLinearKernel{1.0}), KernelSpec(ExpGrowthKernel{0.05, 0.5}),
          KernelSpec(SymmetricKernel{0.3, 0.3, 0.3}),
          KernelSpec(DelocalizedKernel{0.2, 0.1, true, true, false, false})}) {
        KineticDensity f = bump_density(16, 10.0, 8);
        const std::size_t nc = f.grid.cells();
        for (std::size_t j = 0; j < f.vel.size(); ++j)
            for (std::size_t c = 0; c < nc; ++c)
                f.f[j * nc + c] *= 1.0 + 0.4 * std::cos(2.0 * M_PI * j / f.vel.size());
        const double m0 = f.mass();
        const KineticRunResult res = run_kinetic(std::move(f), spec, 1.0, 0.01);
        CHECK(!res.aborted);
        for (double m : res.diag.column("mass")) CHECK(std::abs(m - m0) <= 1e-11 * m0);
    }
}

TEST_CASE("run_kinetic: uniform state is stationary for velocity-independent kernels") {
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 5.0);
    KineticDensity f = KineticDensity::zeros(g, circle_velocity_set(8));
    for (double& v : f.f) v = 0.25;
    const KineticRunResult res = run_kinetic(std::move(f), PointwiseLinearKernel{1.0}, 0.5, 0.01);
    CHECK(!res.aborted);
    for (double v : res.state.f) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
}

namespace {

// Richardson convergence measurement for the Strang loop. The exponential
// scattering substep is exact for velocity-independent kernels, so the
// measured error is the splitting error alone.
double richardson_rate(const KernelSpec& spec) {
    auto run_with_dt = [&spec](double dt) {
        KineticDensity f = bump_density(16, 10.0, 8, 1.2);
        const std::size_t nc = f.grid.cells();
        for (std::size_t j = 0; j < f.vel.size(); ++j)
            for (std::size_t c = 0; c < nc; ++c)
                f.f[j * nc + c] *= 1.0 + 0.4 * std::sin(2.0 * M_PI * j / f.vel.size());
        KineticRunOptions opts;
        opts.mode = ScatteringMode::ExponentialLoss;
        return run_kinetic(std::move(f), spec, 1.0, dt, opts).state;
    };
    const KineticDensity ref = run_with_dt(1.0 / 256.0);
    auto err = [&](const KineticDensity& s) {
        double e = 0;
        for (std::size_t i = 0; i < s.f.size(); ++i)
            e = std::max(e, std::abs(s.f[i] - ref.f[i]));
        return e;
    };
    const double e1 = err(run_with_dt(1.0 / 16.0));
    const double e2 = err(run_with_dt(1.0 / 32.0));
    return e1 / e2;
}

}  // namespace

TEST_CASE("splitting: second order for an x-independent constant rate") {
    const double rate = richardson_rate(ConstantKernel{1.0});
    CHECK(rate >= 3.0);
    CHECK(rate <= 5.0);
}

TEST_CASE("splitting: second order for a coupled x-dependent kernel") {
    const double rate = richardson_rate(PointwiseLinearKernel{2.0});
    CHECK(rate >= 3.0);
    CHECK(rate <= 5.0);
}

TEST_CASE("run_kinetic: exp-growth kernel at beta=0.5 stays bounded to t=10") {
    KineticDensity f = bump_density(32, 10.0, 8, 1.0, 1.0);
    KineticRunOptions opts;
    opts.track_rho_p = {2.0};
    const KineticRunResult res =
        run_kinetic(std::move(f), ExpGrowthKernel{1.0, 0.5}, 10.0, 0.05, opts);
    CHECK(!res.aborted);
    const auto max_f = res.diag.column("max_f");
    for (double m : max_f) {
        CHECK(std::isfinite(m));
        CHECK(m <= 10.0 * max_f.front());
    }
}

TEST_CASE("flat lp norm matches the mixed-norm definition for p = q") {
    KineticDensity f = bump_density(16, 5.0, 8);
    const double direct = flat_lp_norm(f, 2.0);
    double acc = 0;
    const std::size_t nc = f.grid.cells();
    for (std::size_t j = 0; j < f.vel.size(); ++j)
        for (std::size_t c = 0; c < nc; ++c)
            acc += f.vel.weights[j] * f.f[j * nc + c] * f.f[j * nc + c];
    CHECK(direct == doctest::Approx(std::sqrt(acc * f.grid.cell_volume())).epsilon(1e-13));
}
