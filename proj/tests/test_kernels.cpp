#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "kinchem/kernels.hpp"
#include "kinchem/presets.hpp"

using namespace kinchem;

namespace {

ChemState chem_from_bump(const PeriodicGrid& g, double mass = 1.0, double width = 1.0) {
    ParticleInit init;
    init.width = width;
    const ScalarField rho = make_preset_density(g, init, mass);
    return make_chem_state(rho, 0.0);
}

}  // namespace

TEST_CASE("psi spec: step behaviour and monotonicity") {
    PsiSpec hard{PsiSpec::Kind::HardStep, 0};
    CHECK(hard(-0.5) == 1.0);
    CHECK(hard(0.5) == 0.0);
    PsiSpec smooth{PsiSpec::Kind::SmoothStep, 20.0};
    CHECK(smooth(-100.0) == doctest::Approx(1.0));
    CHECK(smooth(100.0) == doctest::Approx(0.0));
    CHECK(smooth(0.0) == doctest::Approx(0.5));
    // monotone nonincreasing on a sampled grid, both kinds
    for (const PsiSpec& psi : {hard, smooth}) {
        double prev = 2.0;
        for (double eta = -3.0; eta <= 3.0; eta += 0.01) {
            const double v = psi(eta);
            CHECK(v <= prev + 1e-15);
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            prev = v;
        }
    }
}

TEST_CASE("exp growth kernel with zero S gives c (1 + e^0) = 2") {
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 5.0);
    const ChemState chem = make_chem_state(ScalarField::zeros(g), 0.0);
    const KernelSpec spec = ExpGrowthKernel{1.0, 1.0};
    const double x[2] = {1.0, 1.0}, v[2] = {1.0, 0.0}, vp[2] = {0.0, 1.0};
    CHECK(eval_turning_rate(spec, chem, x, v, vp) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("directional derivative kernel vanishes on favourable directions") {
    // manufactured chem state: S_t = 0.5 everywhere, grad S = 0
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 5.0);
    ChemState chem = make_chem_state(ScalarField::zeros(g), 0.0);
    chem.dt_s = ScalarField::constant(g, 0.5);
    const KernelSpec spec = DirectionalDerivativeKernel{1.0, {PsiSpec::Kind::HardStep, 0}};
    const double x[2] = {2.0, 2.0}, v[2] = {1.0, 0.0}, vp[2] = {0.0, 1.0};
    CHECK(eval_turning_rate(spec, chem, x, v, vp) == doctest::Approx(1.0).epsilon(1e-14));
    // unfavourable (S decreasing along the run) turns psi on
    chem.dt_s = ScalarField::constant(g, -0.5);
    CHECK(eval_turning_rate(spec, chem, x, v, vp) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("directional derivative kernel refuses a state without dt_s") {
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 5.0);
    const ChemState chem = make_chem_state(ScalarField::zeros(g), 0.0);
    const KernelSpec spec = DirectionalDerivativeKernel{};
    const double x[2] = {0, 0}, v[2] = {1, 0};
    CHECK_THROWS_AS(eval_turning_rate(spec, chem, x, v, v), std::invalid_argument);
}

TEST_CASE("delocalized kernel samples the shifted point") {
    const PeriodicGrid g = PeriodicGrid::make(2, 64, 10.0);
    // single-mode S so the shifted sample has a closed form
    ScalarField s_rho = ScalarField::zeros(g);
    const double k = 2.0 * M_PI / g.extent;
    const int n = g.resolution;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            s_rho.values[i * n + j] = (1.0 + k * k) * std::cos(k * i * g.spacing());
    const ChemState chem = make_chem_state(s_rho, 0.0);  // S = cos(k x_0)
    DelocalizedKernel dk;
    dk.c = 1.0;
    dk.eps = 0.1;
    const KernelSpec spec = dk;
    const double x[2] = {3.0, 4.0}, v[2] = {1.0, 0.0}, vp[2] = {0.6, 0.8};
    const double expected = 1.0 + std::cos(k * (x[0] - 0.1 * vp[0]));
    const double tol = k * k * g.spacing() * g.spacing();  // interpolation envelope
    CHECK(eval_turning_rate(spec, chem, x, v, vp) == doctest::Approx(expected).epsilon(tol));
}

TEST_CASE("hypothesis bounds: sup power, lr power, constant") {
    const PeriodicGrid g = PeriodicGrid::make(2, 32, 10.0);
    // S == 3 exactly (rho == 3 constant)
    ChemState chem = make_chem_state(ScalarField::constant(g, 3.0), 0.0);
    CHECK(hypothesis_bound(SupPowerKernel{2.0, 1.0}, chem) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(hypothesis_bound(ConstantKernel{5.0}, chem) == 5.0);

    const ChemState bump = chem_from_bump(g);
    const double l6 = bump.s.lp_norm(6.0);
    CHECK(hypothesis_bound(LrPowerKernel{1.0, 6.0, 1.5}, bump) ==
          doctest::Approx(1.0 + std::pow(l6, 1.5)).epsilon(1e-12));
}

TEST_CASE("lr norm quadrature agrees with double-resolution summation") {
    // rho band-limited far below Nyquist: S^6 has no aliasing at either
    // resolution, so the two quadratures agree to round-off.
    const double L = 10.0, k = 2.0 * M_PI / L;
    auto build = [&](int n) {
        const PeriodicGrid g = PeriodicGrid::make(2, n, L);
        ScalarField rho = ScalarField::zeros(g);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rho.values[i * n + j] = 1.0 + 0.5 * std::cos(k * i * L / n) +
                                        0.25 * std::sin(2.0 * k * j * L / n);
        return make_chem_state(rho, 0.0).s.lp_norm(6.0);
    };
    CHECK(build(32) == doctest::Approx(build(64)).epsilon(1e-12));
}

TEST_CASE("domination: eval <= hypothesis bound over sampled (x,v,v')") {
    const PeriodicGrid g = PeriodicGrid::make(2, 32, 10.0);
    ChemState chem = chem_from_bump(g);
    chem.dt_s = ScalarField::constant(g, 0.0);
    std::vector<KernelSpec> specs = {
        ConstantKernel{1.5},
        PointwiseLinearKernel{1.0},
        SupPowerKernel{2.0, 1.3},
        ExpGrowthKernel{1.0, 0.7},
        LrPowerKernel{1.0, 6.0, 1.5},
        DelocalizedKernel{1.0, 0.1, true, true, true, true},
        DirectionalDerivativeKernel{1.0, {PsiSpec::Kind::SmoothStep, 20.0}},
        SymmetricKernel{0.5, 0.5, 0.5}};
    std::mt19937 gen(4242);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& spec : specs) {
        const TurningKernel kernel(spec, chem);
        const double bound = kernel.bound();
        for (int trial = 0; trial < 1000; ++trial) {
            const double x[2] = {10.0 * unif(gen), 10.0 * unif(gen)};
            const double a1 = 2.0 * M_PI * unif(gen), a2 = 2.0 * M_PI * unif(gen);
            const double v[2] = {std::cos(a1), std::sin(a1)};
            const double vp[2] = {std::cos(a2), std::sin(a2)};
            CHECK(kernel.eval(x, v, vp) <= bound + 1e-10);
        }
    }
}

TEST_CASE("symmetric kernel is exactly symmetric in (v, v')") {
    const PeriodicGrid g = PeriodicGrid::make(2, 32, 10.0);
    const ChemState chem = chem_from_bump(g);
    const KernelSpec spec = SymmetricKernel{0.7, 0.3, 1.1};
    const TurningKernel kernel(spec, chem);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double x[2] = {10.0 * unif(gen), 10.0 * unif(gen)};
        const double a1 = 2.0 * M_PI * unif(gen), a2 = 2.0 * M_PI * unif(gen);
        const double v[2] = {std::cos(a1), std::sin(a1)};
        const double vp[2] = {std::cos(a2), std::sin(a2)};
        CHECK(kernel.eval(x, v, vp) == kernel.eval(x, vp, v));
    }
}

TEST_CASE("lr power strict mode mirrors the open growth boundary") {
    CHECK_THROWS_AS(validate_kernel(LrPowerKernel{1.0, 6.0, 2.0}), std::invalid_argument);
    CHECK_NOTHROW(validate_kernel(LrPowerKernel{1.0, 6.0, 1.99}));
    // r <= 3: any positive alpha is admissible
    CHECK_NOTHROW(validate_kernel(LrPowerKernel{1.0, 3.0, 10.0}));
    // strict mode off accepts the boundary (for exploratory runs)
    CHECK_NOTHROW(validate_kernel(LrPowerKernel{1.0, 6.0, 2.0, false}));
}

TEST_CASE("kernel validation lists problems") {
    try {
        validate_kernel(LrPowerKernel{-1.0, 0.5, -2.0});
        FAIL("expected throw");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("c must be >= 0") != std::string::npos);
        CHECK(msg.find("r must be >= 1") != std::string::npos);
        CHECK(msg.find("alpha must be > 0") != std::string::npos);
    }
}
