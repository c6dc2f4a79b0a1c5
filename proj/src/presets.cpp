#include "kinchem/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace kinchem {

namespace {

// Periodized 1D Gaussian factor: summing the neighbouring images keeps the
// profile smooth across the seam (the nearest-image distance alone has a
// derivative kink there that pollutes the spectrum).
double periodic_gauss(double d, double L, double width) {
    double v = 0;
    for (int n = -1; n <= 1; ++n) {
        const double dd = d + n * L;
        v += std::exp(-0.5 * dd * dd / (width * width));
    }
    return v;
}

void add_bump(ScalarField& rho, const std::array<double, 3>& center, double width) {
    const PeriodicGrid& g = rho.grid;
    const int n = g.resolution;
    const double h = g.spacing();
    double x[3];
    const std::size_t nc = g.cells();
    for (std::size_t idx = 0; idx < nc; ++idx) {
        std::size_t rem = idx;
        for (int d = g.dim - 1; d >= 0; --d) {
            x[d] = static_cast<double>(rem % n) * h;
            rem /= n;
        }
        double v = 1.0;
        for (int d = 0; d < g.dim; ++d)
            v *= periodic_gauss(x[d] - center[d], g.extent, width);
        rho.values[idx] += v;
    }
}

}  // namespace

ScalarField make_preset_density(const PeriodicGrid& grid, const ParticleInit& init, double mass) {
    if (!(mass > 0)) throw std::invalid_argument("make_preset_density: mass must be > 0");
    ScalarField rho = ScalarField::zeros(grid);
    std::array<double, 3> c1 = init.center, c2 = init.center2;
    if (!init.centers_set) {
        const double L = grid.extent;
        c1 = {L / 2, L / 2, L / 2};
        c2 = {L / 4, L / 4, L / 4};
    }
    if (init.preset == "uniform") {
        const double val = 1.0;
        for (double& v : rho.values) v = val;
    } else if (init.preset == "gaussian-bump") {
        add_bump(rho, c1, init.width);
    } else if (init.preset == "two-bumps") {
        add_bump(rho, c1, init.width);
        add_bump(rho, c2, init.width);
    } else {
        throw std::invalid_argument("make_preset_density: unknown preset '" + init.preset + "'");
    }
    const double total = rho.integral();
    if (!(total > 0)) throw std::runtime_error("make_preset_density: degenerate preset");
    const double fix = mass / total;
    for (double& v : rho.values) v *= fix;
    return rho;
}

KineticDensity make_initial_kinetic(const PeriodicGrid& grid, const VelocitySet& vel,
                                    const ParticleInit& init, double mass) {
    const ScalarField rho = make_preset_density(grid, init, mass);
    KineticDensity f = KineticDensity::zeros(grid, vel);
    const double inv_measure = 1.0 / vel.measure();
    const std::size_t nc = grid.cells();
    for (std::size_t j = 0; j < vel.size(); ++j)
        for (std::size_t c = 0; c < nc; ++c) f.f[j * nc + c] = rho.values[c] * inv_measure;
    return f;
}

}  // namespace kinchem
