// Named initial-condition presets shared by the Eulerian and particle modes.
#pragma once

#include "kinchem/fields.hpp"
#include "kinchem/kinetic.hpp"
#include "kinchem/particles.hpp"

namespace kinchem {

// gaussian-bump | two-bumps | uniform, normalized so the grid integral is
// exactly `mass`.
ScalarField make_preset_density(const PeriodicGrid& grid, const ParticleInit& init, double mass);

// f(x, v) = rho0(x) / |V| (uniform in v).
KineticDensity make_initial_kinetic(const PeriodicGrid& grid, const VelocitySet& vel,
                                    const ParticleInit& init, double mass);

}  // namespace kinchem
