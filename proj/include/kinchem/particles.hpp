// Stochastic velocity-jump simulator: particles carry (x, v, y), tumble at
// rate lambda[y] with uniform redistribution on V, and couple to the
// mean-field S through cloud-in-cell deposition and the screened-Poisson
// solve. All randomness comes from counter-based per-particle streams.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kinchem/diagnostics.hpp"
#include "kinchem/fields.hpp"
#include "kinchem/internal.hpp"
#include "kinchem/rng.hpp"

namespace kinchem {

struct ParticleInit {
    std::string preset = "gaussian-bump";  // gaussian-bump | two-bumps | uniform
    double width = 1.0;
    std::array<double, 3> center = {0, 0, 0};   // defaults to box center when unset
    std::array<double, 3> center2 = {0, 0, 0};  // second bump
    bool centers_set = false;
    YState y0 = {0.0, 0.0};
};

struct ParticleEnsemble {
    int dim = 2;
    std::size_t count = 0;
    double total_mass = 1.0;  // represented mass; per-particle weight = M / count
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    double time = 0;

    std::vector<double> x;  // count x dim, particle-major
    std::vector<double> v;  // unit speed
    std::vector<double> y;  // count x 2
    // Thinning mode: absolute next-event times and persistent draw counters.
    std::vector<double> next_event;
    std::vector<std::uint64_t> draw_count;

    double weight() const { return total_mass / static_cast<double>(count); }
    double mass() const { return total_mass; }
    // Discrete first moment J = sum_i weight |y_i|.
    double y_first_moment() const;
};

ParticleEnsemble make_ensemble(const PeriodicGrid& grid, std::size_t count, double total_mass,
                               std::uint64_t seed, const ParticleInit& init);

// Cloud-in-cell deposition, sum_cells rho * cell_volume = M to round-off.
ScalarField deposit_density(const ParticleEnsemble& ens, const PeriodicGrid& grid,
                            int threads = 1);

enum class TumbleMode {
    Bernoulli,  // per-step tumble probability 1 - exp(-lambda dt)
    Thinning,   // exact event times; constant-lambda validation path
};

struct TumbleEvent {
    std::uint32_t pid;
    double time;
    std::array<double, 3> v_new;
};

struct AdvanceOptions {
    TumbleMode mode = TumbleMode::Bernoulli;
    int threads = 1;
    std::vector<TumbleEvent>* tumble_log = nullptr;  // forces single-threaded advance
};

struct RateCflError : std::runtime_error {
    double max_lambda;
    RateCflError(double lambda, double dt);
};

// One step: x += v dt (wrapped), y by RK4 with S frozen at the mid-path
// position, tumble draw, uniform redirection. Returns the number of tumbles.
// Rejects dt above the internal stiffness guard or with dt * max lambda > 0.5.
std::size_t advance_particles(ParticleEnsemble& ens, const ChemState& chem,
                              const InternalModel& model, const TumblingRate& rate, double dt,
                              const AdvanceOptions& opts = {});

struct CoupledRunOptions {
    std::vector<double> track_rho_p = {2.0};
    double moment_alpha = 0.5;  // alpha of the tracked S^alpha rho integral
    TumbleMode mode = TumbleMode::Bernoulli;
    int threads = 1;
    std::function<void(const ParticleEnsemble&, std::size_t step)> snapshot_sink;
    std::size_t snapshot_every = 0;
    std::vector<TumbleEvent>* tumble_log = nullptr;
};

struct ParticleRunResult {
    ParticleEnsemble ens;
    DiagnosticsSeries diag;
    bool aborted = false;
    std::string abort_reason;
};

// Per step: deposit -> solve S -> record diagnostics -> advance. The row at
// index n holds the state at t_n (J, mass, norms, and the S^alpha rho
// integral of the field the following step uses).
ParticleRunResult run_coupled(ParticleEnsemble ens, const PeriodicGrid& grid,
                              const InternalModel& model, const TumblingRate& rate, double t_end,
                              double dt, const CoupledRunOptions& opts = {});

}  // namespace kinchem
