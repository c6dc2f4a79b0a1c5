// Eulerian solver for the kinetic run-and-tumble system: Strang splitting of
// free transport (spectral shifts per velocity node) and the gain/loss
// scattering operator, coupled to the screened-Poisson field each step.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "kinchem/diagnostics.hpp"
#include "kinchem/fields.hpp"
#include "kinchem/kernels.hpp"

namespace kinchem {

struct VelocitySet {
    enum class Domain { Sphere, Ball };  // |v| = 1 shell vs filled |v| <= 1
    int dim = 2;
    Domain domain = Domain::Sphere;
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double measure() const;  // sum of weights
};

// n equispaced unit vectors on the circle, weights 2 pi / n.
VelocitySet circle_velocity_set(int n);
// Gauss-Legendre in cos(theta) x uniform phi product set on the unit sphere;
// weights sum to 4 pi and the first moment vanishes identically.
VelocitySet sphere_velocity_set(int n_theta, int n_phi);
// Picks a near-square (n_theta, n_phi) factorization with at most n nodes.
VelocitySet sphere_velocity_set_for(int n);
// Quadrature sets filling the unit disk/ball (radial Gauss-Legendre with the
// r^{d-1} weight). These carry genuine d-dimensional velocity measure, which
// the dispersion estimate requires.
VelocitySet disk_velocity_set(int n_r, int n_angle);
VelocitySet ball_velocity_set(int n_r, int n_theta, int n_phi);

struct KineticDensity {
    PeriodicGrid grid;
    VelocitySet vel;
    std::vector<double> f;  // node-major: f[j * cells + cell]
    double time = 0;

    static KineticDensity zeros(const PeriodicGrid& g, const VelocitySet& v);

    std::span<double> slab(std::size_t j) { return {f.data() + j * grid.cells(), grid.cells()}; }
    std::span<const double> slab(std::size_t j) const {
        return {f.data() + j * grid.cells(), grid.cells()};
    }
    ScalarField density() const;  // rho = sum_j w_j f_j
    double mass() const;
    double max_abs() const;
    double min_value() const;
};

// CFL violation in explicit scattering.
struct CflError : std::runtime_error {
    double max_rate;
    CflError(double rate, double dt);
};

// Translate each velocity slab by v_j * dt (spectral, mass exact).
KineticDensity transport_step(KineticDensity f, double dt);
void transport_in_place(KineticDensity& f, double dt);

enum class ScatteringMode { Explicit, ExponentialLoss };

// Explicit gain/loss update; cell mass conserved exactly by construction
// (gain and loss use the same quadrature). Explicit mode requires
// dt * max loss rate <= 0.9 and then preserves positivity. The exponential
// mode integrates the loss factor exactly and renormalizes cell mass.
KineticDensity scattering_step(KineticDensity f, const ChemState& chem, const KernelSpec& spec,
                               double dt, ScatteringMode mode = ScatteringMode::Explicit);
void scattering_in_place(KineticDensity& f, const ChemState& chem, const KernelSpec& spec,
                         double dt, ScatteringMode mode = ScatteringMode::Explicit);

struct KineticRunOptions {
    std::vector<double> track_rho_p = {2.0};    // ||rho||_p columns
    std::vector<double> track_f_p;              // flat ||f||_{L^p_{x,v}} columns
    std::optional<double> track_s_r;            // ||S||_{L^r} column
    ScatteringMode mode = ScatteringMode::Explicit;
    // Called with the last good state on numerical abort.
    std::function<void(const KineticDensity&)> on_abort;
    std::function<void(const KineticDensity&, std::size_t step)> snapshot_sink;
    std::size_t snapshot_every = 0;  // 0 = never
};

struct KineticRunResult {
    KineticDensity state;
    DiagnosticsSeries diag;
    KernelSpec kernel;
    bool aborted = false;
    std::string abort_reason;
};

// Strang loop: transport(dt/2) -> solve S from rho -> scattering(dt) ->
// transport(dt/2). Diagnostics per step; NaN or negative mass aborts with
// the last good state.
KineticRunResult run_kinetic(KineticDensity f0, const KernelSpec& spec, double t_end, double dt,
                             const KineticRunOptions& opts = {});

// Flat L^p norm over the product measure (cell volume x velocity weights).
double flat_lp_norm(const KineticDensity& f, double p);

}  // namespace kinchem
