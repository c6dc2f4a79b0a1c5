// Periodic grids, scalar/vector fields, the screened-Poisson solve
// -Delta S + S = rho (spectral), the Bessel-potential Green function,
// and off-grid multilinear sampling.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace kinchem {

struct PeriodicGrid {
    int dim = 2;         // 2 or 3
    double extent = 1;   // box side L
    int resolution = 4;  // cells per axis N (even, >= 4)

    static PeriodicGrid make(int dim, int resolution, double extent);

    std::size_t cells() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(resolution);
        return n;
    }
    double spacing() const { return extent / resolution; }
    double cell_volume() const {
        double v = 1;
        for (int d = 0; d < dim; ++d) v *= spacing();
        return v;
    }
    bool operator==(const PeriodicGrid&) const = default;
};

struct ScalarField {
    PeriodicGrid grid;
    std::vector<double> values;  // row-major, axis 0 slowest

    static ScalarField zeros(const PeriodicGrid& g) { return {g, std::vector<double>(g.cells(), 0.0)}; }
    static ScalarField constant(const PeriodicGrid& g, double c) {
        return {g, std::vector<double>(g.cells(), c)};
    }

    double integral() const;  // sum * cell_volume
    double max_abs() const;
    double min_value() const;
    double max_value() const;
    double lp_norm(double p) const;  // grid quadrature; p = inf -> max_abs
    bool finite() const;
};

struct VectorField {
    PeriodicGrid grid;
    std::array<std::vector<double>, 3> comp;  // comp[d], d < grid.dim

    static VectorField zeros(const PeriodicGrid& g);
};

// Chemoattractant state: S, its spectral gradient, and (once two solves
// have happened) the backward-difference time derivative.
struct ChemState {
    ScalarField s;
    VectorField grad_s;
    std::optional<ScalarField> dt_s;
    double time = 0;
};

// Spectral solve of -Delta S + S = rho on the torus. Throws on non-finite
// input. The k=0 mode is preserved, so mean(S) = mean(rho) exactly.
ScalarField solve_screened_poisson(const ScalarField& rho);

// Spectral gradient / divergence / Laplacian. Exact on band-limited fields;
// the Nyquist mode of differentiated axes is dropped.
VectorField gradient_field(const ScalarField& s);
ScalarField divergence_field(const VectorField& v);
ScalarField laplacian_field(const ScalarField& s);

// Shift field values by +displacement: out(x) = in(x - displacement),
// computed by Fourier phase. Exact for the trigonometric interpolant.
void spectral_shift(const PeriodicGrid& g, std::span<double> slab,
                    std::span<const double> displacement);

// Bessel-potential kernel of -Delta + 1. dim == 3: exp(-r)/(4 pi r) closed
// form. dim == 2: adaptive quadrature of
//   G(r) = (1/4pi) \int_0^inf exp(-pi r^2/s) exp(-s/4pi) ds/s,
// relative accuracy <= 1e-8. Throws for r <= 0.
double green_function(int dim, double r);

// Constants of the 2D log bound G(r) <= A + |log r|/(2 pi) on (0,1]:
// A = A1 + A2 with A1 = (1/4pi)\int_0^1 e^{-pi/t} dt/t and
// A2 = (1/4pi)\int_1^inf e^{-s/4pi} ds. Both evaluated by quadrature.
double bessel_bound_A1();
double bessel_bound_A2();
double bessel_bound_A();

// Multilinear (cloud-in-cell) interpolation at an off-grid point; the point
// is wrapped into the periodic box.
double sample_scalar(const ScalarField& s, std::span<const double> x);
std::array<double, 3> sample_vector(const VectorField& v, std::span<const double> x);
double sample_chem(const ChemState& chem, std::span<const double> x);

// Pointwise (s_new - s_old)/dt. Grids must match, dt > 0.
ScalarField time_derivative_field(const ScalarField& s_new, const ScalarField& s_old, double dt);

// Solve + gradient (+ dt_s when a previous state is supplied) in one step.
ChemState make_chem_state(const ScalarField& rho, double time,
                          const ChemState* previous = nullptr);

}  // namespace kinchem
