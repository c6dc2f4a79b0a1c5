#include "kinchem/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "kinchem/numerics.hpp"

namespace kinchem {

namespace {

// ---------------------------------------------------------------------------
// FFT workspace, cached per (dim, N). All spectral entry points serialize on
// the workspace mutex; callers never see FFTW state.
// ---------------------------------------------------------------------------
struct FftWorkspace {
    int dim = 0, n = 0;
    std::size_t ncells = 0, ncplx = 0;
    double* rbuf = nullptr;
    fftw_complex* cbuf = nullptr;
    fftw_plan fwd = nullptr, bwd = nullptr;
    std::mutex mtx;

    FftWorkspace(int dim_, int n_) : dim(dim_), n(n_) {
        ncells = 1;
        for (int d = 0; d < dim; ++d) ncells *= static_cast<std::size_t>(n);
        ncplx = ncells / n * (n / 2 + 1);
        rbuf = fftw_alloc_real(ncells);
        cbuf = fftw_alloc_complex(ncplx);
        if (dim == 2) {
            fwd = fftw_plan_dft_r2c_2d(n, n, rbuf, cbuf, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_2d(n, n, cbuf, rbuf, FFTW_ESTIMATE);
        } else {
            fwd = fftw_plan_dft_r2c_3d(n, n, n, rbuf, cbuf, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_3d(n, n, n, cbuf, rbuf, FFTW_ESTIMATE);
        }
    }
    ~FftWorkspace() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(rbuf);
        fftw_free(cbuf);
    }
};

FftWorkspace& workspace(const PeriodicGrid& g) {
    static std::mutex cache_mtx;
    static std::map<std::pair<int, int>, std::unique_ptr<FftWorkspace>> cache;
    std::lock_guard<std::mutex> lk(cache_mtx);
    auto& slot = cache[{g.dim, g.resolution}];
    if (!slot) slot = std::make_unique<FftWorkspace>(g.dim, g.resolution);
    return *slot;
}

// Signed integer frequency for index m on an N-point axis.
inline int freq_of(int m, int n) { return m <= n / 2 ? m : m - n; }

// Apply `op(mode, int freqs[3])` over the r2c half-spectrum.
template <typename Op>
void for_each_mode(int dim, int n, fftw_complex* c, Op op) {
    const int nh = n / 2 + 1;
    if (dim == 2) {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < nh; ++j, ++idx) {
                int fr[3] = {freq_of(i, n), j, 0};
                op(c[idx], fr);
            }
    } else {
        std::size_t idx = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < nh; ++k, ++idx) {
                    int fr[3] = {freq_of(i, n), freq_of(j, n), k};
                    op(c[idx], fr);
                }
    }
}

void check_finite(const ScalarField& f, const char* who) {
    if (!f.finite()) throw std::invalid_argument(std::string(who) + ": non-finite field values");
}

}  // namespace

PeriodicGrid PeriodicGrid::make(int dim, int resolution, double extent) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("PeriodicGrid: dim must be 2 or 3");
    if (resolution < 4 || resolution % 2 != 0)
        throw std::invalid_argument("PeriodicGrid: resolution must be even and >= 4");
    if (!(extent > 0)) throw std::invalid_argument("PeriodicGrid: extent must be positive");
    return PeriodicGrid{dim, extent, resolution};
}

double ScalarField::integral() const {
    double s = 0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

double ScalarField::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double ScalarField::min_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::min(m, v);
    return m;
}

double ScalarField::max_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::max(m, v);
    return m;
}

double ScalarField::lp_norm(double p) const {
    if (std::isinf(p)) return max_abs();
    double acc = 0;
    for (double v : values) acc += std::pow(std::abs(v), p);
    return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

bool ScalarField::finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

VectorField VectorField::zeros(const PeriodicGrid& g) {
    VectorField v;
    v.grid = g;
    for (int d = 0; d < g.dim; ++d) v.comp[d].assign(g.cells(), 0.0);
    return v;
}

ScalarField solve_screened_poisson(const ScalarField& rho) {
    check_finite(rho, "solve_screened_poisson");
    const PeriodicGrid& g = rho.grid;
    FftWorkspace& ws = workspace(g);
    std::lock_guard<std::mutex> lk(ws.mtx);
    std::memcpy(ws.rbuf, rho.values.data(), g.cells() * sizeof(double));
    fftw_execute(ws.fwd);
    const double k0 = 2.0 * M_PI / g.extent;
    const double scale = 1.0 / static_cast<double>(g.cells());
    for_each_mode(g.dim, g.resolution, ws.cbuf, [&](fftw_complex& c, const int* fr) {
        double k2 = 0;
        for (int d = 0; d < g.dim; ++d) k2 += (k0 * fr[d]) * (k0 * fr[d]);
        const double mul = scale / (1.0 + k2);
        c[0] *= mul;
        c[1] *= mul;
    });
    fftw_execute(ws.bwd);
    ScalarField out = ScalarField::zeros(g);
    std::memcpy(out.values.data(), ws.rbuf, g.cells() * sizeof(double));
    return out;
}

VectorField gradient_field(const ScalarField& s) {
    check_finite(s, "gradient_field");
    const PeriodicGrid& g = s.grid;
    FftWorkspace& ws = workspace(g);
    VectorField out = VectorField::zeros(g);
    const double k0 = 2.0 * M_PI / g.extent;
    const double scale = 1.0 / static_cast<double>(g.cells());
    std::lock_guard<std::mutex> lk(ws.mtx);
    for (int axis = 0; axis < g.dim; ++axis) {
        std::memcpy(ws.rbuf, s.values.data(), g.cells() * sizeof(double));
        fftw_execute(ws.fwd);
        for_each_mode(g.dim, g.resolution, ws.cbuf, [&](fftw_complex& c, const int* fr) {
            // d/dx -> i*k; the Nyquist mode has no odd partner and is dropped.
            if (fr[axis] == g.resolution / 2) {
                c[0] = c[1] = 0;
                return;
            }
            const double k = k0 * fr[axis];
            const double re = c[0], im = c[1];
            c[0] = -k * im * scale;
            c[1] = k * re * scale;
        });
        fftw_execute(ws.bwd);
        std::memcpy(out.comp[axis].data(), ws.rbuf, g.cells() * sizeof(double));
    }
    return out;
}

ScalarField divergence_field(const VectorField& v) {
    const PeriodicGrid& g = v.grid;
    ScalarField out = ScalarField::zeros(g);
    for (int axis = 0; axis < g.dim; ++axis) {
        ScalarField comp{g, v.comp[axis]};
        VectorField dcomp = gradient_field(comp);
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += dcomp.comp[axis][i];
    }
    return out;
}

ScalarField laplacian_field(const ScalarField& s) {
    check_finite(s, "laplacian_field");
    const PeriodicGrid& g = s.grid;
    FftWorkspace& ws = workspace(g);
    std::lock_guard<std::mutex> lk(ws.mtx);
    std::memcpy(ws.rbuf, s.values.data(), g.cells() * sizeof(double));
    fftw_execute(ws.fwd);
    const double k0 = 2.0 * M_PI / g.extent;
    const double scale = 1.0 / static_cast<double>(g.cells());
    for_each_mode(g.dim, g.resolution, ws.cbuf, [&](fftw_complex& c, const int* fr) {
        bool nyq = false;
        double k2 = 0;
        for (int d = 0; d < g.dim; ++d) {
            if (fr[d] == g.resolution / 2) nyq = true;
            k2 += (k0 * fr[d]) * (k0 * fr[d]);
        }
        // Match the gradient pipeline: Nyquist content does not differentiate.
        const double mul = nyq ? 0.0 : -k2 * scale;
        c[0] *= mul;
        c[1] *= mul;
    });
    fftw_execute(ws.bwd);
    ScalarField out = ScalarField::zeros(g);
    std::memcpy(out.values.data(), ws.rbuf, g.cells() * sizeof(double));
    return out;
}

void spectral_shift(const PeriodicGrid& g, std::span<double> slab,
                    std::span<const double> displacement) {
    if (slab.size() != g.cells()) throw std::invalid_argument("spectral_shift: slab size mismatch");
    FftWorkspace& ws = workspace(g);
    std::lock_guard<std::mutex> lk(ws.mtx);
    std::memcpy(ws.rbuf, slab.data(), g.cells() * sizeof(double));
    fftw_execute(ws.fwd);
    const double k0 = 2.0 * M_PI / g.extent;
    const double scale = 1.0 / static_cast<double>(g.cells());
    // Per-axis phase tables; the Nyquist mode takes the real part (cosine)
    // so Hermitian symmetry of the half-spectrum is preserved.
    const int n = g.resolution;
    std::array<std::vector<std::complex<double>>, 3> phase;
    for (int d = 0; d < g.dim; ++d) {
        phase[d].assign(n, {1.0, 0.0});
        for (int m = 0; m < n; ++m) {
            const int fr = freq_of(m, n);
            const double th = -k0 * fr * displacement[d];
            if (fr == n / 2)
                phase[d][m] = {std::cos(th), 0.0};
            else
                phase[d][m] = {std::cos(th), std::sin(th)};
        }
    }
    const int nh = n / 2 + 1;
    std::size_t idx = 0;
    if (g.dim == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < nh; ++j, ++idx) {
                std::complex<double> c(ws.cbuf[idx][0], ws.cbuf[idx][1]);
                c *= phase[0][i] * phase[1][j] * scale;
                ws.cbuf[idx][0] = c.real();
                ws.cbuf[idx][1] = c.imag();
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < nh; ++k, ++idx) {
                    std::complex<double> c(ws.cbuf[idx][0], ws.cbuf[idx][1]);
                    c *= phase[0][i] * phase[1][j] * phase[2][k] * scale;
                    ws.cbuf[idx][0] = c.real();
                    ws.cbuf[idx][1] = c.imag();
                }
    }
    fftw_execute(ws.bwd);
    std::memcpy(slab.data(), ws.rbuf, g.cells() * sizeof(double));
}

double green_function(int dim, double r) {
    if (!(r > 0)) throw std::domain_error("green_function: r must be > 0 (kernel is singular)");
    if (dim == 3) return std::exp(-r) / (4.0 * M_PI * r);
    if (dim != 2) throw std::invalid_argument("green_function: dim must be 2 or 3");
    // Substitute s = e^u: G = (1/4pi) \int exp(-pi r^2 e^{-u} - e^u/(4pi)) du.
    // The integrand decays double-exponentially at both ends.
    const double u_lo = std::log(M_PI * r * r) - std::log(745.0);
    const double u_hi = std::log(4.0 * M_PI * 745.0);
    auto f = [r](double u) {
        return std::exp(-M_PI * r * r * std::exp(-u) - std::exp(u) / (4.0 * M_PI)) / (4.0 * M_PI);
    };
    return adaptive_simpson(f, u_lo, u_hi, 1e-10);
}

double bessel_bound_A1() {
    // (1/4pi) \int_0^1 e^{-pi/t} dt/t, via t = e^{-u}.
    auto f = [](double u) { return std::exp(-M_PI * std::exp(u)) / (4.0 * M_PI); };
    return adaptive_simpson(f, 0.0, std::log(745.0 / M_PI), 1e-12);
}

double bessel_bound_A2() {
    auto f = [](double s) { return std::exp(-s / (4.0 * M_PI)) / (4.0 * M_PI); };
    return adaptive_simpson(f, 1.0, 4.0 * M_PI * 745.0, 1e-12);
}

double bessel_bound_A() {
    static const double a = bessel_bound_A1() + bessel_bound_A2();
    return a;
}

namespace {

struct StencilPoint {
    std::size_t index;
    double weight;
};

// 2^dim multilinear stencil around a wrapped point.
int cic_stencil(const PeriodicGrid& g, std::span<const double> x, StencilPoint out[8]) {
    const int n = g.resolution;
    const double h = g.spacing();
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int d = 0; d < g.dim; ++d) {
        double u = x[d] / h;
        u -= std::floor(u / n) * n;  // wrap into [0, n)
        int i = static_cast<int>(std::floor(u));
        if (i >= n) i -= n;
        base[d] = i;
        frac[d] = u - i;
    }
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        std::size_t idx = 0;
        double w = 1.0;
        for (int d = 0; d < g.dim; ++d) {
            const int bit = (c >> d) & 1;
            const int i = (base[d] + bit) % n;
            idx = idx * n + i;
            w *= bit ? frac[d] : 1.0 - frac[d];
        }
        out[c] = {idx, w};
    }
    return corners;
}

}  // namespace

double sample_scalar(const ScalarField& s, std::span<const double> x) {
    StencilPoint st[8];
    const int m = cic_stencil(s.grid, x, st);
    double acc = 0;
    for (int c = 0; c < m; ++c) acc += st[c].weight * s.values[st[c].index];
    return acc;
}

std::array<double, 3> sample_vector(const VectorField& v, std::span<const double> x) {
    StencilPoint st[8];
    const int m = cic_stencil(v.grid, x, st);
    std::array<double, 3> out{0, 0, 0};
    for (int d = 0; d < v.grid.dim; ++d) {
        double acc = 0;
        for (int c = 0; c < m; ++c) acc += st[c].weight * v.comp[d][st[c].index];
        out[d] = acc;
    }
    return out;
}

double sample_chem(const ChemState& chem, std::span<const double> x) {
    return sample_scalar(chem.s, x);
}

ScalarField time_derivative_field(const ScalarField& s_new, const ScalarField& s_old, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("time_derivative_field: dt must be > 0");
    if (!(s_new.grid == s_old.grid))
        throw std::invalid_argument("time_derivative_field: grid mismatch");
    ScalarField out = ScalarField::zeros(s_new.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = (s_new.values[i] - s_old.values[i]) / dt;
    return out;
}

ChemState make_chem_state(const ScalarField& rho, double time, const ChemState* previous) {
    ChemState st;
    st.s = solve_screened_poisson(rho);
    st.grad_s = gradient_field(st.s);
    st.time = time;
    if (previous && time > previous->time)
        st.dt_s = time_derivative_field(st.s, previous->s, time - previous->time);
    return st;
}

}  // namespace kinchem
