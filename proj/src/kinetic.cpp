#include "kinchem/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kinchem/numerics.hpp"

namespace kinchem {

double VelocitySet::measure() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
}

VelocitySet circle_velocity_set(int n) {
    if (n < 2) throw std::invalid_argument("circle_velocity_set: need n >= 2");
    VelocitySet vs;
    vs.dim = 2;
    vs.domain = VelocitySet::Domain::Sphere;
    const double w = 2.0 * M_PI / n;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * M_PI * i / n;
        vs.nodes.push_back({std::cos(th), std::sin(th), 0.0});
        vs.weights.push_back(w);
    }
    return vs;
}

VelocitySet sphere_velocity_set(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 3)
        throw std::invalid_argument("sphere_velocity_set: need n_theta >= 2, n_phi >= 3");
    VelocitySet vs;
    vs.dim = 3;
    vs.domain = VelocitySet::Domain::Sphere;
    const GaussLegendre gl = gauss_legendre(n_theta);  // nodes in cos(theta)
    for (int i = 0; i < n_theta; ++i) {
        const double ct = gl.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < n_phi; ++j) {
            const double ph = 2.0 * M_PI * j / n_phi;
            vs.nodes.push_back({st * std::cos(ph), st * std::sin(ph), ct});
            vs.weights.push_back(gl.weights[i] * 2.0 * M_PI / n_phi);
        }
    }
    return vs;
}

VelocitySet sphere_velocity_set_for(int n) {
    // Largest n_theta * n_phi <= n with n_phi >= 3, preferring n_phi ~ 2 n_theta.
    int best_t = 2, best_p = 3;
    for (int t = 2; 3 * t <= n; ++t) {
        const int p = std::max(3, n / t);
        if (t * p > n) continue;
        const bool better = t * p > best_t * best_p ||
                            (t * p == best_t * best_p &&
                             std::abs(p - 2 * t) < std::abs(best_p - 2 * best_t));
        if (better) {
            best_t = t;
            best_p = p;
        }
    }
    return sphere_velocity_set(best_t, best_p);
}

VelocitySet disk_velocity_set(int n_r, int n_angle) {
    if (n_r < 2 || n_angle < 3)
        throw std::invalid_argument("disk_velocity_set: need n_r >= 2, n_angle >= 3");
    VelocitySet vs;
    vs.dim = 2;
    vs.domain = VelocitySet::Domain::Ball;
    const GaussLegendre gl = gauss_legendre(n_r);
    for (int i = 0; i < n_r; ++i) {
        const double r = 0.5 * (gl.nodes[i] + 1.0);  // map to [0,1]
        const double wr = 0.5 * gl.weights[i] * r;   // measure r dr
        for (int j = 0; j < n_angle; ++j) {
            const double th = 2.0 * M_PI * j / n_angle;
            vs.nodes.push_back({r * std::cos(th), r * std::sin(th), 0.0});
            vs.weights.push_back(wr * 2.0 * M_PI / n_angle);
        }
    }
    return vs;
}

VelocitySet ball_velocity_set(int n_r, int n_theta, int n_phi) {
    if (n_r < 2) throw std::invalid_argument("ball_velocity_set: need n_r >= 2");
    VelocitySet shell = sphere_velocity_set(n_theta, n_phi);
    VelocitySet vs;
    vs.dim = 3;
    vs.domain = VelocitySet::Domain::Ball;
    const GaussLegendre gl = gauss_legendre(n_r);
    for (int i = 0; i < n_r; ++i) {
        const double r = 0.5 * (gl.nodes[i] + 1.0);
        const double wr = 0.5 * gl.weights[i] * r * r;  // measure r^2 dr
        for (std::size_t j = 0; j < shell.size(); ++j) {
            vs.nodes.push_back(
                {r * shell.nodes[j][0], r * shell.nodes[j][1], r * shell.nodes[j][2]});
            vs.weights.push_back(wr * shell.weights[j]);
        }
    }
    return vs;
}

KineticDensity KineticDensity::zeros(const PeriodicGrid& g, const VelocitySet& v) {
    if (g.dim != v.dim) throw std::invalid_argument("KineticDensity: grid/velocity dim mismatch");
    KineticDensity f;
    f.grid = g;
    f.vel = v;
    f.f.assign(g.cells() * v.size(), 0.0);
    return f;
}

ScalarField KineticDensity::density() const {
    ScalarField rho = ScalarField::zeros(grid);
    const std::size_t nc = grid.cells();
    for (std::size_t j = 0; j < vel.size(); ++j) {
        const double w = vel.weights[j];
        const double* fj = f.data() + j * nc;
        for (std::size_t c = 0; c < nc; ++c) rho.values[c] += w * fj[c];
    }
    return rho;
}

double KineticDensity::mass() const {
    double m = 0;
    const std::size_t nc = grid.cells();
    for (std::size_t j = 0; j < vel.size(); ++j) {
        double s = 0;
        const double* fj = f.data() + j * nc;
        for (std::size_t c = 0; c < nc; ++c) s += fj[c];
        m += vel.weights[j] * s;
    }
    return m * grid.cell_volume();
}

double KineticDensity::max_abs() const {
    double m = 0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double KineticDensity::min_value() const {
    double m = f.empty() ? 0.0 : f[0];
    for (double v : f) m = std::min(m, v);
    return m;
}

CflError::CflError(double rate, double dt)
    : std::runtime_error([rate, dt] {
          std::ostringstream os;
          os << "scattering CFL violated: dt * max loss rate = " << dt * rate << " > 0.9 "
             << "(max rate " << rate << ", dt " << dt << ")";
          return os.str();
      }()),
      max_rate(rate) {}

void transport_in_place(KineticDensity& f, double dt) {
    if (!(dt != 0)) return;
    double disp[3];
    for (std::size_t j = 0; j < f.vel.size(); ++j) {
        for (int d = 0; d < f.grid.dim; ++d) disp[d] = f.vel.nodes[j][d] * dt;
        spectral_shift(f.grid, f.slab(j), {disp, static_cast<std::size_t>(f.grid.dim)});
    }
    f.time += dt;
}

KineticDensity transport_step(KineticDensity f, double dt) {
    transport_in_place(f, dt);
    return f;
}

void scattering_in_place(KineticDensity& f, const ChemState& chem, const KernelSpec& spec,
                         double dt, ScatteringMode mode) {
    if (!(dt > 0)) throw std::invalid_argument("scattering_step: dt must be > 0");
    const TurningKernel kernel(spec, chem);
    const std::size_t nc = f.grid.cells();
    const std::size_t nv = f.vel.size();
    const int dim = f.grid.dim;
    const int n = f.grid.resolution;
    const double h = f.grid.spacing();
    const bool vel_indep = kernel_is_velocity_independent(spec);

    // CFL scan first in explicit mode so a rejected step leaves f untouched.
    const double sup_rate = kernel.bound();
    double wsum = 0;
    for (double w : f.vel.weights) wsum += w;
    if (mode == ScatteringMode::Explicit && dt * sup_rate * wsum > 0.9)
        throw CflError(sup_rate * wsum, dt);

    std::vector<double> fold(nv), gain(nv), loss(nv);
    const auto& nodes = f.vel.nodes;
    double x[3] = {0, 0, 0};
    for (std::size_t c = 0; c < nc; ++c) {
        // cell center coordinates (row-major, axis 0 slowest)
        std::size_t rem = c;
        for (int d = dim - 1; d >= 0; --d) {
            x[d] = (static_cast<double>(rem % n)) * h;
            rem /= n;
        }
        std::span<const double> xs(x, static_cast<std::size_t>(dim));
        for (std::size_t j = 0; j < nv; ++j) fold[j] = f.f[j * nc + c];

        if (vel_indep) {
            const double rate = kernel.eval(xs, {nodes[0].data(), 3}, {nodes[0].data(), 3});
            double rho_c = 0;
            for (std::size_t j = 0; j < nv; ++j) rho_c += f.vel.weights[j] * fold[j];
            const double lrate = rate * wsum;
            if (mode == ScatteringMode::Explicit) {
                for (std::size_t j = 0; j < nv; ++j)
                    f.f[j * nc + c] = fold[j] + dt * (rate * rho_c - lrate * fold[j]);
            } else {
                const double decay = std::exp(-lrate * dt);
                const double gfac = lrate > 0 ? (1.0 - decay) / lrate : dt;
                double new_mass = 0;
                for (std::size_t j = 0; j < nv; ++j) {
                    const double val = fold[j] * decay + rate * rho_c * gfac;
                    f.f[j * nc + c] = val;
                    new_mass += f.vel.weights[j] * val;
                }
                // renormalize cell mass (exponential loss is not conservative)
                if (new_mass > 0) {
                    const double fix = rho_c / new_mass;
                    for (std::size_t j = 0; j < nv; ++j) f.f[j * nc + c] *= fix;
                }
            }
            continue;
        }

        // General kernel: full pairwise rates.
        double cell_mass = 0;
        for (std::size_t j = 0; j < nv; ++j) cell_mass += f.vel.weights[j] * fold[j];
        std::fill(gain.begin(), gain.end(), 0.0);
        std::fill(loss.begin(), loss.end(), 0.0);
        for (std::size_t j = 0; j < nv; ++j) {
            for (std::size_t k = 0; k < nv; ++k) {
                const double t = kernel.eval(xs, {nodes[j].data(), 3}, {nodes[k].data(), 3});
                gain[j] += f.vel.weights[k] * t * fold[k];
                loss[k] += f.vel.weights[j] * t;
            }
        }
        if (mode == ScatteringMode::Explicit) {
            for (std::size_t j = 0; j < nv; ++j)
                f.f[j * nc + c] = fold[j] + dt * (gain[j] - loss[j] * fold[j]);
        } else {
            double new_mass = 0;
            for (std::size_t j = 0; j < nv; ++j) {
                const double decay = std::exp(-loss[j] * dt);
                const double gfac = loss[j] > 0 ? (1.0 - decay) / loss[j] : dt;
                const double val = fold[j] * decay + gain[j] * gfac;
                f.f[j * nc + c] = val;
                new_mass += f.vel.weights[j] * val;
            }
            if (new_mass > 0) {
                const double fix = cell_mass / new_mass;
                for (std::size_t j = 0; j < nv; ++j) f.f[j * nc + c] *= fix;
            }
        }
    }
}

KineticDensity scattering_step(KineticDensity f, const ChemState& chem, const KernelSpec& spec,
                               double dt, ScatteringMode mode) {
    scattering_in_place(f, chem, spec, dt, mode);
    return f;
}

double flat_lp_norm(const KineticDensity& f, double p) {
    const std::size_t nc = f.grid.cells();
    if (std::isinf(p)) return f.max_abs();
    double acc = 0;
    for (std::size_t j = 0; j < f.vel.size(); ++j) {
        double s = 0;
        const double* fj = f.f.data() + j * nc;
        for (std::size_t c = 0; c < nc; ++c) s += std::pow(std::abs(fj[c]), p);
        acc += f.vel.weights[j] * s;
    }
    return std::pow(acc * f.grid.cell_volume(), 1.0 / p);
}

KineticRunResult run_kinetic(KineticDensity f0, const KernelSpec& spec, double t_end, double dt,
                             const KineticRunOptions& opts) {
    if (!(dt > 0) || !(t_end >= 0)) throw std::invalid_argument("run_kinetic: need dt > 0, t_end >= 0");
    validate_kernel(spec);

    KineticRunResult res;
    res.kernel = spec;
    DiagnosticsSeries& diag = res.diag;
    diag.columns = {{"step", "1", "step index"},
                    {"t", "time", "simulation time"},
                    {"mass", "mass", "total cell mass"},
                    {"max_f", "density", "max phase-space density"},
                    {"sup_S", "concentration", "max |S|"}};
    for (double p : opts.track_rho_p) {
        std::ostringstream os;
        os << "rho_L" << p;
        diag.columns.push_back({os.str(), "density", "spatial L^p norm of rho"});
    }
    for (double p : opts.track_f_p) {
        std::ostringstream os;
        os << "f_L" << p;
        diag.columns.push_back({os.str(), "density", "flat L^p norm of f over (x,v)"});
    }
    if (opts.track_s_r)
        diag.columns.push_back({"S_Lr", "concentration", "spatial L^r norm of S"});

    const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
    KineticDensity state = std::move(f0);
    KineticDensity last_good = state;
    ChemState chem = make_chem_state(state.density(), state.time);
    ChemState* prev = nullptr;
    ChemState prev_store;

    auto record = [&](std::size_t step) {
        std::vector<double> row;
        row.push_back(static_cast<double>(step));
        row.push_back(state.time);
        row.push_back(state.mass());
        row.push_back(state.max_abs());
        row.push_back(chem.s.max_abs());
        ScalarField rho = state.density();
        for (double p : opts.track_rho_p) row.push_back(rho.lp_norm(p));
        for (double p : opts.track_f_p) row.push_back(flat_lp_norm(state, p));
        if (opts.track_s_r) row.push_back(chem.s.lp_norm(*opts.track_s_r));
        diag.rows.push_back(std::move(row));
    };

    record(0);
    for (std::size_t step = 1; step <= steps; ++step) {
        try {
            transport_in_place(state, 0.5 * dt);
            prev_store = std::move(chem);
            prev = &prev_store;
            chem = make_chem_state(state.density(), state.time, prev);
            scattering_in_place(state, chem, spec, dt, opts.mode);
            transport_in_place(state, 0.5 * dt);
        } catch (const CflError&) {
            throw;  // precondition problem, not a numerical blow-up
        }

        const double m = state.mass();
        if (!std::isfinite(m) || m < 0 || !std::isfinite(state.max_abs())) {
            res.aborted = true;
            std::ostringstream os;
            os << "numerical abort at step " << step << ": mass = " << m;
            res.abort_reason = os.str();
            if (opts.on_abort) opts.on_abort(last_good);
            res.state = std::move(last_good);
            return res;
        }
        record(step);
        last_good = state;
        if (opts.snapshot_sink && opts.snapshot_every && step % opts.snapshot_every == 0)
            opts.snapshot_sink(state, step);
    }
    res.state = std::move(state);
    return res;
}

}  // namespace kinchem
