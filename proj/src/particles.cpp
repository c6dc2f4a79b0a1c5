#include "kinchem/particles.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "kinchem/numerics.hpp"

namespace kinchem {

namespace {

constexpr std::uint64_t kInitStep = ~0ull;

inline double wrap(double u, double L) {
    u -= std::floor(u / L) * L;
    return u < L ? u : 0.0;
}

void unit_velocity(int dim, double u1, double u2, double* out) {
    if (dim == 2) {
        const double th = 2.0 * M_PI * u1;
        out[0] = std::cos(th);
        out[1] = std::sin(th);
    } else {
        const double z = 2.0 * u1 - 1.0;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double ph = 2.0 * M_PI * u2;
        out[0] = r * std::cos(ph);
        out[1] = r * std::sin(ph);
        out[2] = z;
    }
}

}  // namespace

double ParticleEnsemble::y_first_moment() const {
    double j = 0;
    for (std::size_t i = 0; i < count; ++i) j += std::hypot(y[2 * i], y[2 * i + 1]);
    return j * weight();
}

ParticleEnsemble make_ensemble(const PeriodicGrid& grid, std::size_t count, double total_mass,
                               std::uint64_t seed, const ParticleInit& init) {
    if (count == 0) throw std::invalid_argument("make_ensemble: count must be > 0");
    if (!(total_mass > 0)) throw std::invalid_argument("make_ensemble: total mass must be > 0");
    ParticleEnsemble ens;
    ens.dim = grid.dim;
    ens.count = count;
    ens.total_mass = total_mass;
    ens.seed = seed;
    ens.x.resize(count * grid.dim);
    ens.v.resize(count * grid.dim);
    ens.y.resize(count * 2);
    ens.next_event.assign(count, -1.0);  // drawn lazily on first thinning step
    ens.draw_count.assign(count, 0);

    const double L = grid.extent;
    std::array<double, 3> c1 = init.center, c2 = init.center2;
    if (!init.centers_set) {
        c1 = {L / 2, L / 2, L / 2};
        c2 = {L / 4, L / 4, L / 4};
    }
    const CounterRng rng{seed};
    for (std::size_t i = 0; i < count; ++i) {
        double* xi = &ens.x[i * grid.dim];
        if (init.preset == "uniform") {
            for (int d = 0; d < grid.dim; ++d) xi[d] = L * rng.u01(i, kInitStep, d);
        } else if (init.preset == "gaussian-bump" || init.preset == "two-bumps") {
            const double* c =
                (init.preset == "two-bumps" && i % 2 == 1) ? c2.data() : c1.data();
            for (int d = 0; d < grid.dim; ++d) {
                const double u1 = rng.u01(i, kInitStep, 2 * d);
                const double u2 = rng.u01(i, kInitStep, 2 * d + 1);
                const double g = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
                xi[d] = wrap(c[d] + init.width * g, L);
            }
        } else {
            throw std::invalid_argument("make_ensemble: unknown preset '" + init.preset + "'");
        }
        const double u1 = rng.u01(i, kInitStep, 8);
        const double u2 = rng.u01(i, kInitStep, 9);
        unit_velocity(grid.dim, u1, u2, &ens.v[i * grid.dim]);
        ens.y[2 * i] = init.y0[0];
        ens.y[2 * i + 1] = init.y0[1];
    }
    return ens;
}

ScalarField deposit_density(const ParticleEnsemble& ens, const PeriodicGrid& grid, int threads) {
    if (ens.dim != grid.dim) throw std::invalid_argument("deposit_density: dim mismatch");
    const int n = grid.resolution;
    const double h = grid.spacing();
    const double contrib = ens.weight() / grid.cell_volume();
    const std::size_t nc = grid.cells();

    const int nt = std::max(1, threads);
    std::vector<std::vector<double>> partial(nt, std::vector<double>(nc, 0.0));
    parallel_for(ens.count, nt, [&](std::size_t b, std::size_t e, int chunk) {
        std::vector<double>& acc = partial[chunk];
        for (std::size_t i = b; i < e; ++i) {
            const double* xi = &ens.x[i * grid.dim];
            int base[3];
            double frac[3];
            for (int d = 0; d < grid.dim; ++d) {
                double u = xi[d] / h;
                u -= std::floor(u / n) * n;
                int c = static_cast<int>(std::floor(u));
                if (c >= n) c -= n;
                base[d] = c;
                frac[d] = u - c;
            }
            const int corners = 1 << grid.dim;
            for (int c = 0; c < corners; ++c) {
                std::size_t idx = 0;
                double w = contrib;
                for (int d = 0; d < grid.dim; ++d) {
                    const int bit = (c >> d) & 1;
                    idx = idx * n + (base[d] + bit) % n;
                    w *= bit ? frac[d] : 1.0 - frac[d];
                }
                acc[idx] += w;
            }
        }
    });
    ScalarField rho = ScalarField::zeros(grid);
    for (int t = 0; t < nt; ++t)
        for (std::size_t c = 0; c < nc; ++c) rho.values[c] += partial[t][c];
    return rho;
}

RateCflError::RateCflError(double lambda, double dt)
    : std::runtime_error([lambda, dt] {
          std::ostringstream os;
          os << "tumble-rate CFL violated: dt * max lambda = " << dt * lambda
             << " > 0.5; halve dt (max lambda " << lambda << ", dt " << dt << ")";
          return os.str();
      }()),
      max_lambda(lambda) {}

std::size_t advance_particles(ParticleEnsemble& ens, const ChemState& chem,
                              const InternalModel& model, const TumblingRate& rate, double dt,
                              const AdvanceOptions& opts) {
    validate_model(model);
    if (!(dt > 0)) throw std::invalid_argument("advance_particles: dt must be > 0");
    const double guard = max_stable_dt(model);
    if (dt > guard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "advance_particles: dt = " << dt << " exceeds the internal stiffness guard "
           << guard << "; halve dt";
        throw std::invalid_argument(os.str());
    }
    double max_lambda = 0;
    for (std::size_t i = 0; i < ens.count; ++i)
        max_lambda = std::max(max_lambda, tumbling_rate(rate, {ens.y[2 * i], ens.y[2 * i + 1]}));
    if (dt * max_lambda > 0.5) throw RateCflError(max_lambda, dt);

    const PeriodicGrid& grid = chem.s.grid;
    const double L = grid.extent;
    const int dim = ens.dim;
    const CounterRng rng{ens.seed};
    const std::uint64_t step = ens.step;
    const bool thinning = opts.mode == TumbleMode::Thinning;
    const int threads = opts.tumble_log ? 1 : opts.threads;

    std::vector<std::size_t> tumbles_per_chunk(std::max(1, threads), 0);
    parallel_for(ens.count, threads, [&](std::size_t b, std::size_t e, int chunk) {
        double xm[3], xs[3];
        std::size_t tumbles = 0;
        for (std::size_t i = b; i < e; ++i) {
            double* xi = &ens.x[i * dim];
            double* vi = &ens.v[i * dim];
            YState yi{ens.y[2 * i], ens.y[2 * i + 1]};

            // internal update with S frozen at the mid-path position
            for (int d = 0; d < dim; ++d) xm[d] = wrap(xi[d] + 0.5 * dt * vi[d], L);
            const double s_mid =
                std::max(0.0, sample_scalar(chem.s, {xm, static_cast<std::size_t>(dim)}));
            yi = rk4_step(model, yi, s_mid, dt);

            if (!thinning) {
                for (int d = 0; d < dim; ++d) xi[d] = wrap(xi[d] + dt * vi[d], L);
                const double lam = tumbling_rate(rate, yi);
                const double p = -std::expm1(-lam * dt);
                if (rng.u01(i, step, 0) < p) {
                    unit_velocity(dim, rng.u01(i, step, 1), rng.u01(i, step, 2), vi);
                    ++tumbles;
                    if (opts.tumble_log)
                        opts.tumble_log->push_back(
                            {static_cast<std::uint32_t>(i), ens.time + dt,
                             {vi[0], vi[1], dim == 3 ? vi[2] : 0.0}});
                }
            } else {
                // exact event times; lambda is frozen at the step's y-state
                const double lam = tumbling_rate(rate, yi);
                double t_cur = ens.time;
                const double t_next = ens.time + dt;
                if (ens.next_event[i] < 0) {
                    const double u = rng.u01(i, 0, ens.draw_count[i]++);
                    ens.next_event[i] =
                        lam > 0 ? t_cur - std::log1p(-u) / lam
                                : std::numeric_limits<double>::infinity();
                }
                while (ens.next_event[i] <= t_next) {
                    const double seg = ens.next_event[i] - t_cur;
                    for (int d = 0; d < dim; ++d) xi[d] = wrap(xi[d] + seg * vi[d], L);
                    t_cur = ens.next_event[i];
                    unit_velocity(dim, rng.u01(i, 0, ens.draw_count[i]++),
                                  rng.u01(i, 0, ens.draw_count[i]++), vi);
                    ++tumbles;
                    if (opts.tumble_log)
                        opts.tumble_log->push_back({static_cast<std::uint32_t>(i), t_cur,
                                                    {vi[0], vi[1], dim == 3 ? vi[2] : 0.0}});
                    const double u = rng.u01(i, 0, ens.draw_count[i]++);
                    ens.next_event[i] =
                        lam > 0 ? t_cur - std::log1p(-u) / lam
                                : std::numeric_limits<double>::infinity();
                }
                for (int d = 0; d < dim; ++d) xi[d] = wrap(xi[d] + (t_next - t_cur) * vi[d], L);
            }
            ens.y[2 * i] = yi[0];
            ens.y[2 * i + 1] = yi[1];
        }
        tumbles_per_chunk[chunk] += tumbles;
    });
    ens.step += 1;
    ens.time += dt;
    std::size_t total = 0;
    for (std::size_t t : tumbles_per_chunk) total += t;
    return total;
}

ParticleRunResult run_coupled(ParticleEnsemble ens, const PeriodicGrid& grid,
                              const InternalModel& model, const TumblingRate& rate, double t_end,
                              double dt, const CoupledRunOptions& opts) {
    if (!(dt > 0) || !(t_end >= 0))
        throw std::invalid_argument("run_coupled: need dt > 0, t_end >= 0");
    ParticleRunResult res;
    DiagnosticsSeries& diag = res.diag;
    diag.columns = {{"step", "1", "step index"},
                    {"t", "time", "simulation time"},
                    {"mass", "mass", "total represented mass (exact)"},
                    {"sup_S", "concentration", "max |S|"}};
    for (double p : opts.track_rho_p) {
        std::ostringstream os;
        os << "rho_L" << p;
        diag.columns.push_back({os.str(), "density", "spatial L^p norm of rho"});
    }
    diag.columns.push_back({"J", "mass", "first internal moment sum_i w |y_i|"});
    diag.columns.push_back(
        {"s_alpha_rho", "mixed", "integral of S^alpha rho over the box"});
    diag.columns.push_back({"tumbles", "1", "tumble events during the following step"});

    const std::size_t steps = static_cast<std::size_t>(std::llround(t_end / dt));
    ChemState chem;
    ChemState prev;
    bool have_prev = false;

    AdvanceOptions aopts;
    aopts.mode = opts.mode;
    aopts.threads = opts.threads;
    aopts.tumble_log = opts.tumble_log;

    for (std::size_t step = 0; step <= steps; ++step) {
        ScalarField rho = deposit_density(ens, grid, opts.threads);
        chem = make_chem_state(rho, ens.time, have_prev ? &prev : nullptr);
        have_prev = true;

        double s_alpha_rho = 0;
        for (std::size_t c = 0; c < rho.values.size(); ++c) {
            const double s = std::max(0.0, chem.s.values[c]);
            s_alpha_rho += std::pow(s, opts.moment_alpha) * rho.values[c];
        }
        s_alpha_rho *= grid.cell_volume();

        std::vector<double> row{static_cast<double>(step), ens.time, ens.mass(),
                                chem.s.max_abs()};
        for (double p : opts.track_rho_p) row.push_back(rho.lp_norm(p));
        row.push_back(ens.y_first_moment());
        row.push_back(s_alpha_rho);
        row.push_back(0.0);  // tumbles filled in below

        bool bad = false;
        for (double v : row)
            if (!std::isfinite(v)) bad = true;
        if (bad) {
            res.aborted = true;
            std::ostringstream os;
            os << "numerical abort at step " << step << " (non-finite diagnostics)";
            res.abort_reason = os.str();
            break;
        }
        diag.rows.push_back(std::move(row));

        if (step == steps) break;
        const std::size_t tumbles = advance_particles(ens, chem, model, rate, dt, aopts);
        diag.rows.back().back() = static_cast<double>(tumbles);
        if (opts.snapshot_sink && opts.snapshot_every && (step + 1) % opts.snapshot_every == 0)
            opts.snapshot_sink(ens, step + 1);
        prev = chem;
    }
    res.ens = std::move(ens);
    return res;
}

}  // namespace kinchem
