#include "kinchem/runner.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "kinchem/io.hpp"
#include "kinchem/numerics.hpp"
#include "kinchem/presets.hpp"

namespace kinchem {

namespace fs = std::filesystem;

namespace {

nlohmann::json param_or(const nlohmann::json& params, const char* key, nlohmann::json def) {
    return params.contains(key) ? params.at(key) : def;
}

void write_report_json(const fs::path& dir, const std::vector<Report>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    std::ofstream os(dir / "verify.json");
    os << arr.dump(2) << "\n";
}

void write_ratio_csv(const fs::path& path, const std::vector<Report>& reports) {
    std::ofstream os(path);
    os << "report,check,lhs,rhs,ratio,tolerance,verdict\n";
    for (const auto& r : reports)
        for (const auto& it : r.items) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,%.17g,%s\n", r.name.c_str(),
                          it.check.c_str(), it.lhs, it.rhs, it.ratio, it.tolerance,
                          it.verdict.c_str());
            os << buf;
        }
}

int run_kinetic_mode(const RunConfig& cfg, const fs::path& out) {
    const PeriodicGrid grid = PeriodicGrid::make(cfg.dim, cfg.resolution, cfg.extent);
    const VelocitySet vel =
        cfg.dim == 2 ? circle_velocity_set(cfg.n_v) : sphere_velocity_set_for(cfg.n_v);
    KineticDensity f0 = make_initial_kinetic(grid, vel, cfg.initial, cfg.total_mass);

    KineticRunOptions opts;
    opts.track_rho_p = cfg.track_rho_p;
    opts.track_f_p = cfg.track_f_p;
    opts.track_s_r = cfg.track_s_r;
    if (!opts.track_s_r)
        if (const auto* lr = std::get_if<LrPowerKernel>(&cfg.kernel)) opts.track_s_r = lr->r;
    opts.mode = cfg.scattering_mode == "exponential" ? ScatteringMode::ExponentialLoss
                                                     : ScatteringMode::Explicit;
    opts.snapshot_every = cfg.snapshot_every;
    if (cfg.snapshot_every)
        opts.snapshot_sink = [&](const KineticDensity& f, std::size_t step) {
            write_kinetic_snapshot(out / "snapshots", "f_step" + std::to_string(step), f);
        };
    opts.on_abort = [&](const KineticDensity& f) {
        write_kinetic_snapshot(out / "snapshots", "f_lastgood", f);
    };

    KineticRunResult res = run_kinetic(std::move(f0), cfg.kernel, cfg.t_end, cfg.dt, opts);
    write_diagnostics_csv(out / "diagnostics.csv", res.diag);
    write_field_snapshot(out, "rho_final", res.state.density(), res.state.time, "rho");
    if (res.aborted) {
        std::cerr << res.abort_reason << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int run_particles_mode(const RunConfig& cfg, const fs::path& out) {
    const PeriodicGrid grid = PeriodicGrid::make(cfg.dim, cfg.resolution, cfg.extent);
    ParticleInit init = cfg.initial;
    init.y0 = cfg.y0;
    ParticleEnsemble ens =
        make_ensemble(grid, cfg.particle_count, cfg.total_mass, cfg.seed, init);

    CoupledRunOptions opts;
    opts.track_rho_p = cfg.track_rho_p;
    opts.moment_alpha = cfg.moment_alpha;
    opts.mode = cfg.tumble_mode == "thinning" ? TumbleMode::Thinning : TumbleMode::Bernoulli;
    opts.threads = cfg.threads;
    opts.snapshot_every = cfg.snapshot_every;
    if (cfg.snapshot_every)
        opts.snapshot_sink = [&](const ParticleEnsemble& e, std::size_t step) {
            write_particle_checkpoint(out / "snapshots", "ens_step" + std::to_string(step), e);
        };

    ParticleRunResult res =
        run_coupled(std::move(ens), grid, cfg.internal, cfg.tumbling, cfg.t_end, cfg.dt, opts);
    write_diagnostics_csv(out / "diagnostics.csv", res.diag);
    write_particle_checkpoint(out, "ens_final", res.ens);
    if (res.aborted) {
        write_particle_checkpoint(out / "snapshots", "ens_lastgood", res.ens);
        std::cerr << res.abort_reason << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

}  // namespace

Report run_verify_check(const VerifyCheckConfig& check, std::uint64_t seed, int threads,
                        const fs::path& out_dir) {
    const nlohmann::json& P = check.params;
    if (check.name == "strichartz") {
        return strichartz_exponent_check(strichartz_paper_tuple(),
                                         param_or(P, "residual_tol", 1e-12));
    }
    if (check.name == "bessel") {
        const int points = param_or(P, "points", 50);
        const double r_min = param_or(P, "r_min", 1e-6);
        std::vector<double> grid;
        for (int i = 0; i < points; ++i)
            grid.push_back(std::pow(10.0, std::log10(r_min) * (1.0 - static_cast<double>(i) /
                                                                         (points - 1))));
        std::vector<BesselRow> table;
        Report rep = bessel_log_bound_table(grid, &table);
        std::ofstream os(out_dir / "bessel_table.csv");
        os << "r,G,bound,residual\n";
        for (const auto& row : table) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", row.r, row.green,
                          row.bound, row.residual);
            os << buf;
        }
        return rep;
    }
    if (check.name == "gamma-stirling") {
        std::vector<double> xg = param_or(P, "x_grid", std::vector<double>{0.5, 1, 2, 5, 10});
        std::vector<double> bg = param_or(P, "beta_grid", std::vector<double>{0, 0.5, 1, 2, 3});
        return gamma_stirling_checks(xg, bg, param_or(P, "n_max", 200));
    }
    if (check.name == "series") {
        Report rep;
        rep.name = "series-root-test";
        std::vector<double> Ms = param_or(P, "M_grid", std::vector<double>{0.5, 1.0, 2.5});
        std::vector<double> mus = param_or(P, "mu_grid", std::vector<double>{2.1, 3.0, 4.0});
        const double beta = param_or(P, "beta", 1.0);
        const int j_max = param_or(P, "j_max", 10000);
        std::ofstream os(out_dir / "series_ratios.csv");
        os << "beta,mu,M,limit_estimate,predicted_limit,verdict\n";
        for (double mu : mus)
            for (double M : Ms) {
                SeriesProbeResult pr = series_convergence_probe(beta, mu, M, j_max);
                for (auto& it : pr.report.items) rep.items.push_back(it);
                char buf[200];
                std::snprintf(buf, sizeof buf, "%.5g,%.5g,%.5g,%.17g,%.17g,%s\n", beta, mu, M,
                              pr.limit_estimate, beta == 1.0 ? M * mu / (2.0 * M_PI) : 0.0,
                              pr.verdict.c_str());
                os << buf;
            }
        return rep;
    }
    if (check.name == "dispersion") {
        const int n = param_or(P, "N", 64);
        const double L = param_or(P, "L", 10.0);
        const double sigma = param_or(P, "sigma", 0.25);
        const double p = param_or(P, "p", 1.5);
        const PeriodicGrid grid = PeriodicGrid::make(2, n, L);
        const VelocitySet vel =
            disk_velocity_set(param_or(P, "n_r", 12), param_or(P, "n_angle", 96));
        ParticleInit init;
        init.preset = "gaussian-bump";
        init.width = sigma;
        KineticDensity f0 = make_initial_kinetic(grid, vel, init, 1.0);
        std::vector<double> ts;
        const int nt = param_or(P, "n_t", 10);
        for (int i = 0; i < nt; ++i)
            ts.push_back(0.5 + (L / 4.0 - 0.5) * i / std::max(1, nt - 1));
        return verify_dispersion(f0, p, ts, param_or(P, "tol", 0.05));
    }
    if (check.name == "symmetrization") {
        const int n = param_or(P, "N", 64);
        const int n_v = param_or(P, "n_v", 16);
        const int steps = param_or(P, "steps", 500);
        const double dt = param_or(P, "dt", 0.02);
        const PeriodicGrid grid = PeriodicGrid::make(2, n, param_or(P, "L", 10.0));
        ParticleInit init;
        init.preset = "gaussian-bump";
        init.width = param_or(P, "width", 1.0);
        KineticDensity f0 = make_initial_kinetic(grid, circle_velocity_set(n_v), init, 1.0);
        // break the v-uniformity so the norms have somewhere to go
        const std::size_t nc = grid.cells();
        for (std::size_t j = 0; j < f0.vel.size(); ++j) {
            const double fac = 1.0 + 0.5 * std::cos(2.0 * M_PI * j / f0.vel.size());
            for (std::size_t c = 0; c < nc; ++c) f0.f[j * nc + c] *= fac;
        }
        KernelSpec spec = SymmetricKernel{param_or(P, "base", 0.5), param_or(P, "s_coeff", 0.5),
                                          param_or(P, "vdiff_coeff", 0.5)};
        KineticRunOptions opts;
        std::vector<double> ps = param_or(P, "p_list", std::vector<double>{1.5, 2.0, 4.0});
        opts.track_f_p = ps;
        KineticRunResult res = run_kinetic(std::move(f0), spec, steps * dt, dt, opts);
        write_diagnostics_csv(out_dir / "symmetrization_diagnostics.csv", res.diag);
        return verify_symmetrization(res, ps, param_or(P, "tol", 1e-10));
    }
    if (check.name == "elliptic") {
        const int n = param_or(P, "N", 32);
        const double L = param_or(P, "L", 10.0);
        const double p = param_or(P, "p", 2.0);
        const int cases = param_or(P, "cases", 20);
        const PeriodicGrid grid = PeriodicGrid::make(3, n, L);
        Report rep;
        rep.name = "elliptic-sup";
        std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int c = 0; c < cases; ++c) {
            // random nonnegative density: a few random bumps of random width
            ScalarField rho = ScalarField::zeros(grid);
            ParticleInit bump;
            bump.preset = "gaussian-bump";
            bump.centers_set = true;
            const int nb = 1 + static_cast<int>(unif(gen) * 3);
            for (int b = 0; b < nb; ++b) {
                bump.width = 0.2 + 1.5 * unif(gen);
                for (int d = 0; d < 3; ++d) bump.center[d] = L * unif(gen);
                ScalarField part = make_preset_density(grid, bump, 0.2 + unif(gen));
                for (std::size_t i = 0; i < rho.values.size(); ++i)
                    rho.values[i] += part.values[i];
            }
            Report one = verify_elliptic_sup(rho, p);
            for (auto& it : one.items) {
                it.inputs["case"] = c;
                rep.items.push_back(it);
            }
        }
        return rep;
    }
    if (check.name == "sublinear") {
        const double alpha = param_or(P, "alpha", 0.5);
        const double p = param_or(P, "p", 1.6);
        const double q = 1.0 / (alpha / 3.0 + 1.0 / p);
        const PeriodicGrid grid = PeriodicGrid::make(3, param_or(P, "N", 16), 10.0);
        ParticleInit init;
        init.width = 1.0;
        ParticleEnsemble ens =
            make_ensemble(grid, param_or(P, "count", std::size_t(20000)), 0.1, seed, init);
        CoupledRunOptions opts;
        opts.track_rho_p = {p};
        opts.threads = threads;
        ParticleRunResult res = run_coupled(std::move(ens), grid, LinearExcAdapt{}, TumblingRate{},
                                            param_or(P, "t_end", 5.0), 0.001, opts);
        write_diagnostics_csv(out_dir / "sublinear_diagnostics.csv", res.diag);
        return verify_sublinear_closure(res.diag, alpha, p, q);
    }
    if (check.name == "moment") {
        const double C = param_or(P, "C", 1.0);
        const double alpha = param_or(P, "alpha", 0.5);
        const double t_end = param_or(P, "t_end", 10.0);
        const double dt = param_or(P, "dt", 0.01);
        const std::size_t count = param_or(P, "count", std::size_t(100000));
        const PeriodicGrid grid =
            PeriodicGrid::make(2, param_or(P, "N", 64), param_or(P, "L", 10.0));
        ParticleInit init;
        init.width = 1.0;
        init.y0 = {1.0, 0.0};
        ParticleEnsemble ens = make_ensemble(grid, count, param_or(P, "mass", 1.0), seed, init);
        TumblingRate rate;
        rate.lambda0 = param_or(P, "lambda0", 1.0);
        rate.lambda1 = 0.0;  // growth-boundary |y| explodes; keep the rate CFL satisfiable
        CoupledRunOptions opts;
        opts.moment_alpha = alpha;
        opts.threads = threads;
        ParticleRunResult res =
            run_coupled(std::move(ens), grid, GrowthBoundary{C}, rate, t_end, dt, opts);
        write_diagnostics_csv(out_dir / "moment_diagnostics.csv", res.diag);
        MomentBoundParams mp;
        mp.growth_c = C;
        mp.alpha = alpha;
        mp.mass = param_or(P, "mass", 1.0);
        mp.dt = dt;
        return verify_moment_bound(res.diag, mp);
    }
    throw ConfigError({"unknown verify check '" + check.name + "'"});
}

int execute_run(const RunConfig& cfg_in, const RunOverrides& overrides) {
    RunConfig cfg = cfg_in;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.threads) cfg.threads = *overrides.threads;
    if (overrides.out_dir) cfg.output_dir = *overrides.out_dir;

    const fs::path out(cfg.output_dir);
    fs::create_directories(out);

    RunManifest manifest;
    manifest.config_echo = cfg.to_json();
    manifest.code_version = kCodeVersion;
    manifest.threads = cfg.threads;
    manifest.seed = cfg.seed;
    manifest.started_at = current_timestamp();

    int code = kExitOk;
    try {
        if (cfg.mode == "kinetic") {
            code = run_kinetic_mode(cfg, out);
        } else if (cfg.mode == "particles") {
            code = run_particles_mode(cfg, out);
        } else {
            std::vector<Report> reports;
            bool all_pass = true;
            for (const auto& check : cfg.checks) {
                Report rep = run_verify_check(check, cfg.seed, cfg.threads, out);
                all_pass = all_pass && rep.passed();
                reports.push_back(std::move(rep));
            }
            write_report_json(out, reports);
            write_ratio_csv(out / "ratios.csv", reports);
            code = all_pass ? kExitOk : kExitVerification;
        }
    } catch (const CflError& e) {
        std::cerr << e.what() << "\n";
        code = kExitConfig;  // precondition, caller must adjust dt
    } catch (const RateCflError& e) {
        std::cerr << e.what() << "\n";
        code = kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        manifest.failure_reason = e.what();
        code = kExitNumerical;
    }

    manifest.status = code == kExitOk ? "COMPLETED"
                      : code == kExitVerification ? "COMPLETED"  // checks ran; verdicts inside
                                                  : "FAILED";
    manifest.finished_at = current_timestamp();
    manifest.inventory(out);
    manifest.save(out);
    return code;
}

int execute_run_file(const fs::path& config_path, const RunOverrides& overrides) {
    RunConfig cfg;
    try {
        cfg = RunConfig::load(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    return execute_run(cfg, overrides);
}

int emit_report(const fs::path& run_dir) {
    RunManifest manifest;
    try {
        manifest = RunManifest::load(run_dir);
    } catch (const std::exception& e) {
        std::cerr << "report: " << e.what() << "\n";
        return kExitConfig;
    }
    bool hashes_ok = true;
    std::ostringstream body;
    body << "run report\n==========\n";
    body << "status: " << manifest.status << "\n";
    body << "code:   " << manifest.code_version << "\n";
    body << "seed:   " << manifest.seed << "  threads: " << manifest.threads << "\n";
    body << "window: " << manifest.started_at << " .. " << manifest.finished_at << "\n\n";

    body << "file inventory\n";
    for (const auto& f : manifest.files) {
        std::string state = "ok";
        const fs::path p = run_dir / f.path;
        if (!fs::exists(p)) {
            state = "MISSING";
            hashes_ok = false;
        } else if (file_hash_hex(p) != f.fnv1a64_hex) {
            state = "HASH MISMATCH";
            hashes_ok = false;
        }
        body << "  " << f.path << "  " << f.bytes << " B  " << f.fnv1a64_hex << "  " << state
             << "\n";
    }
    body << "\n";

    bool verify_ok = true;
    if (fs::exists(run_dir / "verify.json")) {
        std::ifstream is(run_dir / "verify.json");
        const nlohmann::json reports = nlohmann::json::parse(is);
        body << "verification results\n";
        for (const auto& rep : reports) {
            body << "  [" << (rep.at("passed").get<bool>() ? "PASS" : "FAIL") << "] "
                 << rep.at("name").get<std::string>() << "\n";
            if (!rep.at("passed").get<bool>()) verify_ok = false;
            for (const auto& it : rep.at("items")) {
                const std::string v = it.at("verdict");
                if (v == "FAIL")
                    body << "      FAIL " << it.at("check").get<std::string>()
                         << " lhs=" << it.at("lhs").dump() << " rhs=" << it.at("rhs").dump()
                         << "\n";
            }
        }
        body << "\n";
    }

    if (fs::exists(run_dir / "diagnostics.csv")) {
        const DiagnosticsSeries diag = read_diagnostics_csv(run_dir / "diagnostics.csv");
        // norm-vs-time extract for plotting
        std::ofstream ns(run_dir / "report_norms.csv");
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < diag.columns.size(); ++i) {
            const std::string& n = diag.columns[i].name;
            if (n == "t" || n.rfind("rho_L", 0) == 0 || n.rfind("f_L", 0) == 0 || n == "sup_S" ||
                n == "mass" || n == "J")
                keep.push_back(i);
        }
        for (std::size_t k = 0; k < keep.size(); ++k)
            ns << (k ? "," : "") << diag.columns[keep[k]].name;
        ns << "\n";
        for (const auto& row : diag.rows) {
            for (std::size_t k = 0; k < keep.size(); ++k) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", row[keep[k]]);
                ns << (k ? "," : "") << buf;
            }
            ns << "\n";
        }
        const auto mass = diag.column("mass");
        double drift = 0;
        for (double m : mass) drift = std::max(drift, std::abs(m - mass.front()));
        body << "mass drift: " << (mass.front() != 0 ? drift / std::abs(mass.front()) : drift)
             << " (relative)\n";
    }

    std::ofstream os(run_dir / "report.txt");
    os << body.str();
    std::cout << body.str();
    if (!hashes_ok) {
        std::cerr << "report: inventory hash mismatch flagged\n";
        return kExitVerification;
    }
    return verify_ok ? kExitOk : kExitVerification;
}

}  // namespace kinchem
