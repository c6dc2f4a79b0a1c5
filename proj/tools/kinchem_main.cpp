// Command-line front end: simulate | particles | verify | report.
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "kinchem/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kinetic chemotaxis laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_dir;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--threads", threads, "worker threads (recorded in the manifest)");
        cmd->add_option("--out", out_dir, "output directory override");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Eulerian kinetic run");
    add_run_flags(simulate);
    CLI::App* particles = app.add_subcommand("particles", "stochastic particle run");
    add_run_flags(particles);
    CLI::App* verify = app.add_subcommand("verify", "estimate verification suite");
    add_run_flags(verify);
    CLI::App* report = app.add_subcommand("report", "render a run directory");
    report->add_option("run_dir", run_dir, "finished run directory")->required();

    CLI11_PARSE(app, argc, argv);

    using namespace kinchem;
    if (report->parsed()) return emit_report(run_dir);

    RunConfig cfg;
    try {
        cfg = RunConfig::load(config_path);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    const char* expected = simulate->parsed() ? "kinetic" : particles->parsed() ? "particles"
                                                                                : "verify";
    if (cfg.mode != expected) {
        std::cerr << "config mode '" << cfg.mode << "' does not match subcommand (expected "
                  << expected << ")\n";
        return kExitConfig;
    }

    RunOverrides ov;
    for (const auto* opt : {"--seed", "--threads", "--out"}) {
        (void)opt;
    }
    CLI::App* active = simulate->parsed() ? simulate : particles->parsed() ? particles : verify;
    if (active->count("--seed")) ov.seed = seed;
    if (active->count("--threads")) ov.threads = threads;
    if (active->count("--out")) ov.out_dir = out_dir;
    return execute_run(cfg, ov);
}
