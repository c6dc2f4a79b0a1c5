#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kinchem/config.hpp"
#include "kinchem/io.hpp"
#include "kinchem/runner.hpp"

using namespace kinchem;
namespace fs = std::filesystem;

namespace {

const char* kKineticConfig = R"({
  "mode": "kinetic",
  "grid": {"dim": 2, "N": 16, "L": 10.0},
  "velocity": {"n_v": 8},
  "kernel": {"type": "constant", "c0": 0.0},
  "initial": {"preset": "gaussian-bump", "width": 1.0, "mass": 1.0},
  "time": {"dt": 0.05, "t_end": 0.5},
  "track_norms": [{"p": 2.0}],
  "seed": 7,
  "output": "OUT"
})";

const char* kParticlesConfig = R"({
  "mode": "particles",
  "grid": {"dim": 2, "N": 16, "L": 10.0},
  "internal": {"type": "linear", "tau_e": 0.05, "tau_a": 1.0},
  "tumbling": {"lambda0": 1.0, "lambda1": 0.5, "component": 0},
  "particles": {"count": 2000, "y0": [0.0, 0.0]},
  "initial": {"preset": "gaussian-bump", "width": 1.0, "mass": 1.0},
  "time": {"dt": 0.005, "t_end": 0.1},
  "seed": 11,
  "output": "OUT"
})";

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("kinchem_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig parse_with_out(const char* text, const fs::path& out) {
    nlohmann::json j = nlohmann::json::parse(text);
    j["output"] = out.string();
    return RunConfig::from_json(j);
}

}  // namespace

TEST_CASE("config round-trip is a fixed point") {
    for (const char* text : {kKineticConfig, kParticlesConfig}) {
        const RunConfig a = RunConfig::from_json(nlohmann::json::parse(text));
        const nlohmann::json ja = a.to_json();
        const RunConfig b = RunConfig::from_json(ja);
        CHECK(ja == b.to_json());
    }
}

TEST_CASE("config validation reports every problem at once") {
    nlohmann::json j = nlohmann::json::parse(kKineticConfig);
    j["mode"] = "bogus";
    j["grid"]["N"] = 7;
    j["time"]["dt"] = -1.0;
    try {
        RunConfig::from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems.size() >= 3);
    }
}

TEST_CASE("config: missing mode-required sections are flagged") {
    nlohmann::json j = nlohmann::json::parse(kParticlesConfig);
    j.erase("internal");
    j.erase("tumbling");
    try {
        RunConfig::from_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems.size() == 2);
    }
}

TEST_CASE("config: stiffness guard pre-validated before any stepping") {
    nlohmann::json j = nlohmann::json::parse(kParticlesConfig);
    j["time"]["dt"] = 0.02;  // > tau_e / 10 = 0.005
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
}

TEST_CASE("kinetic mode run: exit 0, constant mass column, manifest inventory") {
    const fs::path out = temp_dir("kinetic");
    const RunConfig cfg = parse_with_out(kKineticConfig, out);
    CHECK(execute_run(cfg) == kExitOk);
    const DiagnosticsSeries diag = read_diagnostics_csv(out / "diagnostics.csv");
    const auto mass = diag.column("mass");
    for (double m : mass) CHECK(m == doctest::Approx(mass.front()).epsilon(1e-12));

    const RunManifest man = RunManifest::load(out);
    CHECK(man.status == "COMPLETED");
    CHECK(!man.files.empty());
    bool has_diag = false;
    for (const auto& f : man.files)
        if (f.path == "diagnostics.csv") has_diag = true;
    CHECK(has_diag);
    fs::remove_all(out);
}

TEST_CASE("determinism: same config and seed give byte-identical diagnostics") {
    const fs::path out1 = temp_dir("det1");
    const fs::path out2 = temp_dir("det2");
    const RunConfig c1 = parse_with_out(kParticlesConfig, out1);
    const RunConfig c2 = parse_with_out(kParticlesConfig, out2);
    CHECK(execute_run(c1) == kExitOk);
    CHECK(execute_run(c2) == kExitOk);
    std::ifstream f1(out1 / "diagnostics.csv"), f2(out2 / "diagnostics.csv");
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
    CHECK(!s1.empty());
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("verify mode writes one report entry per requested check") {
    const fs::path out = temp_dir("verify");
    RunConfig cfg;
    cfg.mode = "verify";
    cfg.seed = 3;
    cfg.output_dir = out.string();
    cfg.checks = {{"strichartz", nlohmann::json::object()},
                  {"gamma-stirling", nlohmann::json::object()},
                  {"series", {{"M_grid", {0.5}}, {"mu_grid", {3.0}}, {"j_max", 4000}}}};
    CHECK(execute_run(cfg) == kExitOk);
    std::ifstream is(out / "verify.json");
    const nlohmann::json reports = nlohmann::json::parse(is);
    CHECK(reports.size() == 3);
    for (const auto& rep : reports) CHECK(rep.at("passed").get<bool>());
    CHECK(fs::exists(out / "ratios.csv"));
    CHECK(fs::exists(out / "series_ratios.csv"));
    fs::remove_all(out);
}

TEST_CASE("report: renders summary and flags tampered snapshots") {
    const fs::path out = temp_dir("report");
    const RunConfig cfg = parse_with_out(kKineticConfig, out);
    REQUIRE(execute_run(cfg) == kExitOk);
    CHECK(emit_report(out) == kExitOk);
    CHECK(fs::exists(out / "report.txt"));
    CHECK(fs::exists(out / "report_norms.csv"));

    // tamper with a listed artifact: the next report must flag it
    std::ofstream tamper(out / "rho_final.f64", std::ios::app | std::ios::binary);
    tamper << "x";
    tamper.close();
    CHECK(emit_report(out) == kExitVerification);
    fs::remove_all(out);
}

TEST_CASE("report pipeline: symmetric-kernel run yields a monotone norm column") {
    const fs::path out = temp_dir("pipeline");
    nlohmann::json j = nlohmann::json::parse(kKineticConfig);
    j["kernel"] = {{"type", "symmetric"}, {"base", 0.5}, {"s_coeff", 0.5}, {"vdiff_coeff", 0.5}};
    j["velocity"] = {{"n_v", 8}};
    j["time"] = {{"dt", 0.02}, {"t_end", 1.0}};
    j["track_norms"] = {{{"p", 2.0}}, {{"f_p", 2.0}}};
    j["output"] = out.string();
    RunConfig cfg = RunConfig::from_json(j);
    // perturbing presets are uniform in v, so seed the anisotropy via two bumps
    cfg.initial.preset = "two-bumps";
    REQUIRE(execute_run(cfg) == kExitOk);
    REQUIRE(emit_report(out) == kExitOk);
    const DiagnosticsSeries norms = read_diagnostics_csv(out / "report_norms.csv");
    const auto f2 = norms.column("f_L2");
    for (std::size_t i = 1; i < f2.size(); ++i) CHECK(f2[i] <= f2[i - 1] + 1e-10);
    fs::remove_all(out);
}

TEST_CASE("unknown verify check is a config error at run time") {
    const fs::path out = temp_dir("badcheck");
    RunConfig cfg;
    cfg.mode = "verify";
    cfg.output_dir = out.string();
    cfg.checks = {{"nonsense", nlohmann::json::object()}};
    CHECK(execute_run(cfg) != kExitOk);
    fs::remove_all(out);
}

TEST_CASE("particle checkpoint round-trips") {
    const PeriodicGrid g = PeriodicGrid::make(2, 16, 10.0);
    ParticleInit init;
    init.y0 = {0.2, -0.1};
    const ParticleEnsemble ens = make_ensemble(g, 100, 2.0, 5, init);
    const fs::path out = temp_dir("ckpt");
    write_particle_checkpoint(out, "ens", ens);
    const ParticleEnsemble back = read_particle_checkpoint(out, "ens");
    CHECK(back.count == ens.count);
    CHECK(back.total_mass == ens.total_mass);
    CHECK(back.x == ens.x);
    CHECK(back.v == ens.v);
    CHECK(back.y == ens.y);
    fs::remove_all(out);
}

TEST_CASE("field snapshot round-trips bit-exactly") {
    const PeriodicGrid g = PeriodicGrid::make(2, 8, 4.0);
    ScalarField f = ScalarField::zeros(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::sin(0.1 * i) * 1e-7;
    const fs::path out = temp_dir("snap");
    write_field_snapshot(out, "field", f, 1.25, "rho");
    const ScalarField back = read_field_snapshot(out, "field");
    CHECK(back.values == f.values);
    CHECK(back.grid == f.grid);
    fs::remove_all(out);
}
