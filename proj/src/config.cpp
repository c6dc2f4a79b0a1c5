#include "kinchem/config.hpp"

#include <fstream>
#include <sstream>

namespace kinchem {

ConfigError::ConfigError(std::vector<std::string> p)
    : std::runtime_error([&p] {
          std::ostringstream os;
          os << "configuration invalid (" << p.size() << " problem(s)):";
          for (const auto& s : p) os << "\n  - " << s;
          return os.str();
      }()),
      problems(std::move(p)) {}

nlohmann::json kernel_to_json(const KernelSpec& spec) {
    nlohmann::json j;
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, ConstantKernel>) {
                j = {{"type", "constant"}, {"c0", k.c0}};
            } else if constexpr (std::is_same_v<T, PointwiseLinearKernel>) {
                j = {{"type", "pointwise-linear"}, {"c", k.c}};
            } else if constexpr (std::is_same_v<T, SupPowerKernel>) {
                j = {{"type", "sup-power"}, {"c", k.c}, {"alpha", k.alpha}};
            } else if constexpr (std::is_same_v<T, ExpGrowthKernel>) {
                j = {{"type", "exp-growth"}, {"c", k.c}, {"beta", k.beta}};
            } else if constexpr (std::is_same_v<T, LrPowerKernel>) {
                j = {{"type", "lr-power"},
                     {"c", k.c},
                     {"r", k.r},
                     {"alpha", k.alpha},
                     {"strict", k.strict}};
            } else if constexpr (std::is_same_v<T, DelocalizedKernel>) {
                j = {{"type", "delocalized"}, {"c", k.c},          {"eps", k.eps},
                     {"s_back", k.s_back},    {"grad_back", k.grad_back},
                     {"s_fwd", k.s_fwd},      {"grad_fwd", k.grad_fwd}};
            } else if constexpr (std::is_same_v<T, DirectionalDerivativeKernel>) {
                j = {{"type", "directional-derivative"},
                     {"t0", k.t0},
                     {"psi", k.psi.kind == PsiSpec::Kind::HardStep ? "hard-step" : "smooth-step"},
                     {"steepness", k.psi.steepness}};
            } else {
                j = {{"type", "symmetric"},
                     {"base", k.base},
                     {"s_coeff", k.s_coeff},
                     {"vdiff_coeff", k.vdiff_coeff}};
            }
        },
        spec);
    return j;
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type");
    if (type == "constant") return ConstantKernel{j.value("c0", 1.0)};
    if (type == "pointwise-linear") return PointwiseLinearKernel{j.value("c", 1.0)};
    if (type == "sup-power") return SupPowerKernel{j.value("c", 1.0), j.value("alpha", 1.0)};
    if (type == "exp-growth") return ExpGrowthKernel{j.value("c", 1.0), j.value("beta", 1.0)};
    if (type == "lr-power")
        return LrPowerKernel{j.value("c", 1.0), j.value("r", 6.0), j.value("alpha", 1.0),
                             j.value("strict", true)};
    if (type == "delocalized")
        return DelocalizedKernel{j.value("c", 1.0),          j.value("eps", 0.1),
                                 j.value("s_back", true),    j.value("grad_back", false),
                                 j.value("s_fwd", false),    j.value("grad_fwd", false)};
    if (type == "directional-derivative") {
        PsiSpec psi;
        psi.kind = j.value("psi", std::string("smooth-step")) == "hard-step"
                       ? PsiSpec::Kind::HardStep
                       : PsiSpec::Kind::SmoothStep;
        psi.steepness = j.value("steepness", 20.0);
        return DirectionalDerivativeKernel{j.value("t0", 1.0), psi};
    }
    if (type == "symmetric")
        return SymmetricKernel{j.value("base", 1.0), j.value("s_coeff", 0.0),
                               j.value("vdiff_coeff", 0.0)};
    throw std::invalid_argument("unknown kernel type '" + type + "'");
}

namespace {

nlohmann::json h_to_json(const HSpec& h) {
    if (std::holds_alternative<SaturatingH>(h)) return {{"type", "saturating"}};
    return {{"type", "power-cap"}, {"alpha", std::get<PowerCapH>(h).alpha}};
}

HSpec h_from_json(const nlohmann::json& j) {
    const std::string type = j.value("type", std::string("saturating"));
    if (type == "saturating") return SaturatingH{};
    if (type == "power-cap") return PowerCapH{j.value("alpha", 0.5)};
    throw std::invalid_argument("unknown h spec '" + type + "'");
}

}  // namespace

nlohmann::json model_to_json(const InternalModel& model) {
    nlohmann::json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearExcAdapt>) {
                j = {{"type", "linear"},
                     {"tau_e", m.tau_e},
                     {"tau_a", m.tau_a},
                     {"h", h_to_json(m.h)}};
            } else if constexpr (std::is_same_v<T, AlgebraicExcAdapt>) {
                j = {{"type", "algebraic"}, {"tau_a", m.tau_a}, {"h", h_to_json(m.h)}};
            } else if constexpr (std::is_same_v<T, FhnExcAdapt>) {
                j = {{"type", "fhn"},
                     {"tau_e", m.tau_e},
                     {"tau_a", m.tau_a},
                     {"q", m.q},
                     {"h", h_to_json(m.h)}};
            } else {
                j = {{"type", "growth-boundary"}, {"c", m.c}};
            }
        },
        model);
    return j;
}

InternalModel model_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type");
    if (type == "linear") {
        LinearExcAdapt m;
        m.tau_e = j.value("tau_e", 0.01);
        m.tau_a = j.value("tau_a", 1.0);
        if (j.contains("h")) m.h = h_from_json(j.at("h"));
        return m;
    }
    if (type == "algebraic") {
        AlgebraicExcAdapt m;
        m.tau_a = j.value("tau_a", 1.0);
        if (j.contains("h")) m.h = h_from_json(j.at("h"));
        return m;
    }
    if (type == "fhn") {
        FhnExcAdapt m;
        m.tau_e = j.value("tau_e", 0.01);
        m.tau_a = j.value("tau_a", 1.0);
        if (j.contains("q")) m.q = j.at("q").get<std::array<double, 4>>();
        if (j.contains("h")) m.h = h_from_json(j.at("h"));
        return m;
    }
    if (type == "growth-boundary") return GrowthBoundary{j.value("c", 1.0)};
    throw std::invalid_argument("unknown internal model '" + type + "'");
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    std::vector<std::string> problems;
    RunConfig cfg;
    auto get = [&](const char* key, auto& target, const char* context) {
        try {
            if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
        } catch (const std::exception& e) {
            problems.push_back(std::string(context) + ": " + e.what());
        }
    };

    cfg.mode = j.value("mode", std::string(""));
    if (cfg.mode != "kinetic" && cfg.mode != "particles" && cfg.mode != "verify")
        problems.push_back("mode must be one of kinetic | particles | verify");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        cfg.dim = g.value("dim", 2);
        cfg.resolution = g.value("N", 64);
        cfg.extent = g.value("L", 10.0);
        if (cfg.dim != 2 && cfg.dim != 3) problems.push_back("grid.dim must be 2 or 3");
        if (cfg.resolution < 4 || cfg.resolution % 2 != 0)
            problems.push_back("grid.N must be even and >= 4");
        if (!(cfg.extent > 0)) problems.push_back("grid.L must be > 0");
    } else if (cfg.mode != "verify") {
        problems.push_back("grid section required");
    }

    if (j.contains("velocity")) cfg.n_v = j.at("velocity").value("n_v", 16);
    if (cfg.mode == "kinetic" && cfg.n_v < 2) problems.push_back("velocity.n_v must be >= 2");

    if (j.contains("kernel")) {
        try {
            cfg.kernel = kernel_from_json(j.at("kernel"));
            validate_kernel(cfg.kernel);
        } catch (const std::exception& e) {
            problems.push_back(std::string("kernel: ") + e.what());
        }
    } else if (cfg.mode == "kinetic") {
        problems.push_back("kernel section required in kinetic mode");
    }

    if (j.contains("internal")) {
        try {
            cfg.internal = model_from_json(j.at("internal"));
            validate_model(cfg.internal);
        } catch (const std::exception& e) {
            problems.push_back(std::string("internal: ") + e.what());
        }
    } else if (cfg.mode == "particles") {
        problems.push_back("internal section required in particles mode");
    }

    if (j.contains("tumbling")) {
        const auto& t = j.at("tumbling");
        cfg.tumbling.lambda0 = t.value("lambda0", 1.0);
        cfg.tumbling.lambda1 = t.value("lambda1", 1.0);
        cfg.tumbling.component = t.value("component", 0);
        if (cfg.tumbling.lambda0 < 0 || cfg.tumbling.lambda1 < 0)
            problems.push_back("tumbling rates must be >= 0");
        if (cfg.tumbling.component < 0 || cfg.tumbling.component > 1)
            problems.push_back("tumbling.component must be 0 or 1");
    } else if (cfg.mode == "particles") {
        problems.push_back("tumbling section required in particles mode");
    }

    if (j.contains("particles")) {
        const auto& p = j.at("particles");
        cfg.particle_count = p.value("count", std::size_t(10000));
        cfg.tumble_mode = p.value("tumble_mode", std::string("bernoulli"));
        if (p.contains("y0")) cfg.y0 = p.at("y0").get<YState>();
        cfg.moment_alpha = p.value("moment_alpha", 0.5);
        cfg.growth_c = p.value("growth_c", 1.0);
        if (cfg.particle_count == 0) problems.push_back("particles.count must be > 0");
        if (cfg.tumble_mode != "bernoulli" && cfg.tumble_mode != "thinning")
            problems.push_back("particles.tumble_mode must be bernoulli | thinning");
        if (!(cfg.moment_alpha >= 0 && cfg.moment_alpha < 1))
            problems.push_back("particles.moment_alpha must satisfy 0 <= alpha < 1");
    }

    if (j.contains("initial")) {
        const auto& ic = j.at("initial");
        cfg.initial.preset = ic.value("preset", std::string("gaussian-bump"));
        cfg.initial.width = ic.value("width", 1.0);
        cfg.total_mass = ic.value("mass", 1.0);
        if (ic.contains("center")) {
            const auto c = ic.at("center").get<std::vector<double>>();
            for (std::size_t d = 0; d < c.size() && d < 3; ++d) cfg.initial.center[d] = c[d];
            cfg.initial.centers_set = true;
        }
        if (ic.contains("center2")) {
            const auto c = ic.at("center2").get<std::vector<double>>();
            for (std::size_t d = 0; d < c.size() && d < 3; ++d) cfg.initial.center2[d] = c[d];
        }
        if (cfg.initial.preset != "gaussian-bump" && cfg.initial.preset != "two-bumps" &&
            cfg.initial.preset != "uniform")
            problems.push_back("initial.preset must be gaussian-bump | two-bumps | uniform");
        if (!(cfg.initial.width > 0)) problems.push_back("initial.width must be > 0");
        if (!(cfg.total_mass > 0)) problems.push_back("initial.mass must be > 0");
    } else if (cfg.mode != "verify") {
        problems.push_back("initial section required");
    }
    cfg.initial.y0 = cfg.y0;

    if (j.contains("time")) {
        const auto& t = j.at("time");
        cfg.dt = t.value("dt", 0.01);
        cfg.t_end = t.value("t_end", 1.0);
        if (!(cfg.dt > 0)) problems.push_back("time.dt must be > 0");
        if (!(cfg.t_end >= 0)) problems.push_back("time.t_end must be >= 0");
    } else if (cfg.mode != "verify") {
        problems.push_back("time section required");
    }

    if (j.contains("track_norms")) {
        cfg.track_rho_p.clear();
        for (const auto& e : j.at("track_norms")) {
            if (e.contains("p")) cfg.track_rho_p.push_back(e.at("p"));
            if (e.contains("f_p")) cfg.track_f_p.push_back(e.at("f_p"));
        }
    }
    if (j.contains("track_s_r")) cfg.track_s_r = j.at("track_s_r").get<double>();
    get("scattering_mode", cfg.scattering_mode, "scattering_mode");
    if (cfg.scattering_mode != "explicit" && cfg.scattering_mode != "exponential")
        problems.push_back("scattering_mode must be explicit | exponential");
    get("snapshot_every", cfg.snapshot_every, "snapshot_every");
    get("seed", cfg.seed, "seed");
    get("threads", cfg.threads, "threads");
    if (cfg.threads < 1) problems.push_back("threads must be >= 1");
    cfg.output_dir = j.value("output", std::string("run-out"));

    if (j.contains("checks")) {
        for (const auto& c : j.at("checks")) {
            VerifyCheckConfig vc;
            if (c.is_string()) {
                vc.name = c.get<std::string>();
                vc.params = nlohmann::json::object();
            } else {
                vc.name = c.value("name", std::string(""));
                vc.params = c.value("params", nlohmann::json::object());
            }
            cfg.checks.push_back(std::move(vc));
        }
    }
    if (cfg.mode == "verify" && cfg.checks.empty())
        problems.push_back("verify mode requires a non-empty checks list");

    // Pre-validate stepping constraints before any compute happens.
    if (cfg.mode == "particles" && problems.empty()) {
        const double guard = max_stable_dt(cfg.internal);
        if (cfg.dt > guard * (1.0 + 1e-12)) {
            std::ostringstream os;
            os << "time.dt = " << cfg.dt << " exceeds the internal stiffness guard " << guard;
            problems.push_back(os.str());
        }
    }

    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError({"cannot open config file " + path.string()});
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const std::exception& e) {
        throw ConfigError({std::string("JSON parse error: ") + e.what()});
    }
    return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j;
    j["mode"] = mode;
    j["grid"] = {{"dim", dim}, {"N", resolution}, {"L", extent}};
    j["velocity"] = {{"n_v", n_v}};
    if (mode == "kinetic") j["kernel"] = kernel_to_json(kernel);
    if (mode == "particles") {
        j["internal"] = model_to_json(internal);
        j["tumbling"] = {{"lambda0", tumbling.lambda0},
                         {"lambda1", tumbling.lambda1},
                         {"component", tumbling.component}};
        j["particles"] = {{"count", particle_count},
                          {"tumble_mode", tumble_mode},
                          {"y0", y0},
                          {"moment_alpha", moment_alpha},
                          {"growth_c", growth_c}};
    }
    if (mode != "verify") {
        nlohmann::json ic = {{"preset", initial.preset},
                             {"width", initial.width},
                             {"mass", total_mass}};
        if (initial.centers_set) {
            std::vector<double> c(initial.center.begin(), initial.center.begin() + dim);
            ic["center"] = c;
        }
        j["initial"] = ic;
        j["time"] = {{"dt", dt}, {"t_end", t_end}};
    }
    nlohmann::json norms = nlohmann::json::array();
    for (double p : track_rho_p) norms.push_back({{"p", p}});
    for (double p : track_f_p) norms.push_back({{"f_p", p}});
    j["track_norms"] = norms;
    if (track_s_r) j["track_s_r"] = *track_s_r;
    j["scattering_mode"] = scattering_mode;
    j["snapshot_every"] = snapshot_every;
    j["seed"] = seed;
    j["threads"] = threads;
    j["output"] = output_dir;
    if (mode == "verify") {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& c : checks) cs.push_back({{"name", c.name}, {"params", c.params}});
        j["checks"] = cs;
    }
    return j;
}

}  // namespace kinchem
