// Run configuration: JSON on disk, validated exhaustively (every problem
// listed, not first-failure), serialized back verbatim into run metadata.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kinchem/internal.hpp"
#include "kinchem/kernels.hpp"
#include "kinchem/particles.hpp"

namespace kinchem {

struct ConfigError : std::runtime_error {
    std::vector<std::string> problems;
    explicit ConfigError(std::vector<std::string> p);
};

struct VerifyCheckConfig {
    std::string name;       // dispersion | symmetrization | elliptic | bessel |
                            // gamma-stirling | series | strichartz | sublinear | moment
    nlohmann::json params;  // check-specific knobs (all have defaults)
};

struct RunConfig {
    std::string mode;  // kinetic | particles | verify

    // grid
    int dim = 2;
    int resolution = 64;
    double extent = 10.0;

    // velocity (kinetic mode)
    int n_v = 16;

    // kernel (kinetic mode)
    KernelSpec kernel = ConstantKernel{1.0};

    // internal model + tumbling (particles mode)
    InternalModel internal = LinearExcAdapt{};
    TumblingRate tumbling;
    std::size_t particle_count = 10000;
    std::string tumble_mode = "bernoulli";  // bernoulli | thinning
    YState y0 = {0.0, 0.0};
    double moment_alpha = 0.5;
    double growth_c = 1.0;

    // initial condition
    ParticleInit initial;  // preset/width/centers shared by both modes
    double total_mass = 1.0;

    // time
    double dt = 0.01;
    double t_end = 1.0;

    // diagnostics
    std::vector<double> track_rho_p = {2.0};
    std::vector<double> track_f_p;
    std::optional<double> track_s_r;
    std::string scattering_mode = "explicit";  // explicit | exponential
    std::size_t snapshot_every = 0;

    std::uint64_t seed = 0;
    int threads = 1;
    std::string output_dir = "run-out";

    std::vector<VerifyCheckConfig> checks;  // verify mode

    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const InternalModel& model);
InternalModel model_from_json(const nlohmann::json& j);

}  // namespace kinchem
