// On-disk formats: raw little-endian f64 field snapshots with JSON sidecars,
// columnar particle checkpoints, diagnostics CSV, and the run manifest with
// a hashed file inventory.
#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "kinchem/diagnostics.hpp"
#include "kinchem/fields.hpp"
#include "kinchem/kinetic.hpp"
#include "kinchem/particles.hpp"

namespace kinchem {

// <name>.f64 (row-major doubles) + <name>.json sidecar {dim, N, L, time, quantity}.
void write_field_snapshot(const std::filesystem::path& dir, const std::string& name,
                          const ScalarField& field, double time, const std::string& quantity);
ScalarField read_field_snapshot(const std::filesystem::path& dir, const std::string& name);

// One snapshot file per velocity node: <name>_v###.f64.
void write_kinetic_snapshot(const std::filesystem::path& dir, const std::string& name,
                            const KineticDensity& f);

// Columnar checkpoint: x block, v block, y block (particle-major within each),
// plus sidecar {N_p, M, seed, step, dim}.
void write_particle_checkpoint(const std::filesystem::path& dir, const std::string& name,
                               const ParticleEnsemble& ens);
ParticleEnsemble read_particle_checkpoint(const std::filesystem::path& dir,
                                          const std::string& name);

// Diagnostics CSV (%.17g, reproducible bytes) + .meta.json column annotations.
void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& diag);
DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path);

struct RunManifest {
    nlohmann::json config_echo;
    std::string code_version;
    std::string status = "RUNNING";  // COMPLETED | FAILED
    std::string failure_reason;
    std::string started_at, finished_at;
    int threads = 1;
    std::uint64_t seed = 0;
    struct FileEntry {
        std::string path;  // relative to the run directory
        std::uintmax_t bytes = 0;
        std::string fnv1a64_hex;
    };
    std::vector<FileEntry> files;

    // Hash and append every regular file under dir except the manifest itself.
    void inventory(const std::filesystem::path& dir);
    void save(const std::filesystem::path& dir) const;
    static RunManifest load(const std::filesystem::path& dir);
};

std::string file_hash_hex(const std::filesystem::path& path);
std::string current_timestamp();

}  // namespace kinchem
