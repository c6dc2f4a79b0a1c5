#include "kinchem/io.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "kinchem/numerics.hpp"

namespace kinchem {

namespace fs = std::filesystem;

namespace {

void write_bytes(const fs::path& path, const void* data, std::size_t bytes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

std::vector<unsigned char> read_bytes(const fs::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    const auto size = is.tellg();
    is.seekg(0);
    std::vector<unsigned char> buf(static_cast<std::size_t>(size));
    is.read(reinterpret_cast<char*>(buf.data()), size);
    return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << j.dump(2) << "\n";
}

nlohmann::json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return nlohmann::json::parse(is);
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_field_snapshot(const fs::path& dir, const std::string& name, const ScalarField& field,
                          double time, const std::string& quantity) {
    fs::create_directories(dir);
    write_bytes(dir / (name + ".f64"), field.values.data(), field.values.size() * sizeof(double));
    write_json(dir / (name + ".json"), {{"dim", field.grid.dim},
                                        {"N", field.grid.resolution},
                                        {"L", field.grid.extent},
                                        {"time", time},
                                        {"quantity", quantity}});
}

ScalarField read_field_snapshot(const fs::path& dir, const std::string& name) {
    const nlohmann::json meta = read_json(dir / (name + ".json"));
    const PeriodicGrid g = PeriodicGrid::make(meta.at("dim"), meta.at("N"), meta.at("L"));
    ScalarField f = ScalarField::zeros(g);
    const auto bytes = read_bytes(dir / (name + ".f64"));
    if (bytes.size() != f.values.size() * sizeof(double))
        throw std::runtime_error("snapshot size mismatch for " + name);
    std::memcpy(f.values.data(), bytes.data(), bytes.size());
    return f;
}

void write_kinetic_snapshot(const fs::path& dir, const std::string& name,
                            const KineticDensity& f) {
    for (std::size_t j = 0; j < f.vel.size(); ++j) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_v%03zu", j);
        ScalarField slab{f.grid, std::vector<double>(f.slab(j).begin(), f.slab(j).end())};
        write_field_snapshot(dir, name + suffix, slab, f.time, "f");
    }
}

void write_particle_checkpoint(const fs::path& dir, const std::string& name,
                               const ParticleEnsemble& ens) {
    fs::create_directories(dir);
    std::ofstream os(dir / (name + ".bin"), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write checkpoint " + name);
    auto block = [&](const std::vector<double>& v) {
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(double)));
    };
    block(ens.x);
    block(ens.v);
    block(ens.y);
    write_json(dir / (name + ".json"), {{"N_p", ens.count},
                                        {"M", ens.total_mass},
                                        {"seed", ens.seed},
                                        {"step", ens.step},
                                        {"time", ens.time},
                                        {"dim", ens.dim}});
}

ParticleEnsemble read_particle_checkpoint(const fs::path& dir, const std::string& name) {
    const nlohmann::json meta = read_json(dir / (name + ".json"));
    ParticleEnsemble ens;
    ens.count = meta.at("N_p");
    ens.total_mass = meta.at("M");
    ens.seed = meta.at("seed");
    ens.step = meta.at("step");
    ens.time = meta.at("time");
    ens.dim = meta.at("dim");
    const auto bytes = read_bytes(dir / (name + ".bin"));
    const std::size_t nx = ens.count * ens.dim, ny = ens.count * 2;
    if (bytes.size() != (2 * nx + ny) * sizeof(double))
        throw std::runtime_error("checkpoint size mismatch for " + name);
    ens.x.resize(nx);
    ens.v.resize(nx);
    ens.y.resize(ny);
    const double* p = reinterpret_cast<const double*>(bytes.data());
    std::copy(p, p + nx, ens.x.begin());
    std::copy(p + nx, p + 2 * nx, ens.v.begin());
    std::copy(p + 2 * nx, p + 2 * nx + ny, ens.y.begin());
    ens.next_event.assign(ens.count, -1.0);
    ens.draw_count.assign(ens.count, 0);
    return ens;
}

void write_diagnostics_csv(const fs::path& path, const DiagnosticsSeries& diag) {
    fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < diag.columns.size(); ++i)
        os << (i ? "," : "") << diag.columns[i].name;
    os << "\n";
    for (const auto& row : diag.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_g17(row[i]);
        os << "\n";
    }
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : diag.columns)
        cols.push_back({{"name", c.name}, {"unit", c.unit}, {"description", c.description}});
    write_json(path.parent_path() / (path.stem().string() + ".meta.json"),
               {{"columns", cols}});
}

DiagnosticsSeries read_diagnostics_csv(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    DiagnosticsSeries diag;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty diagnostics " + path.string());
    std::stringstream header(line);
    std::string tok;
    while (std::getline(header, tok, ',')) diag.columns.push_back({tok, "", ""});
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, tok, ',')) vals.push_back(std::strtod(tok.c_str(), nullptr));
        diag.rows.push_back(std::move(vals));
    }
    return diag;
}

std::string file_hash_hex(const fs::path& path) {
    const auto bytes = read_bytes(path);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(std::span(bytes.data(), bytes.size())));
    return buf;
}

std::string current_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void RunManifest::inventory(const fs::path& dir) {
    files.clear();
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        files.push_back({fs::relative(p, dir).string(), fs::file_size(p), file_hash_hex(p)});
}

void RunManifest::save(const fs::path& dir) const {
    nlohmann::json inv = nlohmann::json::array();
    for (const auto& f : files)
        inv.push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64_hex}});
    write_json(dir / "manifest.json", {{"config", config_echo},
                                       {"code_version", code_version},
                                       {"status", status},
                                       {"failure_reason", failure_reason},
                                       {"started_at", started_at},
                                       {"finished_at", finished_at},
                                       {"threads", threads},
                                       {"seed", seed},
                                       {"files", inv}});
}

RunManifest RunManifest::load(const fs::path& dir) {
    const nlohmann::json j = read_json(dir / "manifest.json");
    RunManifest m;
    m.config_echo = j.at("config");
    m.code_version = j.at("code_version");
    m.status = j.at("status");
    m.failure_reason = j.value("failure_reason", "");
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    m.threads = j.value("threads", 1);
    m.seed = j.value("seed", 0ull);
    for (const auto& f : j.at("files"))
        m.files.push_back({f.at("path"), f.at("bytes"), f.at("fnv1a64")});
    return m;
}

}  // namespace kinchem
