#ifndef FRACKPZ_EXPERIMENT_HPP
#define FRACKPZ_EXPERIMENT_HPP

#include "frackpz/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace frackpz {

inline constexpr const char* kCodeVersion = "frackpz 0.1.0";

struct ConstantRecord {
    std::string name;
    double value = 0.0;
    std::string provenance;
};

struct RunManifest {
    std::string config_hash;
    std::string code_version;
    std::string timestamp;
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs; // paths relative to the output directory
    std::vector<ConstantRecord> constants;
};

// Parses and validates the config (fail fast, unknown keys rejected), runs the
// named experiment, writes fields/*.csv + report.json + manifest.json under
// out_dir, and returns the manifest.  Deterministic given config + seed.
RunManifest run_experiment(const std::string& config_json, const std::string& out_dir,
                           std::optional<std::uint64_t> seed_override = std::nullopt);

RunManifest run_experiment_file(const std::string& config_path, const std::string& out_dir,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

// header `x1[,x2],value`, one row per node in index order, 17 significant
// digits
void emit_field_csv(const Field& field, const std::string& path);

// FNV-1a over the canonical dump of the parsed config
std::string config_hash_hex(const std::string& canonical_config);

} // namespace frackpz

#endif
