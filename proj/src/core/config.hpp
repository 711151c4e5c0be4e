#pragma once

#include "core/estimate.hpp"
#include "core/identifiability.hpp"
#include "core/recovery.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace odeident {

/// A validated experiment description: one system, one task, output options.
/// The raw (canonicalized) JSON is kept for digesting and echoing.
struct ExperimentConfig {
    std::string name;
    nlohmann::json raw;

    std::optional<LatentDagSystem> dag;
    std::optional<LatentDriverSystem> driver;
    std::optional<Matrix> a_unidentifiable;  // alternative A for the unidentifiable arm

    std::string task_type;  // check | simulate | intervene | estimate | reproduce
    nlohmann::json task;    // task parameters (validated lazily per task)

    std::string out_dir = "out";
    std::string format = "csv";

    bool is_dag() const { return dag.has_value(); }
    int d() const { return dag ? dag->d() : driver->d(); }
    int p() const { return dag ? dag->p() : driver->p(); }
};

struct ResultRecord {
    std::string config_digest;
    std::string config_name;
    std::string task_type;
    nlohmann::json outputs;
    std::string tool_version;
    std::string timestamp;
};

/// Parse + validate a config json; dimension problems are reported with the
/// offending field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Flag-style overrides applied on top of a parsed config:
/// task_type, seed, reps, tolerance, out_dir, format.
struct ConfigOverrides {
    std::optional<std::string> task_type;
    std::optional<std::uint64_t> seed;
    std::optional<int> reps;
    std::optional<double> tolerance;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
};
void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& overrides);

/// Dispatch to the checking / simulation / estimation machinery.
/// Deterministic given the config (and its seed).
ResultRecord run_task(const ExperimentConfig& cfg);

/// Write result.json plus the task's CSV views into out_dir (atomically);
/// returns the paths written.
std::vector<std::string> emit_results(const ResultRecord& record, const std::string& format,
                                      const std::string& out_dir);

/// Stable 64-bit FNV-1a digest of the canonicalized config.
std::string config_digest(const nlohmann::json& j);

nlohmann::json report_to_json(const IdentifiabilityReport& report);

}  // namespace odeident
