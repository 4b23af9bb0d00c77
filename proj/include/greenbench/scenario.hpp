#ifndef GREENBENCH_SCENARIO_HPP
#define GREENBENCH_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "greenbench/device.hpp"
#include "greenbench/orchestrator.hpp"
#include "greenbench/report.hpp"
#include "greenbench/types.hpp"

namespace greenbench {

enum class Procedure { peak, variable_load, extended_idle, full_suite };

const char* procedure_name(Procedure p);
Procedure procedure_from_name(const std::string& name);

/// A parsed scenario file: which device, which procedure, seeds, and the
/// per-procedure parameters (kept as JSON until the procedure runs).
struct Scenario {
    std::filesystem::path source_path;
    std::filesystem::path device_path;  // resolved
    Procedure procedure = Procedure::peak;
    std::uint64_t orchestrator_seed = 0;
    std::optional<std::uint64_t> device_seed_override;
    json parameters;
    std::string config_hash;  // FNV-1a64 of the canonical scenario, seed overrides applied

    static Scenario load_file(const std::filesystem::path& path,
                              std::optional<std::uint64_t> seed_override = std::nullopt);
};

/// Device paths resolve in order: absolute, relative to the scenario file,
/// then relative to $GREENBENCH_FIXTURES (both as-is and under devices/).
std::filesystem::path resolve_device_path(const std::string& device_field,
                                          const std::filesystem::path& scenario_dir);

struct RunOutcome {
    bool valid = true;
    std::vector<std::string> invalid_reasons;
    std::vector<MeasurementSet> sets;
    DeviceReport report;
    std::vector<std::filesystem::path> measurement_files;
    std::filesystem::path report_file;
};

/// Execute a scenario and write its measurement sets and device report to
/// out_dir as <device>_<procedure>_<confighash>.json (atomic writes).
RunOutcome run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);
RunOutcome run_scenario_file(const std::filesystem::path& scenario_path,
                             const std::filesystem::path& out_dir,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

/// Compute one metric from a measurement file produced by run_scenario.
/// Refuses invalidated sets (Errc::invalid_measurement_set). Weights
/// default to the profile recorded in the file's provenance.
MetricResult metric_from_measurement(const MeasurementSet& set, MetricKind kind,
                                     const std::optional<WeightProfile>& weights_override);

/// Schema-validate a device, scenario, measurement, or report file.
/// Returns one message per violated field; empty means valid.
std::vector<std::string> validate_file(const std::filesystem::path& path);

}  // namespace greenbench

#endif
