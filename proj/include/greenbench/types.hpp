#ifndef GREENBENCH_TYPES_HPP
#define GREENBENCH_TYPES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "greenbench/errors.hpp"

namespace greenbench {

using json = nlohmann::json;

/// Egress throughput in Gbps (1e9 bits/s). Non-negative.
struct Throughput {
    double gbps = 0.0;

    Throughput() = default;
    explicit Throughput(double value);
};

/// Time-averaged electrical power in watts. Non-negative.
struct AvgPower {
    double watts = 0.0;

    AvgPower() = default;
    explicit AvgPower(double value);
};

/// Load-point weights for variable-load metrics. alpha + beta + epsilon = 1.
///
/// The binding of each weight to a load point depends on the metric:
/// TEEER and ATIS TEER bind them idle-first (alpha at 0%, beta at 50%,
/// epsilon at 100%); EER-VL and EER-EX bind them full-first (alpha at full,
/// beta at reduced, epsilon at idle / second reduced).
struct WeightProfile {
    double alpha = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    /// Fraction of NDR at which the reduced phase runs, in (0,1).
    double reduced_load_fraction = 0.3;

    static constexpr double kSumTolerance = 1e-9;

    WeightProfile() = default;
    WeightProfile(double a, double b, double e, double reduced_fraction = 0.3);
    void validate() const;
};

namespace phase {
inline constexpr const char* full = "full";
inline constexpr const char* reduced = "reduced";
inline constexpr const char* idle = "idle";
inline constexpr const char* probe_reduced = "probe-reduced";
inline constexpr const char* probe_idle = "probe-idle";
std::string state(int id);  // "state-<id>"
}  // namespace phase

/// One observation window on a device under test.
struct MeasurementSample {
    std::string phase;
    double load_fraction = 0.0;  // intended fraction of NDR, in [0,1]
    Throughput offered;
    Throughput delivered;
    AvgPower power;
    double duration_s = 0.0;
    std::uint32_t packet_size_bytes = 0;

    void validate() const;
};

struct Provenance {
    std::string config_hash;
    std::uint64_t device_seed = 0;
    std::uint64_t orchestrator_seed = 0;
    bool warmup_skipped = false;
    std::optional<WeightProfile> weights;
    std::vector<std::uint32_t> packet_sizes;
};

/// Validated output of one test procedure. Invalid sets are data, not
/// errors: they carry the reason and must never feed metric computations.
struct MeasurementSet {
    std::string device;
    std::string procedure;
    std::vector<MeasurementSample> samples;
    Throughput ndr;
    bool valid = true;
    std::optional<std::string> invalidation_reason;
    Provenance provenance;

    void invalidate(const std::string& reason);
    void validate() const;
    const MeasurementSample* find_phase(const std::string& label) const;
    const MeasurementSample& require_phase(const std::string& label) const;
};

enum class MetricKind { ecr, teeer, teer_atis, eer_vl, eer_ex, allowance, weighted_peak };

const char* metric_kind_name(MetricKind kind);
MetricKind metric_kind_from_name(const std::string& name);
const char* metric_units(MetricKind kind);
/// true if larger values rank better for this metric.
bool metric_higher_is_better(MetricKind kind);

struct MetricResult {
    MetricKind kind = MetricKind::ecr;
    double value = 0.0;
    std::string units;
    std::map<std::string, double> inputs;

    static MetricResult make(MetricKind kind, double value, std::map<std::string, double> inputs);
};

/// Per-interface-class power allowances in watts, all positive.
struct AllowanceTable {
    std::map<std::string, double> entries;

    void validate() const;
};

/// Convex-combination weights over packet sizes, sizes strictly increasing.
struct PacketSizeWeights {
    std::vector<std::pair<std::uint32_t, double>> entries;

    void validate() const;
};

// Canonical JSON encodings. Field names are the wire contract; numbers are
// IEEE-754 doubles except packet sizes and state ids, which are integers.
json to_json(const WeightProfile& profile);
WeightProfile weight_profile_from_json(const json& j);
json to_json(const MeasurementSample& sample);
MeasurementSample sample_from_json(const json& j);
json to_json(const MeasurementSet& set);
MeasurementSet measurement_set_from_json(const json& j);
json to_json(const MetricResult& result);
MetricResult metric_result_from_json(const json& j);
json to_json(const Provenance& provenance);
Provenance provenance_from_json(const json& j);

}  // namespace greenbench

#endif
