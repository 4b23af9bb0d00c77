#ifndef GREENBENCH_ORCHESTRATOR_HPP
#define GREENBENCH_ORCHESTRATOR_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "greenbench/device.hpp"
#include "greenbench/metrics.hpp"
#include "greenbench/types.hpp"

namespace greenbench {

struct NdrSearchConfig {
    std::uint32_t packet_size_bytes = 0;
    double resolution = 0.001;      // fraction of line rate
    double loss_tolerance = 0.0;    // strict non-drop by default
    double trial_duration_s = 10.0;

    void validate() const;
};

struct ProbeConfig {
    bool enabled = true;
    double response_window_s = 1.0;
    double throughput_tolerance = 0.01;

    void validate() const;
};

struct VlTestPlan {
    WeightProfile weights;
    double phase_duration_s = 30.0;
    ProbeConfig probe;
    bool warmup_required = true;
    std::uint32_t packet_size_bytes = 0;

    void validate() const;
};

struct ExPhase {
    int state_id = 0;
    double duration_s = 30.0;
    double load_fraction_of_state_capacity = 1.0;
};

struct ExTestPlan {
    WeightProfile weights;
    std::vector<ExPhase> schedule;  // exactly three phases, state ids increasing from 0
    std::uint32_t packet_size_bytes = 0;

    void validate() const;
};

struct WarmupConfig {
    std::uint32_t packet_size_bytes = 0;
    int window_samples = 30;
    double stability_tol = 0.005;
    double timeout_s = 3600.0;
    double sample_interval_s = 1.0;

    void validate() const;
};

struct PeakEntry {
    std::uint32_t packet_size_bytes = 0;
    Throughput ndr;
    AvgPower power;
    MetricResult ecr;
};

struct PeakSuiteResult {
    std::vector<PeakEntry> per_size;
    MetricResult weighted_peak;
    MeasurementSet set;
};

/// Runs the test procedures against a device it owns exclusively for the
/// duration of each call. Holds no mutable state beyond its seed; probe
/// timing is drawn from this seed, never from the device's.
class Orchestrator {
public:
    explicit Orchestrator(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Run the device at full load until the relative range of power over
    /// the last window_samples readings drops below stability_tol.
    void warmup_until_stable(Device& device, const WarmupConfig& cfg) const;

    /// Bisection over offered load for the highest rate forwarded within
    /// the loss tolerance. Ties at bracket collapse resolve to the lower,
    /// passing bound.
    Throughput find_ndr(Device& device, const NdrSearchConfig& cfg) const;

    /// Sustained run at exactly `ndr`; average power over the window.
    /// Loss beyond `loss_tolerance` means the NDR was stale.
    AvgPower measure_peak_energy(Device& device, Throughput ndr, std::uint32_t packet_size_bytes,
                                 double duration_s, double loss_tolerance = 0.01) const;

    /// Full / reduced / idle phases with optional seeded return-to-full
    /// probes in the non-full phases. A failed probe invalidates the set
    /// (data, not an error). Probe windows are excluded from phase
    /// averages so the recorded points are the clean reference loads.
    MeasurementSet run_variable_load_test(Device& device, Throughput ndr,
                                          const VlTestPlan& plan) const;

    /// Three commanded power states at state-relative load; transition
    /// intervals excluded from phase averages. No zero-utilization phase.
    MeasurementSet run_extended_idle_test(Device& device, Throughput ndr,
                                          const ExTestPlan& plan) const;

    /// find_ndr + measure_peak_energy per packet size, plus the weighted
    /// peak view.
    PeakSuiteResult run_peak_suite(Device& device, const std::vector<std::uint32_t>& packet_sizes,
                                   const PacketSizeWeights& weights, const NdrSearchConfig& base_cfg,
                                   double peak_duration_s) const;

private:
    std::uint64_t seed_;
};

/// Reason string recorded when a return-to-full-capacity probe fails.
inline constexpr const char* kProbeViolationReason = "return-to-full-capacity violation";

}  // namespace greenbench

#endif
