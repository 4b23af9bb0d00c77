#ifndef GREENBENCH_DEVICE_HPP
#define GREENBENCH_DEVICE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenbench/types.hpp"

namespace greenbench {

/// Piecewise-linear power response over load fraction. Knots are exact:
/// evaluating at a knot load returns the knot's power bit-for-bit.
struct PowerCurve {
    /// (load_fraction, watts) pairs; loads strictly increasing from 0 to 1,
    /// power monotone nondecreasing.
    std::vector<std::pair<double, double>> points;

    void validate() const;
    double power_at(double load_fraction) const;
};

/// One commandable capacity mode. State 0 is full capacity; higher ids
/// deliver strictly less. Entering a higher id costs the target state's
/// enter latency; returning toward id 0 costs the current state's exit
/// latency.
struct PowerState {
    int id = 0;
    double capacity_fraction = 1.0;
    PowerCurve curve;  // power vs. utilization of this state's own capacity
    double enter_latency_s = 0.0;
    double exit_latency_s = 0.0;
};

/// Cold-start power deficit: instantaneous power is scaled by
/// 1 - delta * exp(-t_on / tau_s), approaching steady state from below.
struct WarmupModel {
    double delta = 0.0;
    double tau_s = 1.0;

    double factor(double t_on_s) const;
};

struct CheatWindow {
    double start_s = 0.0;
    double end_s = 0.0;
    int target_state = 0;
};

/// Scripted power-state downshifts a device uses to game low-utilization
/// test phases. The only modeled kind is "scheduled_downshift".
struct CheatBehavior {
    std::string kind = "scheduled_downshift";
    std::vector<CheatWindow> schedule;
};

struct DeviceModel {
    std::string name;
    std::string label;  // optional free-form tag (e.g. model year)
    Throughput line_rate;
    std::map<std::uint32_t, double> ndr_gbps_by_packet_size;
    std::vector<PowerState> states;
    std::optional<WarmupModel> warmup;
    std::optional<CheatBehavior> cheat;
    std::map<std::string, std::uint32_t> interfaces;  // optional, for allowance checks
    std::uint64_t seed = 0;
    double step_s = 0.1;

    void validate() const;
    static DeviceModel from_json(const json& j);
    static DeviceModel load_file(const std::filesystem::path& path);
    json to_json() const;

    std::uint32_t largest_packet_size() const;
};

/// Raw accumulators for one constant-offered-load window, kept so callers
/// can merge windows without reintroducing rounding.
struct LoadRunStats {
    double power_sum_w = 0.0;      // sum of per-step instantaneous power
    double delivered_sum_gbps = 0.0;
    std::uint64_t steps = 0;
    double step_s = 0.0;

    double duration_s() const { return static_cast<double>(steps) * step_s; }
    double avg_power_w() const { return steps ? power_sum_w / static_cast<double>(steps) : 0.0; }
    double avg_delivered_gbps() const {
        return steps ? delivered_sum_gbps / static_cast<double>(steps) : 0.0;
    }
    void merge(const LoadRunStats& other);
};

/// Deterministic simulated device under test. Fixed-step clock; exclusive
/// access required while stepping. Distinct instances share nothing.
class Device {
public:
    explicit Device(DeviceModel model);

    const DeviceModel& model() const { return model_; }
    double now() const { return now_; }
    double step_s() const { return model_.step_s; }

    /// NDR for a configured packet size. Unknown sizes are an error: NDR
    /// is strongly non-linear in packet size, so no interpolation.
    Throughput ndr(std::uint32_t packet_size_bytes) const;

    /// Capacity-limiting state right now: during a transition this is the
    /// lower-capacity endpoint, so transitions are never free.
    const PowerState& effective_state() const;
    int effective_state_id() const { return effective_state().id; }
    bool transition_pending() const { return pending_.has_value(); }

    /// Command a state change at the current sim time; returns the time
    /// the transition completes (immediately for a no-op).
    double set_power_state(int state_id);

    /// Power draw at the given load fraction of the effective state's own
    /// capacity, warm-up scaling applied at `at_time`.
    double instantaneous_power(double load_fraction, double at_time) const;

    /// Advance one fixed step, resolving cheat-schedule crossings and
    /// pending transition completions.
    void tick();
    /// Tick until now >= t.
    void advance_to(double t);

    /// Offer a constant load for a whole number of steps and return the
    /// per-step accumulators.
    LoadRunStats run_load(double offered_gbps, std::uint32_t packet_size_bytes, double duration_s);

    /// run_load wrapped into a labeled sample.
    MeasurementSample offer_load(double offered_gbps, std::uint32_t packet_size_bytes,
                                 double duration_s, const std::string& phase_label = phase::full);

    /// Steps per duration, validating it is a positive whole multiple of
    /// the sim step.
    std::uint64_t steps_for(double duration_s) const;

private:
    struct Transition {
        int from_idx;
        int to_idx;
        double complete_time;
    };

    void resolve_events();
    void begin_transition(int target_idx);
    const PowerState& state_at(int idx) const { return model_.states[static_cast<size_t>(idx)]; }
    double warm_factor(double t) const;

    DeviceModel model_;
    std::uint64_t total_steps_ = 0;  // now_ is derived, not accumulated, to avoid drift
    double now_ = 0.0;
    int current_idx_ = 0;
    std::optional<Transition> pending_;
    std::size_t next_cheat_event_ = 0;  // index into flattened (time, target) event list
    std::vector<std::pair<double, int>> cheat_events_;
};

}  // namespace greenbench

#endif
