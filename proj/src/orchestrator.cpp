#include "greenbench/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace greenbench {

namespace {

// Top 53 bits of the engine output; identical across platforms.
double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

Provenance base_provenance(const Device& device, std::uint64_t orchestrator_seed) {
    Provenance p;
    p.device_seed = device.model().seed;
    p.orchestrator_seed = orchestrator_seed;
    return p;
}

}  // namespace

void NdrSearchConfig::validate() const {
    if (packet_size_bytes == 0) fail(Errc::validation, "NDR search needs a packet size");
    if (!(resolution > 0.0 && resolution < 1.0)) {
        fail(Errc::validation, "search resolution must lie in (0, 1)");
    }
    if (!(loss_tolerance >= 0.0 && loss_tolerance < 1.0)) {
        fail(Errc::validation, "loss tolerance must lie in [0, 1)");
    }
    if (!(trial_duration_s > 0.0)) fail(Errc::validation, "trial duration must be positive");
}

void ProbeConfig::validate() const {
    if (!(response_window_s > 0.0)) fail(Errc::validation, "probe window must be positive");
    if (!(throughput_tolerance > 0.0 && throughput_tolerance < 1.0)) {
        fail(Errc::validation, "probe tolerance must lie in (0, 1)");
    }
}

void VlTestPlan::validate() const {
    weights.validate();
    if (!(phase_duration_s > 0.0)) fail(Errc::validation, "phase duration must be positive");
    if (packet_size_bytes == 0) fail(Errc::validation, "variable-load test needs a packet size");
    probe.validate();
    if (probe.enabled && probe.response_window_s >= phase_duration_s) {
        fail(Errc::validation, "probe window must fit inside a phase");
    }
}

void ExTestPlan::validate() const {
    weights.validate();
    if (schedule.size() != 3) fail(Errc::validation, "extended-idle schedule needs three phases");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const ExPhase& ph = schedule[i];
        if (ph.state_id != static_cast<int>(i)) {
            fail(Errc::validation, "extended-idle phases must walk states 0, 1, 2");
        }
        if (!(ph.duration_s > 0.0)) fail(Errc::validation, "phase duration must be positive");
        if (!(ph.load_fraction_of_state_capacity >= 0.0 &&
              ph.load_fraction_of_state_capacity <= 1.0)) {
            fail(Errc::validation, "phase load fraction must lie in [0, 1]");
        }
    }
    if (packet_size_bytes == 0) fail(Errc::validation, "extended-idle test needs a packet size");
}

void WarmupConfig::validate() const {
    if (packet_size_bytes == 0) fail(Errc::validation, "warm-up needs a packet size");
    if (window_samples < 2) fail(Errc::validation, "stability window needs at least two samples");
    if (!(stability_tol > 0.0)) fail(Errc::validation, "stability tolerance must be positive");
    if (!(timeout_s > 0.0)) fail(Errc::validation, "warm-up timeout must be positive");
    if (!(sample_interval_s > 0.0)) fail(Errc::validation, "sample interval must be positive");
}

void Orchestrator::warmup_until_stable(Device& device, const WarmupConfig& cfg) const {
    cfg.validate();
    Throughput peak = device.ndr(cfg.packet_size_bytes);
    double t0 = device.now();
    std::deque<double> window;
    for (;;) {
        LoadRunStats chunk =
            device.run_load(peak.gbps, cfg.packet_size_bytes, cfg.sample_interval_s);
        window.push_back(chunk.avg_power_w());
        if (window.size() > static_cast<std::size_t>(cfg.window_samples)) window.pop_front();
        if (window.size() == static_cast<std::size_t>(cfg.window_samples)) {
            auto [mn, mx] = std::minmax_element(window.begin(), window.end());
            double mean = 0.0;
            for (double v : window) mean += v;
            mean /= static_cast<double>(window.size());
            double range = mean > 0.0 ? (*mx - *mn) / mean : 0.0;
            if (range < cfg.stability_tol) return;
        }
        if (device.now() - t0 >= cfg.timeout_s) {
            fail(Errc::warmup_timeout, "power did not stabilize within " +
                                           std::to_string(cfg.timeout_s) + " s");
        }
    }
}

Throughput Orchestrator::find_ndr(Device& device, const NdrSearchConfig& cfg) const {
    cfg.validate();
    double line_rate = device.model().line_rate.gbps;
    double res_abs = cfg.resolution * line_rate;

    auto passes = [&](double rate) {
        LoadRunStats stats = device.run_load(rate, cfg.packet_size_bytes, cfg.trial_duration_s);
        double loss = rate > 0.0 ? (rate - stats.avg_delivered_gbps()) / rate : 0.0;
        return loss <= cfg.loss_tolerance + 1e-12;
    };

    if (!passes(res_abs)) {
        fail(Errc::no_passing_rate, "device forwards nothing even at the minimum search rate");
    }
    if (passes(line_rate)) return Throughput(line_rate);

    double lo = res_abs;   // known passing
    double hi = line_rate;  // known failing
    int guard = 0;
    while (hi - lo >= res_abs && guard++ < 200) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (passes(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return Throughput(lo);
}

namespace {

LoadRunStats peak_window(Device& device, Throughput ndr, std::uint32_t packet_size_bytes,
                         double duration_s, double loss_tolerance) {
    if (!(ndr.gbps > 0.0)) fail(Errc::zero_throughput, "peak rate must be positive");
    LoadRunStats stats = device.run_load(ndr.gbps, packet_size_bytes, duration_s);
    double loss = (ndr.gbps - stats.avg_delivered_gbps()) / ndr.gbps;
    if (loss > loss_tolerance + 1e-12) {
        fail(Errc::unexpected_loss, "device dropped " + std::to_string(loss * 100.0) +
                                        "% at its declared peak rate");
    }
    return stats;
}

}  // namespace

AvgPower Orchestrator::measure_peak_energy(Device& device, Throughput ndr,
                                           std::uint32_t packet_size_bytes, double duration_s,
                                           double loss_tolerance) const {
    return AvgPower(
        peak_window(device, ndr, packet_size_bytes, duration_s, loss_tolerance).avg_power_w());
}

MeasurementSet Orchestrator::run_variable_load_test(Device& device, Throughput ndr,
                                                    const VlTestPlan& plan) const {
    plan.validate();
    if (!(ndr.gbps > 0.0)) fail(Errc::zero_throughput, "variable-load test needs a peak rate");

    std::mt19937_64 eng(seed_);
    double step = device.step_s();
    double phase_d = plan.phase_duration_s;

    MeasurementSet set;
    set.device = device.model().name;
    set.procedure = "variable_load";
    set.ndr = ndr;
    set.provenance = base_provenance(device, seed_);
    set.provenance.weights = plan.weights;
    set.provenance.packet_sizes = {plan.packet_size_bytes};
    set.provenance.warmup_skipped = device.model().warmup.has_value() && !plan.warmup_required;

    struct PhaseSpec {
        const char* label;
        const char* probe_label;
        double load_fraction;
        bool probed;
    };
    const PhaseSpec specs[] = {
        {phase::full, nullptr, 1.0, false},
        {phase::reduced, phase::probe_reduced, plan.weights.reduced_load_fraction, true},
        {phase::idle, phase::probe_idle, 0.0, true},
    };

    for (const PhaseSpec& spec : specs) {
        double offered = spec.load_fraction * ndr.gbps;
        bool probed = spec.probed && plan.probe.enabled;
        LoadRunStats stats;
        if (!probed) {
            stats = device.run_load(offered, plan.packet_size_bytes, phase_d);
        } else {
            double w = plan.probe.response_window_s;
            auto phase_steps = static_cast<long long>(device.steps_for(phase_d));
            auto probe_steps = static_cast<long long>(device.steps_for(w));
            // The probe instant is drawn on the step grid so the three
            // windows tile the phase exactly.
            double u = uniform01(eng);
            long long pre_steps = std::llround(u * static_cast<double>(phase_steps - probe_steps));
            pre_steps = std::clamp<long long>(pre_steps, 0, phase_steps - probe_steps);
            long long post_steps = phase_steps - probe_steps - pre_steps;

            if (pre_steps > 0) {
                stats.merge(device.run_load(offered, plan.packet_size_bytes,
                                            static_cast<double>(pre_steps) * step));
            }
            LoadRunStats probe_stats =
                device.run_load(ndr.gbps, plan.packet_size_bytes, static_cast<double>(probe_steps) * step);
            if (post_steps > 0) {
                stats.merge(device.run_load(offered, plan.packet_size_bytes,
                                            static_cast<double>(post_steps) * step));
            }

            MeasurementSample probe_sample;
            probe_sample.phase = spec.probe_label;
            probe_sample.load_fraction = 1.0;
            probe_sample.offered = ndr;
            probe_sample.delivered =
                Throughput(std::min(probe_stats.avg_delivered_gbps(), ndr.gbps));
            probe_sample.power = AvgPower(probe_stats.avg_power_w());
            probe_sample.duration_s = probe_stats.duration_s();
            probe_sample.packet_size_bytes = plan.packet_size_bytes;
            set.samples.push_back(probe_sample);

            double floor_gbps = (1.0 - plan.probe.throughput_tolerance) * ndr.gbps;
            if (probe_stats.avg_delivered_gbps() < floor_gbps && set.valid) {
                set.invalidate(kProbeViolationReason);
            }
        }

        MeasurementSample s;
        s.phase = spec.label;
        s.load_fraction = spec.load_fraction;
        s.offered = Throughput(offered);
        s.delivered = Throughput(std::min(stats.avg_delivered_gbps(), offered));
        s.power = AvgPower(stats.avg_power_w());
        s.duration_s = stats.duration_s();
        s.packet_size_bytes = plan.packet_size_bytes;
        set.samples.push_back(s);
    }

    set.validate();
    return set;
}

MeasurementSet Orchestrator::run_extended_idle_test(Device& device, Throughput ndr,
                                                    const ExTestPlan& plan) const {
    plan.validate();
    if (!(ndr.gbps > 0.0)) fail(Errc::zero_throughput, "extended-idle test needs a peak rate");

    MeasurementSet set;
    set.device = device.model().name;
    set.procedure = "extended_idle";
    set.ndr = ndr;
    set.provenance = base_provenance(device, seed_);
    set.provenance.weights = plan.weights;
    set.provenance.packet_sizes = {plan.packet_size_bytes};

    for (const ExPhase& ph : plan.schedule) {
        const PowerState* target = nullptr;
        for (const PowerState& st : device.model().states) {
            if (st.id == ph.state_id) target = &st;
        }
        if (!target) {
            fail(Errc::unknown_state, "device '" + device.model().name + "' has no state " +
                                          std::to_string(ph.state_id));
        }
        double offered = ph.load_fraction_of_state_capacity * target->capacity_fraction * ndr.gbps;
        double complete = device.set_power_state(ph.state_id);
        if (complete > device.now()) {
            // Transition window: the device still carries the phase load,
            // but the readings stay out of the phase average.
            (void)device.run_load(offered, plan.packet_size_bytes, complete - device.now());
        }
        LoadRunStats stats = device.run_load(offered, plan.packet_size_bytes, ph.duration_s);

        MeasurementSample s;
        s.phase = phase::state(ph.state_id);
        s.load_fraction = ph.load_fraction_of_state_capacity * target->capacity_fraction;
        s.offered = Throughput(offered);
        s.delivered = Throughput(std::min(stats.avg_delivered_gbps(), offered));
        s.power = AvgPower(stats.avg_power_w());
        s.duration_s = stats.duration_s();
        s.packet_size_bytes = plan.packet_size_bytes;
        set.samples.push_back(s);
    }

    device.set_power_state(0);
    set.validate();
    return set;
}

PeakSuiteResult Orchestrator::run_peak_suite(Device& device,
                                             const std::vector<std::uint32_t>& packet_sizes,
                                             const PacketSizeWeights& weights,
                                             const NdrSearchConfig& base_cfg,
                                             double peak_duration_s) const {
    if (packet_sizes.empty()) fail(Errc::validation, "peak suite needs at least one packet size");
    weights.validate();

    PeakSuiteResult result;
    result.set.device = device.model().name;
    result.set.procedure = "peak";
    result.set.provenance = base_provenance(device, seed_);
    result.set.provenance.packet_sizes = packet_sizes;

    std::map<std::uint32_t, Throughput> per_size;
    for (std::uint32_t ps : packet_sizes) {
        NdrSearchConfig cfg = base_cfg;
        cfg.packet_size_bytes = ps;
        Throughput found = find_ndr(device, cfg);
        LoadRunStats stats = peak_window(device, found, ps, peak_duration_s, 0.01);
        AvgPower power(stats.avg_power_w());

        PeakEntry entry;
        entry.packet_size_bytes = ps;
        entry.ndr = found;
        entry.power = power;
        entry.ecr = compute_ecr(power, found);
        result.per_size.push_back(entry);
        per_size[ps] = found;

        MeasurementSample s;
        s.phase = "peak-" + std::to_string(ps);
        s.load_fraction = 1.0;
        s.offered = found;
        s.delivered = Throughput(std::min(stats.avg_delivered_gbps(), found.gbps));
        s.power = power;
        s.duration_s = stats.duration_s();
        s.packet_size_bytes = ps;
        result.set.samples.push_back(s);

        if (ps == *std::max_element(packet_sizes.begin(), packet_sizes.end())) {
            result.set.ndr = found;
        }
    }
    result.weighted_peak = weighted_peak_throughput(per_size, weights);
    result.set.validate();
    return result;
}

}  // namespace greenbench
