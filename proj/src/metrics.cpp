#include "greenbench/metrics.hpp"

#include <cmath>

namespace greenbench {

namespace {

void require_positive_throughput(Throughput t, const char* what) {
    if (!(t.gbps > 0.0)) fail(Errc::zero_throughput, std::string(what) + " must be positive");
}

}  // namespace

MetricResult compute_ecr(AvgPower energy, Throughput peak) {
    require_positive_throughput(peak, "peak throughput");
    double value = energy.watts / peak.gbps;
    return MetricResult::make(MetricKind::ecr, value,
                              {{"avg_power_w", energy.watts}, {"peak_gbps", peak.gbps}});
}

MetricResult compute_teeer(AvgPower e_idle, AvgPower e_half, AvgPower e_full, Throughput peak,
                           const WeightProfile& weights) {
    weights.validate();
    require_positive_throughput(peak, "peak throughput");
    double weighted =
        weights.alpha * e_idle.watts + weights.beta * e_half.watts + weights.epsilon * e_full.watts;
    if (!(weighted > 0.0)) fail(Errc::nonpositive_power, "weighted power must be positive");
    double value = -std::log10(weighted / peak.gbps);
    return MetricResult::make(MetricKind::teeer, value,
                              {{"e_idle_w", e_idle.watts},
                               {"e_half_w", e_half.watts},
                               {"e_full_w", e_full.watts},
                               {"peak_gbps", peak.gbps},
                               {"weighted_power_w", weighted}});
}

MetricResult compute_teer_atis(AvgPower e_idle, AvgPower e_half, AvgPower e_full, Throughput peak,
                               const WeightProfile& weights) {
    weights.validate();
    require_positive_throughput(peak, "peak throughput");
    double weighted =
        weights.alpha * e_idle.watts + weights.beta * e_half.watts + weights.epsilon * e_full.watts;
    if (!(weighted > 0.0)) fail(Errc::nonpositive_power, "weighted power must be positive");
    double value = peak.gbps / weighted;
    return MetricResult::make(MetricKind::teer_atis, value,
                              {{"e_idle_w", e_idle.watts},
                               {"e_half_w", e_half.watts},
                               {"e_full_w", e_full.watts},
                               {"peak_gbps", peak.gbps},
                               {"weighted_power_w", weighted}});
}

MetricResult compute_eer_vl(Throughput t_full, Throughput t_reduced, AvgPower e_full,
                            AvgPower e_reduced, AvgPower e_idle, const WeightProfile& weights) {
    weights.validate();
    require_positive_throughput(t_full, "full-load throughput");
    if (t_reduced.gbps > t_full.gbps) {
        fail(Errc::reduced_exceeds_full, "reduced throughput exceeds full-load throughput");
    }
    double numer = weights.alpha * t_full.gbps + weights.beta * t_reduced.gbps;
    double denom = weights.alpha * e_full.watts + weights.beta * e_reduced.watts +
                   weights.epsilon * e_idle.watts;
    if (!(denom > 0.0)) fail(Errc::nonpositive_power, "weighted energy must be positive");
    return MetricResult::make(MetricKind::eer_vl, numer / denom,
                              {{"t_full_gbps", t_full.gbps},
                               {"t_reduced_gbps", t_reduced.gbps},
                               {"e_full_w", e_full.watts},
                               {"e_reduced_w", e_reduced.watts},
                               {"e_idle_w", e_idle.watts}});
}

MetricResult compute_eer_ex(Throughput t_full, Throughput t_r1, Throughput t_r2, AvgPower e_full,
                            AvgPower e_r1, AvgPower e_r2, const WeightProfile& weights) {
    weights.validate();
    require_positive_throughput(t_full, "full-load throughput");
    if (t_r1.gbps > t_full.gbps || t_r2.gbps > t_r1.gbps) {
        fail(Errc::state_order_violation,
             "state throughputs must be ordered t_r2 <= t_r1 <= t_full");
    }
    double numer = weights.alpha * t_full.gbps + weights.beta * t_r1.gbps +
                   weights.epsilon * t_r2.gbps;
    double denom =
        weights.alpha * e_full.watts + weights.beta * e_r1.watts + weights.epsilon * e_r2.watts;
    if (!(denom > 0.0)) fail(Errc::nonpositive_power, "weighted energy must be positive");
    return MetricResult::make(MetricKind::eer_ex, numer / denom,
                              {{"t_full_gbps", t_full.gbps},
                               {"t_r1_gbps", t_r1.gbps},
                               {"t_r2_gbps", t_r2.gbps},
                               {"e_full_w", e_full.watts},
                               {"e_r1_w", e_r1.watts},
                               {"e_r2_w", e_r2.watts}});
}

AllowanceVerdict allowance_budget(const std::map<std::string, std::uint32_t>& counts,
                                  const AllowanceTable& table, AvgPower measured) {
    table.validate();
    double ceiling = 0.0;
    for (const auto& [name, count] : counts) {
        auto it = table.entries.find(name);
        if (it == table.entries.end()) {
            fail(Errc::unknown_interface_class, "no allowance for interface class '" + name + "'");
        }
        ceiling += static_cast<double>(count) * it->second;
    }
    AllowanceVerdict verdict;
    verdict.ceiling = AvgPower(ceiling);
    verdict.pass = measured.watts <= ceiling;
    verdict.result = MetricResult::make(
        MetricKind::allowance, ceiling,
        {{"measured_w", measured.watts}, {"pass", verdict.pass ? 1.0 : 0.0}});
    return verdict;
}

MetricResult weighted_peak_throughput(const std::map<std::uint32_t, Throughput>& per_size_ndr,
                                      const PacketSizeWeights& weights) {
    weights.validate();
    double total = 0.0;
    std::map<std::string, double> inputs;
    for (const auto& [size, weight] : weights.entries) {
        auto it = per_size_ndr.find(size);
        if (it == per_size_ndr.end()) {
            fail(Errc::missing_packet_size,
                 "no measured rate for packet size " + std::to_string(size));
        }
        total += weight * it->second.gbps;
        inputs["ndr_" + std::to_string(size)] = it->second.gbps;
        inputs["w_" + std::to_string(size)] = weight;
    }
    return MetricResult::make(MetricKind::weighted_peak, total, std::move(inputs));
}

}  // namespace greenbench
