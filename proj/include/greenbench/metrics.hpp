#ifndef GREENBENCH_METRICS_HPP
#define GREENBENCH_METRICS_HPP

#include <cstdint>
#include <map>

#include "greenbench/types.hpp"

namespace greenbench {

// Pure, deterministic metric formulas over validated scalar measurements.
// Identical inputs produce bit-identical outputs; none of these touch
// global state. Degenerate inputs (zero throughput, non-positive weighted
// power) raise errors instead of returning infinities.

/// Peak efficiency: watts consumed per Gbps forwarded at sustained peak
/// load. Lower is better.
MetricResult compute_ecr(AvgPower energy, Throughput throughput);

/// Log-scale variable-load score -log10(P/T), with P the weighted power
/// over the 0/50/100% load points bound idle-first (alpha at 0% load,
/// beta at 50%, epsilon at 100%). P in watts, T in Gbps. Higher is better.
MetricResult compute_teeer(AvgPower e_idle, AvgPower e_half, AvgPower e_full,
                           Throughput throughput, const WeightProfile& weights);

/// Maximum throughput over weighted power, same idle-first binding as
/// TEEER. Deliberately reproduces the published design, which inflates
/// above the 1/ECR ceiling whenever idle or half-load draws less than
/// full-load power.
MetricResult compute_teer_atis(AvgPower e_idle, AvgPower e_half, AvgPower e_full,
                               Throughput max_throughput, const WeightProfile& weights);

/// Variable-load efficiency in Gbps/W over a full/reduced/idle cycle with
/// shares (alpha, beta, epsilon). Idle contributes energy but zero
/// throughput.
MetricResult compute_eer_vl(Throughput t_full, Throughput t_reduced,
                            AvgPower e_full, AvgPower e_reduced, AvgPower e_idle,
                            const WeightProfile& weights);

/// Extended-idle efficiency in Gbps/W over three power states of
/// decreasing capacity. All three phases contribute throughput; there is
/// no zero-utilization phase.
MetricResult compute_eer_ex(Throughput t_full, Throughput t_r1, Throughput t_r2,
                            AvgPower e_full, AvgPower e_r1, AvgPower e_r2,
                            const WeightProfile& weights);

struct AllowanceVerdict {
    AvgPower ceiling;
    bool pass = false;
    MetricResult result;  // kind allowance, value = ceiling in watts
};

/// Pass/fail ceiling computed as the arithmetic sum of per-interface
/// allowances times interface counts.
AllowanceVerdict allowance_budget(const std::map<std::string, std::uint32_t>& interface_counts,
                                  const AllowanceTable& table, AvgPower measured);

/// Convex combination of per-packet-size NDRs; the METI-style weighted
/// peak throughput used as the T input to compute_ecr.
MetricResult weighted_peak_throughput(const std::map<std::uint32_t, Throughput>& per_size_ndr,
                                      const PacketSizeWeights& weights);

}  // namespace greenbench

#endif
