#ifndef GREENBENCH_REPORT_HPP
#define GREENBENCH_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "greenbench/types.hpp"

namespace greenbench {

struct ValidityEntry {
    std::string procedure;
    bool valid = true;
    std::string reason;  // empty when valid
};

/// Datasheet-style rollup for one device. Every numeric metric traces to a
/// valid MeasurementSet; invalidated procedures appear only in `validity`.
struct DeviceReport {
    std::string device;
    std::string label;
    std::vector<MetricResult> results;
    std::vector<ValidityEntry> validity;
    Provenance config_digest;

    const MetricResult* find_metric(MetricKind kind) const;
};

struct ComparisonRow {
    std::string device;
    std::string label;
    std::optional<double> value;  // absent renders as an explicit marker, never zero
    bool leader = false;
};

/// One metric across devices, row per device in input order. All cells in
/// the value column share the metric's units.
struct ComparisonTable {
    MetricKind metric = MetricKind::ecr;
    std::string units;
    std::vector<ComparisonRow> rows;
};

/// Rows keep the input order; the best present value (per the metric's
/// ranking direction) is flagged as leader. Throws Errc::metric_absent if
/// no report carries the metric.
ComparisonTable render_comparison(const std::vector<DeviceReport>& reports, MetricKind metric);

json to_json(const DeviceReport& report);
DeviceReport device_report_from_json(const json& j);
json to_json(const ComparisonTable& table);
ComparisonTable comparison_table_from_json(const json& j);

// Exports. JSON is the canonical encoding (export then parse then export is
// byte-identical); CSV is RFC 4180 with a header row, '.' decimal
// separator, UTF-8, full-precision numbers. Human tables round to four
// significant digits and mark leaders with '*'.
std::string export_json(const DeviceReport& report);
std::string export_json(const ComparisonTable& table);
std::string export_json(const MeasurementSet& set);
std::string export_csv(const DeviceReport& report);
std::string export_csv(const ComparisonTable& table);
std::string format_table(const ComparisonTable& table);
std::string format_table(const DeviceReport& report);
std::string format_table(const MetricResult& result);
std::string export_csv(const MetricResult& result);

std::string csv_escape(const std::string& field);

}  // namespace greenbench

#endif
