#include "greenbench/report.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "greenbench/jsonio.hpp"

namespace greenbench {

const MetricResult* DeviceReport::find_metric(MetricKind kind) const {
    for (const MetricResult& r : results) {
        if (r.kind == kind) return &r;
    }
    return nullptr;
}

ComparisonTable render_comparison(const std::vector<DeviceReport>& reports, MetricKind metric) {
    if (reports.empty()) fail(Errc::bad_argument, "comparison needs at least one report");
    ComparisonTable table;
    table.metric = metric;
    table.units = metric_units(metric);

    bool any = false;
    for (const DeviceReport& rep : reports) {
        ComparisonRow row;
        row.device = rep.device;
        row.label = rep.label;
        if (const MetricResult* r = rep.find_metric(metric)) {
            row.value = r->value;
            any = true;
        }
        table.rows.push_back(std::move(row));
    }
    if (!any) {
        fail(Errc::metric_absent,
             std::string("no report carries metric ") + metric_kind_name(metric));
    }

    bool higher = metric_higher_is_better(metric);
    std::size_t best = table.rows.size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!table.rows[i].value) continue;
        if (best == table.rows.size()) {
            best = i;
            continue;
        }
        double v = *table.rows[i].value;
        double b = *table.rows[best].value;
        if (higher ? v > b : v < b) best = i;
    }
    if (best < table.rows.size()) table.rows[best].leader = true;
    return table;
}

json to_json(const DeviceReport& report) {
    json results = json::array();
    for (const MetricResult& r : report.results) results.push_back(to_json(r));
    json validity = json::array();
    for (const ValidityEntry& v : report.validity) {
        validity.push_back(json{{"procedure", v.procedure}, {"valid", v.valid}, {"reason", v.reason}});
    }
    return json{{"kind", "device_report"},
                {"device", report.device},
                {"label", report.label},
                {"results", std::move(results)},
                {"validity", std::move(validity)},
                {"config_digest", to_json(report.config_digest)}};
}

DeviceReport device_report_from_json(const json& j) {
    if (j.value("kind", "") != std::string("device_report")) {
        fail(Errc::parse, "not a device_report document");
    }
    DeviceReport rep;
    rep.device = j.at("device").get<std::string>();
    rep.label = j.value("label", "");
    for (const auto& rj : j.at("results")) rep.results.push_back(metric_result_from_json(rj));
    for (const auto& vj : j.at("validity")) {
        ValidityEntry v;
        v.procedure = vj.at("procedure").get<std::string>();
        v.valid = vj.at("valid").get<bool>();
        v.reason = vj.value("reason", "");
        rep.validity.push_back(std::move(v));
    }
    rep.config_digest = provenance_from_json(j.at("config_digest"));
    return rep;
}

json to_json(const ComparisonTable& table) {
    json rows = json::array();
    for (const ComparisonRow& row : table.rows) {
        json rj{{"device", row.device}, {"label", row.label}, {"leader", row.leader}};
        if (row.value) {
            rj["value"] = *row.value;
        } else {
            rj["value"] = nullptr;
        }
        rows.push_back(std::move(rj));
    }
    return json{{"kind", "comparison"},
                {"metric", metric_kind_name(table.metric)},
                {"units", table.units},
                {"rows", std::move(rows)}};
}

ComparisonTable comparison_table_from_json(const json& j) {
    if (j.value("kind", "") != std::string("comparison")) {
        fail(Errc::parse, "not a comparison document");
    }
    ComparisonTable table;
    table.metric = metric_kind_from_name(j.at("metric").get<std::string>());
    table.units = j.value("units", metric_units(table.metric));
    for (const auto& rj : j.at("rows")) {
        ComparisonRow row;
        row.device = rj.at("device").get<std::string>();
        row.label = rj.value("label", "");
        if (rj.contains("value") && !rj.at("value").is_null()) {
            row.value = rj.at("value").get<double>();
        }
        row.leader = rj.value("leader", false);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string export_json(const DeviceReport& report) { return canonical_dump(to_json(report)); }
std::string export_json(const ComparisonTable& table) { return canonical_dump(to_json(table)); }
std::string export_json(const MeasurementSet& set) { return canonical_dump(to_json(set)); }

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

namespace {

constexpr const char* kCrlf = "\r\n";

}  // namespace

std::string export_csv(const DeviceReport& report) {
    std::string out = "device,metric,value,units";
    out += kCrlf;
    for (const MetricResult& r : report.results) {
        out += csv_escape(report.device);
        out += ',';
        out += metric_kind_name(r.kind);
        out += ',';
        out += double_to_string(r.value);
        out += ',';
        out += csv_escape(r.units);
        out += kCrlf;
    }
    return out;
}

std::string export_csv(const ComparisonTable& table) {
    std::string out = "device,label,value,units,leader";
    out += kCrlf;
    for (const ComparisonRow& row : table.rows) {
        out += csv_escape(row.device);
        out += ',';
        out += csv_escape(row.label);
        out += ',';
        if (row.value) out += double_to_string(*row.value);
        out += ',';
        out += csv_escape(table.units);
        out += ',';
        out += row.leader ? "true" : "false";
        out += kCrlf;
    }
    return out;
}

std::string export_csv(const MetricResult& result) {
    std::string out = "metric,value,units";
    out += kCrlf;
    out += metric_kind_name(result.kind);
    out += ',';
    out += double_to_string(result.value);
    out += ',';
    out += csv_escape(result.units);
    out += kCrlf;
    return out;
}

namespace {

std::string pad(const std::string& s, std::size_t width) {
    std::string out = s;
    while (out.size() < width) out += ' ';
    return out;
}

}  // namespace

std::string format_table(const ComparisonTable& table) {
    std::string metric_col = std::string(metric_kind_name(table.metric)) + " [" + table.units + "]";
    std::vector<std::array<std::string, 3>> cells;
    cells.push_back({"device", "label", metric_col});
    for (const ComparisonRow& row : table.rows) {
        std::string value = row.value ? format_sig4(*row.value) : "n/a";
        if (row.leader) value += " *";
        cells.push_back({row.device, row.label, value});
    }
    std::array<std::size_t, 3> width{};
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < 3; ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream os;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        os << pad(cells[r][0], width[0]) << "  " << pad(cells[r][1], width[1]) << "  "
           << cells[r][2] << '\n';
        if (r == 0) {
            os << std::string(width[0], '-') << "  " << std::string(width[1], '-') << "  "
               << std::string(width[2], '-') << '\n';
        }
    }
    return os.str();
}

std::string format_table(const DeviceReport& report) {
    std::vector<std::array<std::string, 3>> cells;
    cells.push_back({"metric", "value", "units"});
    for (const MetricResult& r : report.results) {
        cells.push_back({metric_kind_name(r.kind), format_sig4(r.value), r.units});
    }
    std::array<std::size_t, 3> width{};
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < 3; ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream os;
    os << report.device;
    if (!report.label.empty()) os << " (" << report.label << ")";
    os << '\n';
    for (std::size_t r = 0; r < cells.size(); ++r) {
        os << pad(cells[r][0], width[0]) << "  " << pad(cells[r][1], width[1]) << "  "
           << cells[r][2] << '\n';
        if (r == 0) {
            os << std::string(width[0], '-') << "  " << std::string(width[1], '-') << "  "
               << std::string(width[2], '-') << '\n';
        }
    }
    for (const ValidityEntry& v : report.validity) {
        os << v.procedure << ": " << (v.valid ? "valid" : "INVALID " + v.reason) << '\n';
    }
    return os.str();
}

std::string format_table(const MetricResult& result) {
    std::ostringstream os;
    os << metric_kind_name(result.kind) << "  " << format_sig4(result.value) << "  " << result.units
       << '\n';
    return os.str();
}

}  // namespace greenbench
