#include "greenbench.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "greenbench/device.hpp"
#include "greenbench/jsonio.hpp"
#include "greenbench/metrics.hpp"
#include "greenbench/report.hpp"
#include "greenbench/scenario.hpp"
#include "greenbench/types.hpp"

using namespace greenbench;

static_assert(GB_OK == static_cast<int>(Errc::ok));
static_assert(GB_ERR_IO == static_cast<int>(Errc::io));
static_assert(GB_ERR_PARSE == static_cast<int>(Errc::parse));
static_assert(GB_ERR_VALIDATION == static_cast<int>(Errc::validation));
static_assert(GB_ERR_ZERO_THROUGHPUT == static_cast<int>(Errc::zero_throughput));
static_assert(GB_ERR_NONPOSITIVE_POWER == static_cast<int>(Errc::nonpositive_power));
static_assert(GB_ERR_REDUCED_EXCEEDS_FULL == static_cast<int>(Errc::reduced_exceeds_full));
static_assert(GB_ERR_STATE_ORDER == static_cast<int>(Errc::state_order_violation));
static_assert(GB_ERR_UNKNOWN_INTERFACE_CLASS == static_cast<int>(Errc::unknown_interface_class));
static_assert(GB_ERR_MISSING_PACKET_SIZE == static_cast<int>(Errc::missing_packet_size));
static_assert(GB_ERR_PACKET_SIZE_UNKNOWN == static_cast<int>(Errc::packet_size_unknown));
static_assert(GB_ERR_UNKNOWN_STATE == static_cast<int>(Errc::unknown_state));
static_assert(GB_ERR_NO_PASSING_RATE == static_cast<int>(Errc::no_passing_rate));
static_assert(GB_ERR_WARMUP_TIMEOUT == static_cast<int>(Errc::warmup_timeout));
static_assert(GB_ERR_UNEXPECTED_LOSS == static_cast<int>(Errc::unexpected_loss));
static_assert(GB_ERR_INVALID_MEASUREMENT_SET == static_cast<int>(Errc::invalid_measurement_set));
static_assert(GB_ERR_METRIC_ABSENT == static_cast<int>(Errc::metric_absent));
static_assert(GB_ERR_BAD_ARGUMENT == static_cast<int>(Errc::bad_argument));
static_assert(GB_ERR_INTERNAL == static_cast<int>(Errc::internal));

struct gb_device {
    Device impl;
};

namespace {

thread_local std::string g_last_error;

void record_error(int code, const char* what) {
    g_last_error = what ? what : errc_name(static_cast<Errc>(code));
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return GB_OK;
    } catch (const Error& e) {
        record_error(static_cast<int>(e.code()), e.what());
        return static_cast<int>(e.code());
    } catch (const std::bad_alloc&) {
        record_error(GB_ERR_INTERNAL, "out of memory");
        return GB_ERR_INTERNAL;
    } catch (const std::exception& e) {
        record_error(GB_ERR_INTERNAL, e.what());
        return GB_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int require(bool ok, const char* what) {
    if (!ok) {
        record_error(GB_ERR_BAD_ARGUMENT, what);
        return GB_ERR_BAD_ARGUMENT;
    }
    return GB_OK;
}

WeightProfile profile3(double alpha, double beta, double epsilon) {
    WeightProfile w;
    w.alpha = alpha;
    w.beta = beta;
    w.epsilon = epsilon;
    w.validate();
    return w;
}

}  // namespace

extern "C" {

const char* gb_version(void) { return "1.0.0"; }

const char* gb_strerror(int code) {
    if (code < 0 || code > static_cast<int>(Errc::internal)) return "unknown error";
    return errc_name(static_cast<Errc>(code));
}

const char* gb_last_error(void) { return g_last_error.c_str(); }

void gb_string_free(char* s) { std::free(s); }

/* --- device ------------------------------------------------------- */

int gb_device_open(const char* path, gb_device** out) {
    if (int rc = require(path && out, "path and out must be non-null")) return rc;
    return guarded([&] {
        *out = new gb_device{Device(DeviceModel::load_file(path))};
    });
}

int gb_device_open_json(const char* json_text, gb_device** out) {
    if (int rc = require(json_text && out, "json_text and out must be non-null")) return rc;
    return guarded([&] {
        *out = new gb_device{Device(DeviceModel::from_json(parse_json_text(json_text)))};
    });
}

void gb_device_close(gb_device* device) { delete device; }

int gb_device_name(const gb_device* device, char** out) {
    if (int rc = require(device && out, "device and out must be non-null")) return rc;
    return guarded([&] { *out = dup_string(device->impl.model().name); });
}

int gb_device_now(const gb_device* device, double* out_seconds) {
    if (int rc = require(device && out_seconds, "device and out must be non-null")) return rc;
    *out_seconds = device->impl.now();
    return GB_OK;
}

int gb_device_power(const gb_device* device, double load_fraction, double at_time,
                    double* out_watts) {
    if (int rc = require(device && out_watts, "device and out must be non-null")) return rc;
    return guarded([&] { *out_watts = device->impl.instantaneous_power(load_fraction, at_time); });
}

int gb_device_offer_load(gb_device* device, double offered_gbps, unsigned packet_size_bytes,
                         double duration_s, char** out_sample_json) {
    if (int rc = require(device != nullptr, "device must be non-null")) return rc;
    return guarded([&] {
        MeasurementSample s =
            device->impl.offer_load(offered_gbps, packet_size_bytes, duration_s);
        if (out_sample_json) *out_sample_json = dup_string(canonical_dump(to_json(s)));
    });
}

int gb_device_set_state(gb_device* device, int state_id, double* out_complete_time) {
    if (int rc = require(device != nullptr, "device must be non-null")) return rc;
    return guarded([&] {
        double t = device->impl.set_power_state(state_id);
        if (out_complete_time) *out_complete_time = t;
    });
}

/* --- pure metrics -------------------------------------------------- */

int gb_ecr(double watts, double gbps, double* out) {
    if (int rc = require(out != nullptr, "out must be non-null")) return rc;
    return guarded([&] { *out = compute_ecr(AvgPower(watts), Throughput(gbps)).value; });
}

int gb_teeer(double e_idle_w, double e_half_w, double e_full_w, double t_gbps, double alpha,
             double beta, double epsilon, double* out) {
    if (int rc = require(out != nullptr, "out must be non-null")) return rc;
    return guarded([&] {
        *out = compute_teeer(AvgPower(e_idle_w), AvgPower(e_half_w), AvgPower(e_full_w),
                             Throughput(t_gbps), profile3(alpha, beta, epsilon))
                   .value;
    });
}

int gb_teer_atis(double e_idle_w, double e_half_w, double e_full_w, double t_gbps, double alpha,
                 double beta, double epsilon, double* out) {
    if (int rc = require(out != nullptr, "out must be non-null")) return rc;
    return guarded([&] {
        *out = compute_teer_atis(AvgPower(e_idle_w), AvgPower(e_half_w), AvgPower(e_full_w),
                                 Throughput(t_gbps), profile3(alpha, beta, epsilon))
                   .value;
    });
}

int gb_eer_vl(double t_full_gbps, double t_reduced_gbps, double e_full_w, double e_reduced_w,
              double e_idle_w, double alpha, double beta, double epsilon, double* out) {
    if (int rc = require(out != nullptr, "out must be non-null")) return rc;
    return guarded([&] {
        *out = compute_eer_vl(Throughput(t_full_gbps), Throughput(t_reduced_gbps),
                              AvgPower(e_full_w), AvgPower(e_reduced_w), AvgPower(e_idle_w),
                              profile3(alpha, beta, epsilon))
                   .value;
    });
}

int gb_eer_ex(double t_full_gbps, double t_r1_gbps, double t_r2_gbps, double e_full_w,
              double e_r1_w, double e_r2_w, double alpha, double beta, double epsilon,
              double* out) {
    if (int rc = require(out != nullptr, "out must be non-null")) return rc;
    return guarded([&] {
        *out = compute_eer_ex(Throughput(t_full_gbps), Throughput(t_r1_gbps),
                              Throughput(t_r2_gbps), AvgPower(e_full_w), AvgPower(e_r1_w),
                              AvgPower(e_r2_w), profile3(alpha, beta, epsilon))
                   .value;
    });
}

/* --- scenarios and files ------------------------------------------- */

int gb_run_scenario(const char* scenario_path, const char* out_dir,
                    const unsigned long long* seed_override, char** out_summary_json) {
    if (int rc = require(scenario_path != nullptr, "scenario_path must be non-null")) return rc;
    return guarded([&] {
        std::optional<std::uint64_t> seed;
        if (seed_override) seed = *seed_override;
        RunOutcome outcome =
            run_scenario_file(scenario_path, out_dir ? out_dir : ".", seed);
        if (out_summary_json) {
            json files = json::array();
            for (const auto& f : outcome.measurement_files) files.push_back(f.string());
            json summary{{"valid", outcome.valid},
                         {"invalid_reasons", outcome.invalid_reasons},
                         {"device", outcome.report.device},
                         {"report_file", outcome.report_file.string()},
                         {"measurement_files", std::move(files)},
                         {"config_hash", outcome.report.config_digest.config_hash}};
            *out_summary_json = dup_string(canonical_dump(summary));
        }
    });
}

int gb_metrics_from_file(const char* measurement_path, const char* metric, const double* weights3,
                         char** out_result_json) {
    if (int rc = require(measurement_path && metric, "measurement_path and metric must be non-null"))
        return rc;
    return guarded([&] {
        MeasurementSet set = measurement_set_from_json(parse_json_file(measurement_path));
        std::optional<WeightProfile> weights;
        if (weights3) weights = profile3(weights3[0], weights3[1], weights3[2]);
        MetricResult result = metric_from_measurement(set, metric_kind_from_name(metric), weights);
        if (out_result_json) *out_result_json = dup_string(canonical_dump(to_json(result)));
    });
}

int gb_compare_reports(const char* const* report_paths, size_t n_reports, const char* metric,
                       const char* format, char** out) {
    if (int rc = require(report_paths && n_reports > 0 && metric && out,
                         "report_paths, metric and out must be non-null"))
        return rc;
    return guarded([&] {
        std::vector<DeviceReport> reports;
        for (size_t i = 0; i < n_reports; ++i) {
            if (!report_paths[i]) fail(Errc::bad_argument, "report path must be non-null");
            reports.push_back(device_report_from_json(parse_json_file(report_paths[i])));
        }
        ComparisonTable table = render_comparison(reports, metric_kind_from_name(metric));
        std::string fmt = format ? format : "json";
        std::string rendered;
        if (fmt == "json") rendered = export_json(table);
        else if (fmt == "csv") rendered = export_csv(table);
        else if (fmt == "table") rendered = format_table(table);
        else fail(Errc::bad_argument, "unknown format '" + fmt + "'");
        *out = dup_string(rendered);
    });
}

int gb_export_file(const char* artifact_path, const char* format, char** out) {
    if (int rc = require(artifact_path && out, "artifact_path and out must be non-null")) return rc;
    return guarded([&] {
        json j = parse_json_file(artifact_path);
        std::string kind = j.value("kind", "");
        std::string fmt = format ? format : "json";
        std::string rendered;
        if (kind == "device_report") {
            DeviceReport rep = device_report_from_json(j);
            if (fmt == "json") rendered = export_json(rep);
            else if (fmt == "csv") rendered = export_csv(rep);
            else if (fmt == "table") rendered = format_table(rep);
            else fail(Errc::bad_argument, "unknown format '" + fmt + "'");
        } else if (kind == "comparison") {
            ComparisonTable table = comparison_table_from_json(j);
            if (fmt == "json") rendered = export_json(table);
            else if (fmt == "csv") rendered = export_csv(table);
            else if (fmt == "table") rendered = format_table(table);
            else fail(Errc::bad_argument, "unknown format '" + fmt + "'");
        } else if (kind == "measurement_set") {
            MeasurementSet set = measurement_set_from_json(j);
            if (fmt == "json") rendered = export_json(set);
            else fail(Errc::bad_argument, "measurement sets export as json only");
        } else {
            fail(Errc::parse, "unknown document kind '" + kind + "'");
        }
        *out = dup_string(rendered);
    });
}

int gb_validate_file(const char* path, char** out_diagnostics_json) {
    if (int rc = require(path != nullptr, "path must be non-null")) return rc;
    std::vector<std::string> problems;
    int rc = guarded([&] { problems = validate_file(path); });
    if (rc != GB_OK) return rc;
    if (out_diagnostics_json) {
        try {
            json diag = problems;
            *out_diagnostics_json = dup_string(canonical_dump(diag));
        } catch (const std::exception& e) {
            record_error(GB_ERR_INTERNAL, e.what());
            return GB_ERR_INTERNAL;
        }
    }
    if (!problems.empty()) {
        record_error(GB_ERR_VALIDATION, problems.front().c_str());
        return GB_ERR_VALIDATION;
    }
    return GB_OK;
}

}  // extern "C"
