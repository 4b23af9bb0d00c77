#include "greenbench/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "greenbench/jsonio.hpp"
#include "greenbench/metrics.hpp"

namespace greenbench {

namespace fs = std::filesystem;

const char* procedure_name(Procedure p) {
    switch (p) {
        case Procedure::peak: return "peak";
        case Procedure::variable_load: return "variable_load";
        case Procedure::extended_idle: return "extended_idle";
        case Procedure::full_suite: return "full_suite";
    }
    fail(Errc::internal, "unhandled procedure");
}

Procedure procedure_from_name(const std::string& name) {
    if (name == "peak") return Procedure::peak;
    if (name == "variable_load") return Procedure::variable_load;
    if (name == "extended_idle") return Procedure::extended_idle;
    if (name == "full_suite") return Procedure::full_suite;
    fail(Errc::bad_argument, "unknown procedure '" + name + "'");
}

fs::path resolve_device_path(const std::string& device_field, const fs::path& scenario_dir) {
    fs::path direct(device_field);
    if (direct.is_absolute()) {
        if (fs::exists(direct)) return direct;
        fail(Errc::io, "device file '" + device_field + "' does not exist");
    }
    fs::path beside = scenario_dir / direct;
    if (fs::exists(beside)) return beside;
    if (const char* env = std::getenv("GREENBENCH_FIXTURES")) {
        fs::path root(env);
        for (fs::path candidate : {root / direct, root / "devices" / direct}) {
            if (fs::exists(candidate)) return candidate;
        }
    }
    fail(Errc::io, "cannot resolve device file '" + device_field + "' (tried '" +
                       beside.string() + "' and $GREENBENCH_FIXTURES)");
}

Scenario Scenario::load_file(const fs::path& path, std::optional<std::uint64_t> seed_override) {
    json j = parse_json_file(path);
    if (j.value("kind", "") != std::string("scenario")) {
        fail(Errc::parse, path.string() + ": not a scenario document");
    }
    Scenario sc;
    sc.source_path = path;
    std::string device_field;
    try {
        device_field = j.at("device").get<std::string>();
        sc.procedure = procedure_from_name(j.at("procedure").get<std::string>());
        json seeds = j.value("seeds", json::object());
        sc.orchestrator_seed = seeds.value("orchestrator", 0ull);
        if (seed_override) sc.orchestrator_seed = *seed_override;
        if (seeds.contains("device")) {
            sc.device_seed_override = seeds.at("device").get<std::uint64_t>();
        }
        sc.parameters = j.value("parameters", json::object());
    } catch (const json::exception& e) {
        fail(Errc::parse, path.string() + ": " + e.what());
    }
    sc.device_path = resolve_device_path(device_field, path.parent_path());

    json seeds_canon{{"orchestrator", sc.orchestrator_seed}};
    if (sc.device_seed_override) seeds_canon["device"] = *sc.device_seed_override;
    json canon{{"kind", "scenario"},
               {"device", device_field},
               {"procedure", procedure_name(sc.procedure)},
               {"seeds", std::move(seeds_canon)},
               {"parameters", sc.parameters}};
    sc.config_hash = hex16(fnv1a64(canonical_dump(canon)));
    return sc;
}

namespace {

double get_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

// The load/weight matrix is an explicit input: scenarios carry it, nothing
// invents one. Only the published Verizon triple may stand in for the
// three-point procedures.
WeightProfile required_weights(const json& params, const char* what) {
    if (!params.contains("weights")) {
        fail(Errc::bad_argument,
             std::string(what) + " needs an explicit 'weights' profile in its parameters");
    }
    return weight_profile_from_json(params.at("weights"));
}

std::uint32_t packet_size_or_largest(const json& params, const DeviceModel& model) {
    if (params.contains("packet_size_bytes")) {
        return params.at("packet_size_bytes").get<std::uint32_t>();
    }
    return model.largest_packet_size();
}

NdrSearchConfig search_config(const json& params, std::uint32_t packet_size) {
    json s = params.value("search", json::object());
    NdrSearchConfig cfg;
    cfg.packet_size_bytes = packet_size;
    cfg.resolution = get_or(s, "resolution", 0.001);
    cfg.loss_tolerance = get_or(s, "loss_tolerance", 0.0);
    cfg.trial_duration_s = get_or(s, "trial_duration_s", 10.0);
    cfg.validate();
    return cfg;
}

WarmupConfig warmup_config(const json& params, std::uint32_t packet_size) {
    json w = params.value("warmup", json::object());
    WarmupConfig cfg;
    cfg.packet_size_bytes = packet_size;
    cfg.window_samples = w.contains("window_samples") ? w.at("window_samples").get<int>() : 30;
    cfg.stability_tol = get_or(w, "stability_tol", 0.005);
    cfg.timeout_s = get_or(w, "timeout_s", 3600.0);
    cfg.sample_interval_s = get_or(w, "sample_interval_s", 1.0);
    cfg.validate();
    return cfg;
}

bool warmup_wanted(const json& params) {
    return !params.contains("warmup_required") || params.at("warmup_required").get<bool>();
}

/// Equalize thermal state before measuring; a no-op for devices without a
/// warm-up response unless explicitly skipped.
bool maybe_warmup(Device& device, const Orchestrator& orch, const json& params,
                  std::uint32_t packet_size) {
    bool wanted = warmup_wanted(params);
    if (device.model().warmup && wanted) {
        orch.warmup_until_stable(device, warmup_config(params, packet_size));
    }
    return device.model().warmup.has_value() && !wanted;
}

Throughput ndr_for(Device& device, const Orchestrator& orch, const json& params,
                   std::uint32_t packet_size) {
    if (params.contains("ndr_gbps")) {
        return Throughput(params.at("ndr_gbps").get<double>());
    }
    return orch.find_ndr(device, search_config(params, packet_size));
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        out += ok ? c : '-';
    }
    return out.empty() ? std::string("device") : out;
}

// Verizon's published binding: 0.35 at idle, 0.4 at half, 0.25 at full load.
const WeightProfile kVerizonWeights{0.35, 0.4, 0.25, 0.5};

struct ProcedureRun {
    MeasurementSet set;
    std::vector<MetricResult> metrics;
    std::optional<PeakSuiteResult> peak;
};

ProcedureRun run_peak_procedure(const DeviceModel& model, const Orchestrator& orch,
                                const json& params) {
    Device device(model);
    std::vector<std::uint32_t> sizes;
    if (params.contains("packet_sizes")) {
        for (const auto& v : params.at("packet_sizes")) sizes.push_back(v.get<std::uint32_t>());
    } else {
        for (const auto& [size, rate] : model.ndr_gbps_by_packet_size) sizes.push_back(size);
    }
    if (sizes.empty()) fail(Errc::validation, "peak procedure needs packet sizes");
    std::sort(sizes.begin(), sizes.end());

    PacketSizeWeights weights;
    if (params.contains("packet_size_weights")) {
        for (const auto& [key, value] : params.at("packet_size_weights").items()) {
            weights.entries.emplace_back(static_cast<std::uint32_t>(std::stoul(key)),
                                         value.get<double>());
        }
        std::sort(weights.entries.begin(), weights.entries.end());
    } else {
        weights.entries.emplace_back(sizes.back(), 1.0);
    }

    ProcedureRun run;
    bool skipped = maybe_warmup(device, orch, params, sizes.back());
    NdrSearchConfig base_cfg = search_config(params, sizes.back());
    double peak_duration = get_or(params, "peak_duration_s", 10.0);
    PeakSuiteResult suite = orch.run_peak_suite(device, sizes, weights, base_cfg, peak_duration);
    suite.set.provenance.warmup_skipped = skipped;

    const PeakEntry* largest = nullptr;
    for (const PeakEntry& e : suite.per_size) {
        if (!largest || e.packet_size_bytes > largest->packet_size_bytes) largest = &e;
    }
    run.metrics.push_back(largest->ecr);
    run.metrics.push_back(suite.weighted_peak);

    if (params.contains("allowance_table") && !model.interfaces.empty()) {
        AllowanceTable table;
        for (const auto& [klass, watts] : params.at("allowance_table").items()) {
            table.entries[klass] = watts.get<double>();
        }
        AllowanceVerdict verdict = allowance_budget(model.interfaces, table, largest->power);
        run.metrics.push_back(verdict.result);
    }

    run.set = suite.set;
    run.peak = std::move(suite);
    return run;
}

ProcedureRun run_vl_procedure(const DeviceModel& model, const Orchestrator& orch,
                              const json& params, const char* procedure_label,
                              bool default_probe) {
    Device device(model);
    std::uint32_t ps = packet_size_or_largest(params, model);
    bool three_point = std::string(procedure_label) == "three_point";

    VlTestPlan plan;
    plan.weights = three_point && !params.contains("weights")
                       ? kVerizonWeights
                       : required_weights(params, procedure_label);
    plan.phase_duration_s = get_or(params, "phase_duration_s", 30.0);
    plan.packet_size_bytes = ps;
    plan.warmup_required = warmup_wanted(params);
    json probe = params.value("probe", json::object());
    plan.probe.enabled = probe.contains("enabled") ? probe.at("enabled").get<bool>() : default_probe;
    plan.probe.response_window_s = get_or(probe, "response_window_s", 1.0);
    plan.probe.throughput_tolerance = get_or(probe, "throughput_tolerance", 0.01);
    plan.validate();

    ProcedureRun run;
    maybe_warmup(device, orch, params, ps);
    Throughput ndr = ndr_for(device, orch, params, ps);
    run.set = orch.run_variable_load_test(device, ndr, plan);
    run.set.procedure = procedure_label;
    if (run.set.valid) {
        if (three_point) {
            run.metrics.push_back(metric_from_measurement(run.set, MetricKind::teeer, std::nullopt));
            run.metrics.push_back(
                metric_from_measurement(run.set, MetricKind::teer_atis, std::nullopt));
        } else {
            run.metrics.push_back(metric_from_measurement(run.set, MetricKind::eer_vl, std::nullopt));
        }
    }
    return run;
}

ProcedureRun run_ex_procedure(const DeviceModel& model, const Orchestrator& orch,
                              const json& params) {
    Device device(model);
    std::uint32_t ps = packet_size_or_largest(params, model);

    ExTestPlan plan;
    plan.weights = required_weights(params, "extended_idle");
    plan.packet_size_bytes = ps;
    if (params.contains("schedule")) {
        for (const auto& pj : params.at("schedule")) {
            ExPhase ph;
            ph.state_id = pj.at("state_id").get<int>();
            ph.duration_s = get_or(pj, "duration_s", 30.0);
            ph.load_fraction_of_state_capacity = get_or(pj, "load_fraction", 1.0);
            plan.schedule.push_back(ph);
        }
    } else {
        for (int id = 0; id < 3; ++id) plan.schedule.push_back(ExPhase{id, 30.0, 1.0});
    }
    plan.validate();

    ProcedureRun run;
    maybe_warmup(device, orch, params, ps);
    Throughput ndr = ndr_for(device, orch, params, ps);
    run.set = orch.run_extended_idle_test(device, ndr, plan);
    if (run.set.valid) {
        run.metrics.push_back(metric_from_measurement(run.set, MetricKind::eer_ex, std::nullopt));
    }
    return run;
}

}  // namespace

MetricResult metric_from_measurement(const MeasurementSet& set, MetricKind kind,
                                     const std::optional<WeightProfile>& weights_override) {
    if (!set.valid) {
        fail(Errc::invalid_measurement_set,
             "measurement set is invalidated: " + set.invalidation_reason.value_or("unknown"));
    }
    auto recorded_weights = [&](MetricKind k) {
        if (weights_override) return *weights_override;
        if (set.provenance.weights) return *set.provenance.weights;
        fail(Errc::bad_argument, std::string(metric_kind_name(k)) +
                                     " needs a weight profile (none recorded with the "
                                     "measurements; pass one explicitly)");
    };

    switch (kind) {
        case MetricKind::ecr: {
            if (set.procedure == "peak") {
                std::uint32_t largest = 0;
                const MeasurementSample* best = nullptr;
                for (const MeasurementSample& s : set.samples) {
                    if (s.packet_size_bytes >= largest) {
                        largest = s.packet_size_bytes;
                        best = &s;
                    }
                }
                if (!best) fail(Errc::validation, "peak set has no samples");
                return compute_ecr(best->power, best->delivered);
            }
            const MeasurementSample& full = set.require_phase(phase::full);
            return compute_ecr(full.power, set.ndr);
        }
        case MetricKind::teeer:
        case MetricKind::teer_atis: {
            const MeasurementSample& full = set.require_phase(phase::full);
            const MeasurementSample& half = set.require_phase(phase::reduced);
            const MeasurementSample& idle = set.require_phase(phase::idle);
            if (std::fabs(half.load_fraction - 0.5) > 1e-9) {
                fail(Errc::validation,
                     "this metric needs the 50% reference point, not " +
                         double_to_string(half.load_fraction));
            }
            WeightProfile w = weights_override              ? *weights_override
                              : set.provenance.weights      ? *set.provenance.weights
                                                            : kVerizonWeights;
            if (kind == MetricKind::teeer) {
                return compute_teeer(idle.power, half.power, full.power, set.ndr, w);
            }
            return compute_teer_atis(idle.power, half.power, full.power, set.ndr, w);
        }
        case MetricKind::eer_vl: {
            const MeasurementSample& full = set.require_phase(phase::full);
            const MeasurementSample& reduced = set.require_phase(phase::reduced);
            const MeasurementSample& idle = set.require_phase(phase::idle);
            return compute_eer_vl(full.delivered, reduced.delivered, full.power, reduced.power,
                                  idle.power, recorded_weights(kind));
        }
        case MetricKind::eer_ex: {
            const MeasurementSample& s0 = set.require_phase(phase::state(0));
            const MeasurementSample& s1 = set.require_phase(phase::state(1));
            const MeasurementSample& s2 = set.require_phase(phase::state(2));
            return compute_eer_ex(s0.delivered, s1.delivered, s2.delivered, s0.power, s1.power,
                                  s2.power, recorded_weights(kind));
        }
        case MetricKind::allowance:
        case MetricKind::weighted_peak:
            fail(Errc::bad_argument, std::string(metric_kind_name(kind)) +
                                         " is computed during a run, not from a measurement file");
    }
    fail(Errc::internal, "unhandled metric kind");
}

RunOutcome run_scenario(const Scenario& scenario, const fs::path& out_dir) {
    DeviceModel model = DeviceModel::load_file(scenario.device_path);
    if (scenario.device_seed_override) model.seed = *scenario.device_seed_override;
    Orchestrator orch(scenario.orchestrator_seed);
    const json& params = scenario.parameters;

    std::vector<ProcedureRun> runs;
    switch (scenario.procedure) {
        case Procedure::peak:
            runs.push_back(run_peak_procedure(model, orch, params));
            break;
        case Procedure::variable_load:
            runs.push_back(run_vl_procedure(model, orch, params, "variable_load", true));
            break;
        case Procedure::extended_idle:
            runs.push_back(run_ex_procedure(model, orch, params));
            break;
        case Procedure::full_suite: {
            runs.push_back(run_peak_procedure(model, orch, params.value("peak", json::object())));
            runs.push_back(run_vl_procedure(model, orch,
                                            params.value("three_point", json::object()),
                                            "three_point", false));
            runs.push_back(run_vl_procedure(model, orch,
                                            params.value("variable_load", json::object()),
                                            "variable_load", true));
            if (model.states.size() >= 3) {
                runs.push_back(
                    run_ex_procedure(model, orch, params.value("extended_idle", json::object())));
            }
            break;
        }
    }

    RunOutcome outcome;
    outcome.report.device = model.name;
    outcome.report.label = model.label;

    Provenance digest;
    digest.config_hash = scenario.config_hash;
    digest.device_seed = model.seed;
    digest.orchestrator_seed = scenario.orchestrator_seed;

    std::string device_tag = sanitize(model.name);
    for (ProcedureRun& run : runs) {
        run.set.provenance.config_hash = scenario.config_hash;
        if (!run.set.valid) {
            outcome.valid = false;
            outcome.invalid_reasons.push_back(run.set.procedure + ": " +
                                              run.set.invalidation_reason.value_or("unknown"));
        }
        for (const MetricResult& m : run.metrics) outcome.report.results.push_back(m);
        outcome.report.validity.push_back(ValidityEntry{
            run.set.procedure, run.set.valid, run.set.invalidation_reason.value_or("")});

        if (run.set.provenance.warmup_skipped) digest.warmup_skipped = true;
        if (run.set.provenance.weights && !digest.weights) {
            digest.weights = run.set.provenance.weights;
        }
        for (std::uint32_t ps : run.set.provenance.packet_sizes) {
            if (std::find(digest.packet_sizes.begin(), digest.packet_sizes.end(), ps) ==
                digest.packet_sizes.end()) {
                digest.packet_sizes.push_back(ps);
            }
        }

        fs::path file = out_dir / (device_tag + "_" + run.set.procedure + "_" +
                                   scenario.config_hash + ".json");
        write_file_atomic(file, export_json(run.set));
        outcome.measurement_files.push_back(file);
        outcome.sets.push_back(std::move(run.set));
    }
    std::sort(digest.packet_sizes.begin(), digest.packet_sizes.end());
    outcome.report.config_digest = digest;

    outcome.report_file = out_dir / (device_tag + "_" + procedure_name(scenario.procedure) + "_" +
                                     scenario.config_hash + ".report.json");
    write_file_atomic(outcome.report_file, export_json(outcome.report));
    return outcome;
}

RunOutcome run_scenario_file(const fs::path& scenario_path, const fs::path& out_dir,
                             std::optional<std::uint64_t> seed_override) {
    return run_scenario(Scenario::load_file(scenario_path, seed_override), out_dir);
}

namespace {

void check_field(const json& j, const char* key, const char* type,
                 std::vector<std::string>& out) {
    if (!j.contains(key)) {
        out.push_back(std::string("missing field '") + key + "'");
        return;
    }
    const json& v = j.at(key);
    std::string t(type);
    bool ok = (t == "string" && v.is_string()) || (t == "number" && v.is_number()) ||
              (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
              (t == "boolean" && v.is_boolean()) ||
              (t == "integer" && v.is_number_integer());
    if (!ok) out.push_back(std::string("field '") + key + "' must be a " + t);
}

}  // namespace

std::vector<std::string> validate_file(const fs::path& path) {
    std::vector<std::string> problems;
    json j;
    try {
        j = parse_json_file(path);
    } catch (const Error& e) {
        // A malformed document is a finding; an unreadable one is the
        // caller's problem.
        if (e.code() == Errc::io) throw;
        return {e.what()};
    }
    if (!j.is_object()) return {"document root must be an object"};
    std::string kind = j.value("kind", "");
    if (kind.empty()) return {"missing field 'kind'"};

    if (kind == "device") {
        check_field(j, "name", "string", problems);
        check_field(j, "line_rate", "number", problems);
        check_field(j, "ndr_by_packet_size", "object", problems);
        check_field(j, "states", "array", problems);
        if (problems.empty()) {
            try {
                (void)DeviceModel::from_json(j);
            } catch (const std::exception& e) {
                problems.push_back(e.what());
            }
        }
    } else if (kind == "scenario") {
        check_field(j, "device", "string", problems);
        check_field(j, "procedure", "string", problems);
        if (j.contains("procedure") && j.at("procedure").is_string()) {
            try {
                (void)procedure_from_name(j.at("procedure").get<std::string>());
            } catch (const std::exception& e) {
                problems.push_back(e.what());
            }
        }
        if (j.contains("seeds") && !j.at("seeds").is_object()) {
            problems.push_back("field 'seeds' must be a object");
        }
        const json params = j.value("parameters", json::object());
        if (!params.is_object()) {
            problems.push_back("field 'parameters' must be a object");
        } else if (params.contains("weights")) {
            try {
                (void)weight_profile_from_json(params.at("weights"));
            } catch (const std::exception& e) {
                problems.push_back(e.what());
            }
        }
    } else if (kind == "measurement_set") {
        check_field(j, "device", "string", problems);
        check_field(j, "procedure", "string", problems);
        check_field(j, "ndr", "number", problems);
        check_field(j, "valid", "boolean", problems);
        check_field(j, "samples", "array", problems);
        check_field(j, "provenance", "object", problems);
        if (problems.empty()) {
            try {
                (void)measurement_set_from_json(j);
            } catch (const std::exception& e) {
                problems.push_back(e.what());
            }
        }
    } else if (kind == "device_report") {
        check_field(j, "device", "string", problems);
        check_field(j, "results", "array", problems);
        check_field(j, "validity", "array", problems);
        check_field(j, "config_digest", "object", problems);
        if (problems.empty()) {
            try {
                (void)device_report_from_json(j);
            } catch (const std::exception& e) {
                problems.push_back(e.what());
            }
        }
    } else if (kind == "comparison") {
        check_field(j, "metric", "string", problems);
        check_field(j, "rows", "array", problems);
    } else {
        problems.push_back("unknown document kind '" + kind + "'");
    }
    return problems;
}

}  // namespace greenbench
