#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "greenbench/jsonio.hpp"
#include "greenbench/metrics.hpp"
#include "greenbench/report.hpp"
#include "greenbench/scenario.hpp"

using namespace greenbench;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = GB_FIXTURE_DIR;
const fs::path kWork = GB_WORK_DIR;

fs::path scenario_path(const std::string& name) { return kFixtures / "scenarios" / name; }

fs::path fresh_dir(const std::string& name) {
    fs::path dir = kWork / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
}

Errc code_of(const std::function<void()>& op) {
    try {
        op();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::ok;
}

}  // namespace

TEST_CASE("procedure names round-trip") {
    for (Procedure p : {Procedure::peak, Procedure::variable_load, Procedure::extended_idle,
                        Procedure::full_suite}) {
        CHECK(procedure_from_name(procedure_name(p)) == p);
    }
    CHECK(code_of([] { procedure_from_name("thermal"); }) == Errc::bad_argument);
}

TEST_CASE("scenario files parse their seeds and parameters") {
    Scenario sc = Scenario::load_file(scenario_path("vl_table2.json"));
    CHECK(sc.procedure == Procedure::variable_load);
    CHECK(sc.orchestrator_seed == 21);
    CHECK_FALSE(sc.device_seed_override.has_value());
    CHECK(sc.parameters.at("packet_size_bytes") == 1518);
    CHECK(fs::exists(sc.device_path));
    CHECK(sc.config_hash.size() == 16);
    CHECK(sc.config_hash.find_first_not_of("0123456789abcdef") == std::string::npos);
}

TEST_CASE("the config hash is stable and tracks the effective seed") {
    Scenario a = Scenario::load_file(scenario_path("vl_table2.json"));
    Scenario b = Scenario::load_file(scenario_path("vl_table2.json"));
    CHECK(a.config_hash == b.config_hash);

    Scenario forced = Scenario::load_file(scenario_path("vl_table2.json"), 99);
    CHECK(forced.orchestrator_seed == 99);
    CHECK(forced.config_hash != a.config_hash);
    Scenario again = Scenario::load_file(scenario_path("vl_table2.json"), 99);
    CHECK(forced.config_hash == again.config_hash);
}

TEST_CASE("non-scenario documents are rejected") {
    CHECK(code_of([] {
              (void)Scenario::load_file(kFixtures / "devices" / "table2_router.json");
          }) == Errc::parse);
}

TEST_CASE("device paths resolve beside the scenario and via the fixture root") {
    fs::path dir = fresh_dir("resolve");
    CHECK(resolve_device_path((kFixtures / "devices" / "table2_router.json").string(), dir) ==
          kFixtures / "devices" / "table2_router.json");

    write_text(dir / "local.json", "{}");
    CHECK(resolve_device_path("local.json", dir) == dir / "local.json");

    setenv("GREENBENCH_FIXTURES", kFixtures.c_str(), 1);
    CHECK(resolve_device_path("table2_router.json", dir) ==
          kFixtures / "devices" / "table2_router.json");
    unsetenv("GREENBENCH_FIXTURES");

    CHECK(code_of([&] { resolve_device_path("no_such_device.json", dir); }) == Errc::io);
    CHECK(code_of([&] { resolve_device_path("/no/such/abs.json", dir); }) == Errc::io);
}

TEST_CASE("running a scenario writes named measurement and report files") {
    fs::path dir = fresh_dir("vl_run");
    Scenario sc = Scenario::load_file(scenario_path("vl_table2.json"));
    RunOutcome outcome = run_scenario(sc, dir);

    CHECK(outcome.valid);
    CHECK(outcome.invalid_reasons.empty());
    REQUIRE(outcome.measurement_files.size() == 1);
    CHECK(outcome.measurement_files[0].filename().string() ==
          "table2_router_variable_load_" + sc.config_hash + ".json");
    CHECK(outcome.report_file.filename().string() ==
          "table2_router_variable_load_" + sc.config_hash + ".report.json");
    CHECK(fs::exists(outcome.measurement_files[0]));
    CHECK(fs::exists(outcome.report_file));

    MeasurementSet set = measurement_set_from_json(parse_json_file(outcome.measurement_files[0]));
    CHECK(set.provenance.config_hash == sc.config_hash);
    CHECK(set.require_phase(phase::reduced).power.watts == 801.0);

    DeviceReport report = device_report_from_json(parse_json_file(outcome.report_file));
    const MetricResult* vl = report.find_metric(MetricKind::eer_vl);
    REQUIRE(vl != nullptr);
    CHECK(vl->value == doctest::Approx(0.049489638107021346).epsilon(1e-12));
}

TEST_CASE("identical scenario runs produce identical artifacts") {
    fs::path dir = fresh_dir("det");
    RunOutcome first = run_scenario_file(scenario_path("vl_table2.json"), dir);
    std::string measurement = read_file(first.measurement_files[0]);
    std::string report = read_file(first.report_file);
    RunOutcome second = run_scenario_file(scenario_path("vl_table2.json"), dir);
    CHECK(read_file(second.measurement_files[0]) == measurement);
    CHECK(read_file(second.report_file) == report);
}

TEST_CASE("full suite on a single-state device skips extended idle") {
    fs::path dir = fresh_dir("full");
    RunOutcome outcome = run_scenario_file(scenario_path("full_table2.json"), dir);
    CHECK(outcome.valid);
    REQUIRE(outcome.sets.size() == 3);
    CHECK(outcome.report.validity[0].procedure == "peak");
    CHECK(outcome.report.validity[1].procedure == "three_point");
    CHECK(outcome.report.validity[2].procedure == "variable_load");
    CHECK(outcome.report.find_metric(MetricKind::eer_ex) == nullptr);
    CHECK(outcome.report.find_metric(MetricKind::teeer) != nullptr);
    CHECK(outcome.report.find_metric(MetricKind::teer_atis) != nullptr);
    CHECK(outcome.report.find_metric(MetricKind::allowance) != nullptr);
    CHECK(outcome.report.config_digest.packet_sizes == std::vector<std::uint32_t>{64, 1518});
}

TEST_CASE("an invalidated run is reported as data, not an error") {
    fs::path dir = fresh_dir("cheat");
    RunOutcome outcome = run_scenario_file(scenario_path("cheater_vl.json"), dir);
    CHECK_FALSE(outcome.valid);
    REQUIRE(outcome.invalid_reasons.size() == 1);
    CHECK(outcome.invalid_reasons[0] ==
          std::string("variable_load: ") + kProbeViolationReason);
    CHECK(outcome.report.results.empty());  // no metrics from poisoned data
    REQUIRE(outcome.report.validity.size() == 1);
    CHECK_FALSE(outcome.report.validity[0].valid);
    CHECK(fs::exists(outcome.measurement_files[0]));  // samples are still preserved
}

TEST_CASE("metrics recompute from measurement files") {
    fs::path dir = fresh_dir("recompute");
    RunOutcome outcome = run_scenario_file(scenario_path("vl_table2.json"), dir);
    MeasurementSet set = measurement_set_from_json(parse_json_file(outcome.measurement_files[0]));

    MetricResult from_provenance = metric_from_measurement(set, MetricKind::eer_vl, std::nullopt);
    CHECK(from_provenance.value == outcome.report.find_metric(MetricKind::eer_vl)->value);

    WeightProfile override_w{0.25, 0.5, 0.25, 0.3};
    MetricResult overridden = metric_from_measurement(set, MetricKind::eer_vl, override_w);
    CHECK(overridden.value == from_provenance.value);

    // The 30% reduced point cannot stand in for the 50% reference.
    CHECK(code_of([&] { metric_from_measurement(set, MetricKind::teeer, std::nullopt); }) ==
          Errc::validation);
    CHECK(code_of([&] { metric_from_measurement(set, MetricKind::allowance, std::nullopt); }) ==
          Errc::bad_argument);
    CHECK(code_of([&] {
              metric_from_measurement(set, MetricKind::weighted_peak, std::nullopt);
          }) == Errc::bad_argument);
}

TEST_CASE("three-point measurements feed teeer and its atis variant") {
    fs::path dir = fresh_dir("tp_metrics");
    RunOutcome outcome = run_scenario_file(scenario_path("full_table2.json"), dir);
    MeasurementSet set;
    for (const fs::path& file : outcome.measurement_files) {
        if (file.filename().string().find("three_point") != std::string::npos) {
            set = measurement_set_from_json(parse_json_file(file));
        }
    }
    REQUIRE(!set.samples.empty());
    MetricResult teeer = metric_from_measurement(set, MetricKind::teeer, std::nullopt);
    CHECK(teeer.value == doctest::Approx(-0.90899407814025120).epsilon(1e-12));
    MetricResult atis = metric_from_measurement(set, MetricKind::teer_atis, std::nullopt);
    CHECK(atis.value == doctest::Approx(0.12331216474505210).epsilon(1e-12));
    MetricResult ecr = metric_from_measurement(set, MetricKind::ecr, std::nullopt);
    CHECK(atis.value > 1.0 / ecr.value);
}

TEST_CASE("invalidated measurements refuse metric computation") {
    fs::path dir = fresh_dir("refuse");
    RunOutcome outcome = run_scenario_file(scenario_path("cheater_vl.json"), dir);
    MeasurementSet set = measurement_set_from_json(parse_json_file(outcome.measurement_files[0]));
    CHECK(code_of([&] { metric_from_measurement(set, MetricKind::eer_vl, std::nullopt); }) ==
          Errc::invalid_measurement_set);
}

TEST_CASE("variable-load metrics need an explicit weight profile") {
    fs::path dir = fresh_dir("no_weights");
    json sc{{"kind", "scenario"},
            {"device", (kFixtures / "devices" / "table2_router.json").string()},
            {"procedure", "variable_load"},
            {"seeds", json{{"orchestrator", 3}}},
            {"parameters", json{{"ndr_gbps", 100.0}, {"packet_size_bytes", 1518}}}};
    fs::path file = dir / "no_weights.json";
    write_text(file, canonical_dump(sc));
    CHECK(code_of([&] { run_scenario_file(file, dir); }) == Errc::bad_argument);

    json ex = sc;
    ex["procedure"] = "extended_idle";
    ex["device"] = (kFixtures / "devices" / "three_state.json").string();
    fs::path ex_file = dir / "no_weights_ex.json";
    write_text(ex_file, canonical_dump(ex));
    CHECK(code_of([&] { run_scenario_file(ex_file, dir); }) == Errc::bad_argument);

    // A measurement set without recorded weights needs the caller to supply them.
    RunOutcome good = run_scenario_file(scenario_path("vl_table2.json"), dir);
    MeasurementSet set = measurement_set_from_json(parse_json_file(good.measurement_files[0]));
    set.provenance.weights.reset();
    CHECK(code_of([&] { metric_from_measurement(set, MetricKind::eer_vl, std::nullopt); }) ==
          Errc::bad_argument);
    CHECK_NOTHROW(metric_from_measurement(set, MetricKind::eer_vl, WeightProfile{0.25, 0.5, 0.25, 0.3}));
}

TEST_CASE("warm-up handling is recorded in provenance") {
    fs::path skip_dir = fresh_dir("warm_skip");
    RunOutcome skipped = run_scenario_file(scenario_path("warmup_skip_peak.json"), skip_dir);
    MeasurementSet cold = measurement_set_from_json(parse_json_file(skipped.measurement_files[0]));
    CHECK(cold.provenance.warmup_skipped);

    fs::path eq_dir = fresh_dir("warm_eq");
    RunOutcome equalized = run_scenario_file(scenario_path("warmup_equalized_peak.json"), eq_dir);
    MeasurementSet warm = measurement_set_from_json(parse_json_file(equalized.measurement_files[0]));
    CHECK_FALSE(warm.provenance.warmup_skipped);

    double cold_ecr = skipped.report.find_metric(MetricKind::ecr)->value;
    double warm_ecr = equalized.report.find_metric(MetricKind::ecr)->value;
    CHECK(cold_ecr < warm_ecr);  // the cold device under-reports its draw
}

TEST_CASE("every shipped fixture passes schema validation") {
    for (const auto& entry : fs::directory_iterator(kFixtures / "devices")) {
        CAPTURE(entry.path().string());
        CHECK(validate_file(entry.path()).empty());
    }
    for (const auto& entry : fs::directory_iterator(kFixtures / "scenarios")) {
        CAPTURE(entry.path().string());
        CHECK(validate_file(entry.path()).empty());
    }
}

TEST_CASE("generated artifacts pass schema validation") {
    fs::path dir = fresh_dir("validate_artifacts");
    RunOutcome outcome = run_scenario_file(scenario_path("full_table2.json"), dir);
    for (const fs::path& file : outcome.measurement_files) {
        CHECK(validate_file(file).empty());
    }
    CHECK(validate_file(outcome.report_file).empty());
}

TEST_CASE("schema validation names each violated field") {
    fs::path dir = fresh_dir("validate_bad");

    json device = parse_json_file(kFixtures / "devices" / "table2_router.json");
    device.erase("states");
    write_text(dir / "missing_states.json", canonical_dump(device));
    std::vector<std::string> problems = validate_file(dir / "missing_states.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "missing field 'states'");

    device = parse_json_file(kFixtures / "devices" / "table2_router.json");
    device["states"][0]["curve"] = json::array({json::array({0.0, 863.0}), json::array({1.0, 768.0})});
    write_text(dir / "decreasing.json", canonical_dump(device));
    problems = validate_file(dir / "decreasing.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "power curve must be nondecreasing");

    json scenario = parse_json_file(scenario_path("vl_table2.json"));
    scenario["parameters"]["weights"]["epsilon"] = 0.15;  // sums to 0.9
    write_text(dir / "bad_weights.json", canonical_dump(scenario));
    problems = validate_file(dir / "bad_weights.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0].find("sum to 1") != std::string::npos);

    scenario = parse_json_file(scenario_path("vl_table2.json"));
    scenario["procedure"] = "thermal";
    write_text(dir / "bad_proc.json", canonical_dump(scenario));
    problems = validate_file(dir / "bad_proc.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "unknown procedure 'thermal'");

    write_text(dir / "not_json.json", "{ nope");
    CHECK_FALSE(validate_file(dir / "not_json.json").empty());

    write_text(dir / "array.json", "[]");
    problems = validate_file(dir / "array.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "document root must be an object");

    write_text(dir / "no_kind.json", "{}");
    problems = validate_file(dir / "no_kind.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "missing field 'kind'");

    write_text(dir / "alien.json", "{\"kind\": \"mystery\"}");
    problems = validate_file(dir / "alien.json");
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "unknown document kind 'mystery'");
}

TEST_CASE("device seed overrides flow into provenance") {
    fs::path dir = fresh_dir("device_seed");
    json sc = parse_json_file(scenario_path("vl_table2.json"));
    sc["device"] = (kFixtures / "devices" / "table2_router.json").string();
    sc["seeds"]["device"] = 777;
    fs::path file = dir / "seeded.json";
    write_text(file, canonical_dump(sc));
    Scenario loaded = Scenario::load_file(file);
    REQUIRE(loaded.device_seed_override.has_value());
    CHECK(*loaded.device_seed_override == 777);
    RunOutcome outcome = run_scenario(loaded, dir);
    CHECK(outcome.sets[0].provenance.device_seed == 777);
    CHECK(outcome.report.config_digest.device_seed == 777);
}
