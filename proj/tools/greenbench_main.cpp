// greenbench CLI: runs benchmark scenarios against simulated devices and
// renders the resulting artifacts. Links only the public C API. stdout
// carries the requested artifact; everything else goes to stderr.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "greenbench.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInvalid = 2;

struct OwnedString {
    char* ptr = nullptr;
    ~OwnedString() { gb_string_free(ptr); }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int complain(int rc) {
    std::cerr << "error: " << gb_last_error() << " (" << gb_strerror(rc) << ")\n";
    return kExitError;
}

bool check_format(const std::string& format) {
    return format == "json" || format == "csv" || format == "table";
}

struct RunResult {
    fs::path scenario;
    int rc = GB_OK;
    std::string error;
    json summary;
};

RunResult run_one(const fs::path& scenario, const std::string& out_dir,
                  const std::optional<unsigned long long>& seed) {
    RunResult result;
    result.scenario = scenario;
    OwnedString summary;
    const unsigned long long* seed_ptr = seed ? &*seed : nullptr;
    result.rc = gb_run_scenario(scenario.string().c_str(), out_dir.c_str(), seed_ptr,
                                &summary.ptr);
    if (result.rc == GB_OK) {
        result.summary = json::parse(summary.str());
    } else {
        result.error = gb_last_error();
    }
    return result;
}

int cmd_run(const std::string& target, const std::string& out_dir, const std::string& format,
            std::optional<unsigned long long> seed) {
    fs::path path(target);
    if (!fs::exists(path)) {
        std::cerr << "error: '" << target << "' does not exist\n";
        return kExitError;
    }

    if (fs::is_directory(path)) {
        std::vector<fs::path> scenarios;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                scenarios.push_back(entry.path());
            }
        }
        std::sort(scenarios.begin(), scenarios.end());
        if (scenarios.empty()) {
            std::cerr << "error: no scenario files in '" << target << "'\n";
            return kExitError;
        }

        // Scenarios share nothing, so a directory fans out across threads;
        // results are reassembled in input order.
        std::vector<RunResult> results(scenarios.size());
        unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, scenarios.size());
        std::size_t next = 0;
        std::mutex mu;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= scenarios.size()) return;
                        i = next++;
                    }
                    results[i] = run_one(scenarios[i], out_dir, seed);
                }
            });
        }
        for (std::thread& t : pool) t.join();

        json out = json::array();
        bool any_error = false;
        bool any_invalid = false;
        for (const RunResult& r : results) {
            if (r.rc != GB_OK) {
                any_error = true;
                std::cerr << r.scenario.string() << ": error: " << r.error << "\n";
                out.push_back(json{{"scenario", r.scenario.string()},
                                   {"error", r.error},
                                   {"code", r.rc}});
                continue;
            }
            json entry = r.summary;
            entry["scenario"] = r.scenario.string();
            if (!entry.value("valid", true)) any_invalid = true;
            out.push_back(std::move(entry));
        }
        std::cout << out.dump(2) << "\n";
        if (any_error) return kExitError;
        return any_invalid ? kExitInvalid : kExitOk;
    }

    RunResult r = run_one(path, out_dir, seed);
    if (r.rc != GB_OK) return complain(r.rc);

    std::string report_file = r.summary.value("report_file", "");
    OwnedString rendered;
    if (int rc = gb_export_file(report_file.c_str(), format.c_str(), &rendered.ptr)) {
        return complain(rc);
    }
    std::cout << rendered.str();
    if (format == "json" && rendered.str().back() != '\n') std::cout << "\n";

    std::cerr << "report: " << report_file << "\n";
    for (const auto& f : r.summary.value("measurement_files", json::array())) {
        std::cerr << "measurements: " << f.get<std::string>() << "\n";
    }
    if (!r.summary.value("valid", true)) {
        for (const auto& reason : r.summary.value("invalid_reasons", json::array())) {
            std::cerr << "invalidated: " << reason.get<std::string>() << "\n";
        }
        return kExitInvalid;
    }
    return kExitOk;
}

int cmd_metrics(const std::string& file, const std::string& metric, const std::string& format,
                const std::string& weights_csv) {
    const double* weights3 = nullptr;
    double buf[3];
    if (!weights_csv.empty()) {
        std::stringstream ss(weights_csv);
        std::string token;
        std::size_t n = 0;
        while (std::getline(ss, token, ',')) {
            try {
                if (n < 3) buf[n] = std::stod(token);
            } catch (const std::exception&) {
                n = 4;
                break;
            }
            ++n;
        }
        if (n != 3) {
            std::cerr << "error: --weights takes three comma-separated values (alpha,beta,epsilon)\n";
            return kExitError;
        }
        weights3 = buf;
    }
    OwnedString result;
    int rc = gb_metrics_from_file(file.c_str(), metric.c_str(), weights3, &result.ptr);
    if (rc == GB_ERR_INVALID_MEASUREMENT_SET) {
        std::cerr << "error: refusing to compute metrics on invalidated test ("
                  << gb_last_error() << ")\n";
        return kExitError;
    }
    if (rc != GB_OK) return complain(rc);

    if (format == "json") {
        std::cout << result.str();
        return kExitOk;
    }
    // Round-trip through the typed renderers without re-parsing by hand.
    json j = json::parse(result.str());
    if (format == "csv") {
        std::string line = "metric,value,units\r\n";
        line += j.at("kind").get<std::string>() + ",";
        std::ostringstream v;
        v.precision(17);
        v << j.at("value").get<double>();
        line += v.str() + "," + j.at("units").get<std::string>() + "\r\n";
        std::cout << line;
    } else {
        char buf2[64];
        std::snprintf(buf2, sizeof(buf2), "%#.4g", j.at("value").get<double>());
        std::cout << j.at("kind").get<std::string>() << "  " << buf2 << "  "
                  << j.at("units").get<std::string>() << "\n";
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& files, const std::string& metric,
                const std::string& format) {
    std::vector<const char*> paths;
    paths.reserve(files.size());
    for (const std::string& f : files) paths.push_back(f.c_str());
    OwnedString rendered;
    int rc = gb_compare_reports(paths.data(), paths.size(), metric.c_str(), format.c_str(),
                                &rendered.ptr);
    if (rc != GB_OK) return complain(rc);
    std::cout << rendered.str();
    return kExitOk;
}

int cmd_validate(const std::vector<std::string>& files) {
    json out = json::object();
    bool all_ok = true;
    for (const std::string& f : files) {
        OwnedString diag;
        int rc = gb_validate_file(f.c_str(), &diag.ptr);
        if (rc == GB_OK) {
            out[f] = json::array();
        } else if (rc == GB_ERR_VALIDATION && diag.ptr) {
            out[f] = json::parse(diag.str());
            all_ok = false;
        } else {
            out[f] = json::array({std::string(gb_last_error())});
            all_ok = false;
        }
    }
    std::cout << out.dump(2) << "\n";
    return all_ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-efficiency benchmarking for simulated network devices"};
    app.require_subcommand(1);

    std::string target;
    std::string out_dir = ".";
    std::string format = "json";
    std::string metric;
    std::string weights_csv;
    std::vector<std::string> files;
    std::optional<unsigned long long> seed;
    unsigned long long seed_value = 0;

    CLI::App* run = app.add_subcommand("run", "Run a scenario file or a directory of scenarios");
    run->add_option("scenario", target, "Scenario file or directory")->required();
    run->add_option("--out", out_dir, "Directory for measurement and report artifacts");
    run->add_option("--format", format, "Output format: json, csv, table");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_value, "Override the orchestrator seed");

    CLI::App* metrics = app.add_subcommand("metrics", "Compute a metric from a measurement file");
    metrics->add_option("measurement", target, "Measurement file")->required();
    metrics->add_option("--metric", metric, "ecr, teeer, teer_atis, eer_vl, eer_ex")->required();
    metrics->add_option("--weights", weights_csv, "Weight profile as alpha,beta,epsilon");
    metrics->add_option("--format", format, "Output format: json, csv, table");

    CLI::App* compare = app.add_subcommand("compare", "Compare reports on one metric");
    compare->add_option("reports", files, "Report files")->required()->expected(-1);
    compare->add_option("--metric", metric, "Metric to compare")->required();
    compare->add_option("--format", format, "Output format: json, csv, table");

    CLI::App* validate = app.add_subcommand("validate", "Schema-validate artifact files");
    validate->add_option("files", files, "Files to check")->required()->expected(-1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's exit-code zoo onto the documented 0/1 contract.
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    if (!check_format(format)) {
        std::cerr << "error: unknown format '" << format << "'\n";
        return kExitError;
    }
    if (seed_opt->count() > 0) seed = seed_value;

    try {
        if (run->parsed()) return cmd_run(target, out_dir, format, seed);
        if (metrics->parsed()) return cmd_metrics(target, metric, format, weights_csv);
        if (compare->parsed()) return cmd_compare(files, metric, format);
        if (validate->parsed()) return cmd_validate(files);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << "error: no subcommand\n";
    return kExitError;
}
