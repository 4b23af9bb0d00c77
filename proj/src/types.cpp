#include "greenbench/types.hpp"

#include <cmath>
#include <sstream>

namespace greenbench {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) fail(Errc::validation, std::string(what) + " must be finite");
}

}  // namespace

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::ok: return "ok";
        case Errc::io: return "io error";
        case Errc::parse: return "parse error";
        case Errc::validation: return "validation error";
        case Errc::zero_throughput: return "zero throughput";
        case Errc::nonpositive_power: return "non-positive weighted power";
        case Errc::reduced_exceeds_full: return "reduced throughput exceeds full";
        case Errc::state_order_violation: return "power-state order violation";
        case Errc::unknown_interface_class: return "unknown interface class";
        case Errc::missing_packet_size: return "missing packet size";
        case Errc::packet_size_unknown: return "packet size unknown to device";
        case Errc::unknown_state: return "unknown power state";
        case Errc::no_passing_rate: return "no passing rate";
        case Errc::warmup_timeout: return "warm-up timeout";
        case Errc::unexpected_loss: return "unexpected loss at peak";
        case Errc::invalid_measurement_set: return "invalidated measurement set";
        case Errc::metric_absent: return "metric absent";
        case Errc::bad_argument: return "bad argument";
        case Errc::internal: return "internal error";
    }
    return "unknown error";
}

Throughput::Throughput(double value) : gbps(value) {
    require_finite(value, "throughput");
    if (value < 0.0) fail(Errc::validation, "throughput must be non-negative");
}

AvgPower::AvgPower(double value) : watts(value) {
    require_finite(value, "power");
    if (value < 0.0) fail(Errc::validation, "power must be non-negative");
}

WeightProfile::WeightProfile(double a, double b, double e, double reduced_fraction)
    : alpha(a), beta(b), epsilon(e), reduced_load_fraction(reduced_fraction) {
    validate();
}

void WeightProfile::validate() const {
    require_finite(alpha, "alpha");
    require_finite(beta, "beta");
    require_finite(epsilon, "epsilon");
    for (double w : {alpha, beta, epsilon}) {
        if (w < 0.0 || w > 1.0) fail(Errc::validation, "weights must lie in [0, 1]");
    }
    if (std::fabs(alpha + beta + epsilon - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os << "weights must sum to 1 (got " << alpha + beta + epsilon << ")";
        fail(Errc::validation, os.str());
    }
    if (!(reduced_load_fraction > 0.0 && reduced_load_fraction < 1.0)) {
        fail(Errc::validation, "reduced_load_fraction must lie in (0, 1)");
    }
}

namespace phase {
std::string state(int id) { return "state-" + std::to_string(id); }
}  // namespace phase

void MeasurementSample::validate() const {
    if (phase.empty()) fail(Errc::validation, "sample phase label must not be empty");
    if (load_fraction < 0.0 || load_fraction > 1.0) {
        fail(Errc::validation, "sample load_fraction must lie in [0, 1]");
    }
    if (delivered.gbps > offered.gbps) {
        fail(Errc::validation, "delivered throughput must not exceed offered");
    }
    if (!(duration_s > 0.0)) fail(Errc::validation, "sample duration must be positive");
    if (packet_size_bytes == 0) fail(Errc::validation, "packet size must be positive");
}

void MeasurementSet::invalidate(const std::string& reason) {
    valid = false;
    invalidation_reason = reason;
}

void MeasurementSet::validate() const {
    if (valid && invalidation_reason.has_value()) {
        fail(Errc::validation, "a valid set must carry no invalidation_reason");
    }
    if (!valid && (!invalidation_reason || invalidation_reason->empty())) {
        fail(Errc::validation, "an invalid set must carry an invalidation_reason");
    }
    for (const auto& s : samples) s.validate();
}

const MeasurementSample* MeasurementSet::find_phase(const std::string& label) const {
    for (const auto& s : samples) {
        if (s.phase == label) return &s;
    }
    return nullptr;
}

const MeasurementSample& MeasurementSet::require_phase(const std::string& label) const {
    const MeasurementSample* s = find_phase(label);
    if (!s) fail(Errc::validation, "measurement set has no '" + label + "' phase");
    return *s;
}

const char* metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::ecr: return "ECR";
        case MetricKind::teeer: return "TEEER";
        case MetricKind::teer_atis: return "TEER_ATIS";
        case MetricKind::eer_vl: return "EER_VL";
        case MetricKind::eer_ex: return "EER_EX";
        case MetricKind::allowance: return "ALLOWANCE";
        case MetricKind::weighted_peak: return "WEIGHTED_PEAK";
    }
    fail(Errc::internal, "unhandled metric kind");
}

MetricKind metric_kind_from_name(const std::string& name) {
    std::string up;
    up.reserve(name.size());
    for (char c : name) up.push_back(c >= 'a' && c <= 'z' ? static_cast<char>(c - 'a' + 'A') : c);
    if (up == "ECR") return MetricKind::ecr;
    if (up == "TEEER") return MetricKind::teeer;
    if (up == "TEER_ATIS" || up == "TEER") return MetricKind::teer_atis;
    if (up == "EER_VL" || up == "EER-VL") return MetricKind::eer_vl;
    if (up == "EER_EX" || up == "EER-EX") return MetricKind::eer_ex;
    if (up == "ALLOWANCE") return MetricKind::allowance;
    if (up == "WEIGHTED_PEAK") return MetricKind::weighted_peak;
    fail(Errc::bad_argument, "unknown metric kind '" + name + "'");
}

const char* metric_units(MetricKind kind) {
    switch (kind) {
        case MetricKind::ecr: return "W/Gbps";
        case MetricKind::teeer: return "dimensionless";
        case MetricKind::teer_atis:
        case MetricKind::eer_vl:
        case MetricKind::eer_ex: return "Gbps/W";
        case MetricKind::allowance: return "W";
        case MetricKind::weighted_peak: return "Gbps";
    }
    fail(Errc::internal, "unhandled metric kind");
}

bool metric_higher_is_better(MetricKind kind) {
    switch (kind) {
        case MetricKind::ecr:
        case MetricKind::allowance: return false;
        case MetricKind::teeer:
        case MetricKind::teer_atis:
        case MetricKind::eer_vl:
        case MetricKind::eer_ex:
        case MetricKind::weighted_peak: return true;
    }
    fail(Errc::internal, "unhandled metric kind");
}

MetricResult MetricResult::make(MetricKind kind, double value,
                                std::map<std::string, double> inputs) {
    require_finite(value, "metric value");
    MetricResult r;
    r.kind = kind;
    r.value = value;
    r.units = metric_units(kind);
    r.inputs = std::move(inputs);
    return r;
}

void AllowanceTable::validate() const {
    for (const auto& [name, watts] : entries) {
        if (!(watts > 0.0) || !std::isfinite(watts)) {
            fail(Errc::validation, "allowance for '" + name + "' must be positive");
        }
    }
}

void PacketSizeWeights::validate() const {
    if (entries.empty()) fail(Errc::validation, "packet size weights must not be empty");
    double sum = 0.0;
    std::uint32_t prev = 0;
    bool first = true;
    for (const auto& [size, weight] : entries) {
        if (size == 0) fail(Errc::validation, "packet sizes must be positive");
        if (!first && size <= prev) {
            fail(Errc::validation, "packet sizes must be strictly increasing");
        }
        if (weight < 0.0 || weight > 1.0 || !std::isfinite(weight)) {
            fail(Errc::validation, "packet size weights must lie in [0, 1]");
        }
        sum += weight;
        prev = size;
        first = false;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "packet size weights must sum to 1 (got " << sum << ")";
        fail(Errc::validation, os.str());
    }
}

// --- JSON codecs ---------------------------------------------------------

namespace {

double get_number(const json& j, const char* key) {
    if (!j.contains(key)) fail(Errc::parse, std::string("missing field '") + key + "'");
    const json& v = j.at(key);
    if (!v.is_number()) fail(Errc::parse, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::string get_string(const json& j, const char* key) {
    if (!j.contains(key)) fail(Errc::parse, std::string("missing field '") + key + "'");
    const json& v = j.at(key);
    if (!v.is_string()) fail(Errc::parse, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

}  // namespace

json to_json(const WeightProfile& profile) {
    return json{{"alpha", profile.alpha},
                {"beta", profile.beta},
                {"epsilon", profile.epsilon},
                {"reduced_load_fraction", profile.reduced_load_fraction}};
}

WeightProfile weight_profile_from_json(const json& j) {
    WeightProfile p;
    p.alpha = get_number(j, "alpha");
    p.beta = get_number(j, "beta");
    p.epsilon = get_number(j, "epsilon");
    p.reduced_load_fraction =
        j.contains("reduced_load_fraction") ? get_number(j, "reduced_load_fraction") : 0.3;
    p.validate();
    return p;
}

json to_json(const MeasurementSample& sample) {
    return json{{"phase", sample.phase},
                {"load_fraction", sample.load_fraction},
                {"offered", sample.offered.gbps},
                {"delivered", sample.delivered.gbps},
                {"power", sample.power.watts},
                {"duration_s", sample.duration_s},
                {"packet_size_bytes", sample.packet_size_bytes}};
}

MeasurementSample sample_from_json(const json& j) {
    MeasurementSample s;
    s.phase = get_string(j, "phase");
    s.load_fraction = get_number(j, "load_fraction");
    s.offered = Throughput(get_number(j, "offered"));
    s.delivered = Throughput(get_number(j, "delivered"));
    s.power = AvgPower(get_number(j, "power"));
    s.duration_s = get_number(j, "duration_s");
    s.packet_size_bytes = j.at("packet_size_bytes").get<std::uint32_t>();
    s.validate();
    return s;
}

json to_json(const Provenance& provenance) {
    json j{{"config_hash", provenance.config_hash},
           {"device_seed", provenance.device_seed},
           {"orchestrator_seed", provenance.orchestrator_seed},
           {"warmup_skipped", provenance.warmup_skipped},
           {"packet_sizes", provenance.packet_sizes}};
    if (provenance.weights) j["weights"] = to_json(*provenance.weights);
    return j;
}

Provenance provenance_from_json(const json& j) {
    Provenance p;
    p.config_hash = get_string(j, "config_hash");
    p.device_seed = j.at("device_seed").get<std::uint64_t>();
    p.orchestrator_seed = j.at("orchestrator_seed").get<std::uint64_t>();
    p.warmup_skipped = j.at("warmup_skipped").get<bool>();
    if (j.contains("packet_sizes")) {
        p.packet_sizes = j.at("packet_sizes").get<std::vector<std::uint32_t>>();
    }
    if (j.contains("weights")) p.weights = weight_profile_from_json(j.at("weights"));
    return p;
}

json to_json(const MeasurementSet& set) {
    json samples = json::array();
    for (const auto& s : set.samples) samples.push_back(to_json(s));
    json j{{"kind", "measurement_set"},
           {"device", set.device},
           {"procedure", set.procedure},
           {"ndr", set.ndr.gbps},
           {"valid", set.valid},
           {"samples", std::move(samples)},
           {"provenance", to_json(set.provenance)}};
    if (!set.valid) j["invalidation_reason"] = set.invalidation_reason.value_or("");
    return j;
}

MeasurementSet measurement_set_from_json(const json& j) {
    if (j.value("kind", "") != std::string("measurement_set")) {
        fail(Errc::parse, "not a measurement_set document");
    }
    MeasurementSet set;
    set.device = get_string(j, "device");
    set.procedure = get_string(j, "procedure");
    set.ndr = Throughput(get_number(j, "ndr"));
    set.valid = j.at("valid").get<bool>();
    if (j.contains("invalidation_reason")) {
        set.invalidation_reason = j.at("invalidation_reason").get<std::string>();
    }
    for (const auto& sj : j.at("samples")) set.samples.push_back(sample_from_json(sj));
    set.provenance = provenance_from_json(j.at("provenance"));
    set.validate();
    return set;
}

json to_json(const MetricResult& result) {
    return json{{"kind", metric_kind_name(result.kind)},
                {"value", result.value},
                {"units", result.units},
                {"inputs", result.inputs}};
}

MetricResult metric_result_from_json(const json& j) {
    MetricKind kind = metric_kind_from_name(get_string(j, "kind"));
    std::map<std::string, double> inputs;
    if (j.contains("inputs")) inputs = j.at("inputs").get<std::map<std::string, double>>();
    MetricResult r = MetricResult::make(kind, get_number(j, "value"), std::move(inputs));
    if (j.value("units", r.units) != r.units) {
        fail(Errc::validation, std::string("units mismatch for ") + metric_kind_name(kind));
    }
    return r;
}

}  // namespace greenbench
