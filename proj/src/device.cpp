#include "greenbench/device.hpp"

#include <algorithm>
#include <cmath>

#include "greenbench/jsonio.hpp"

namespace greenbench {

void PowerCurve::validate() const {
    if (points.size() < 2) fail(Errc::validation, "power curve needs at least two points");
    if (points.front().first != 0.0) fail(Errc::validation, "power curve must start at load 0");
    if (points.back().first != 1.0) fail(Errc::validation, "power curve must end at load 1");
    double prev_load = -1.0;
    double prev_power = -1.0;
    for (const auto& [load, watts] : points) {
        if (!std::isfinite(load) || !std::isfinite(watts)) {
            fail(Errc::validation, "power curve points must be finite");
        }
        if (load <= prev_load) fail(Errc::validation, "power curve loads must strictly increase");
        if (watts < 0.0) fail(Errc::validation, "power curve watts must be non-negative");
        if (watts < prev_power) fail(Errc::validation, "power curve must be nondecreasing");
        prev_load = load;
        prev_power = watts;
    }
}

double PowerCurve::power_at(double load_fraction) const {
    if (!(load_fraction >= 0.0 && load_fraction <= 1.0)) {
        fail(Errc::bad_argument, "load fraction must lie in [0, 1]");
    }
    // Knots are returned verbatim so tabulated powers survive untouched.
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].first == load_fraction) return points[i].second;
        if (points[i].first > load_fraction) {
            const auto& [x0, y0] = points[i - 1];
            const auto& [x1, y1] = points[i];
            double t = (load_fraction - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
    }
    return points.back().second;
}

double WarmupModel::factor(double t_on_s) const {
    double t = t_on_s < 0.0 ? 0.0 : t_on_s;
    return 1.0 - delta * std::exp(-t / tau_s);
}

void DeviceModel::validate() const {
    if (name.empty()) fail(Errc::validation, "device name must not be empty");
    if (!(line_rate.gbps > 0.0)) fail(Errc::validation, "line rate must be positive");
    if (ndr_gbps_by_packet_size.empty()) {
        fail(Errc::validation, "device needs at least one packet-size NDR");
    }
    for (const auto& [size, rate] : ndr_gbps_by_packet_size) {
        if (size == 0) fail(Errc::validation, "packet sizes must be positive");
        if (!(rate > 0.0) || !std::isfinite(rate)) {
            fail(Errc::validation, "NDR must be positive and finite");
        }
        if (rate > line_rate.gbps) fail(Errc::validation, "NDR must not exceed line rate");
    }
    if (states.empty()) fail(Errc::validation, "device needs at least one power state");
    double prev_capacity = 2.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const PowerState& st = states[i];
        if (st.id != static_cast<int>(i)) {
            fail(Errc::state_order_violation, "state ids must be consecutive from 0");
        }
        if (!(st.capacity_fraction >= 0.0 && st.capacity_fraction <= 1.0)) {
            fail(Errc::validation, "capacity fraction must lie in [0, 1]");
        }
        if (i == 0 && st.capacity_fraction != 1.0) {
            fail(Errc::state_order_violation, "state 0 must have full capacity");
        }
        if (i == 0 && st.exit_latency_s != 0.0) {
            fail(Errc::validation, "state 0 must have zero exit latency");
        }
        if (st.capacity_fraction >= prev_capacity) {
            fail(Errc::state_order_violation, "capacity must strictly decrease with state id");
        }
        if (st.enter_latency_s < 0.0 || st.exit_latency_s < 0.0) {
            fail(Errc::validation, "state latencies must be non-negative");
        }
        st.curve.validate();
        prev_capacity = st.capacity_fraction;
    }
    if (warmup) {
        if (!(warmup->delta >= 0.0 && warmup->delta < 1.0)) {
            fail(Errc::validation, "warmup delta must lie in [0, 1)");
        }
        if (!(warmup->tau_s > 0.0)) fail(Errc::validation, "warmup tau must be positive");
    }
    if (cheat) {
        if (cheat->kind != "scheduled_downshift") {
            fail(Errc::validation, "unknown cheat kind '" + cheat->kind + "'");
        }
        double prev_end = 0.0;
        for (const CheatWindow& w : cheat->schedule) {
            if (w.start_s < prev_end) {
                fail(Errc::validation, "cheat windows must be ordered and disjoint");
            }
            if (!(w.end_s > w.start_s)) fail(Errc::validation, "cheat window must have span");
            if (w.target_state < 0 || w.target_state >= static_cast<int>(states.size())) {
                fail(Errc::unknown_state, "cheat window targets an unknown state");
            }
            prev_end = w.end_s;
        }
    }
    for (const auto& [klass, count] : interfaces) {
        if (klass.empty()) fail(Errc::validation, "interface class name must not be empty");
        if (count == 0) fail(Errc::validation, "interface count must be positive");
    }
    if (!(step_s > 0.0) || !std::isfinite(step_s)) {
        fail(Errc::validation, "sim step must be positive");
    }
}

std::uint32_t DeviceModel::largest_packet_size() const {
    std::uint32_t best = 0;
    for (const auto& [size, rate] : ndr_gbps_by_packet_size) best = std::max(best, size);
    return best;
}

namespace {

PowerCurve curve_from_json(const json& j) {
    PowerCurve c;
    if (!j.is_array()) fail(Errc::parse, "curve must be an array of [load, watts] pairs");
    for (const auto& pt : j) {
        if (!pt.is_array() || pt.size() != 2) {
            fail(Errc::parse, "curve point must be a [load, watts] pair");
        }
        c.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    return c;
}

json curve_to_json(const PowerCurve& c) {
    json j = json::array();
    for (const auto& [load, watts] : c.points) j.push_back(json::array({load, watts}));
    return j;
}

}  // namespace

namespace {

DeviceModel model_from_json_fields(const json& j) {
    DeviceModel m;
    m.name = j.at("name").get<std::string>();
    m.label = j.value("label", "");
    m.line_rate = Throughput(j.at("line_rate").get<double>());
    if (!j.contains("ndr_by_packet_size")) {
        fail(Errc::parse, "missing field 'ndr_by_packet_size'");
    }
    for (const auto& [key, value] : j.at("ndr_by_packet_size").items()) {
        std::size_t used = 0;
        unsigned long size = std::stoul(key, &used);
        if (used != key.size() || size == 0) {
            fail(Errc::parse, "packet size key '" + key + "' is not a positive integer");
        }
        m.ndr_gbps_by_packet_size[static_cast<std::uint32_t>(size)] = value.get<double>();
    }
    for (const auto& sj : j.at("states")) {
        PowerState st;
        st.id = sj.at("id").get<int>();
        st.capacity_fraction = sj.at("capacity_fraction").get<double>();
        st.curve = curve_from_json(sj.at("curve"));
        st.enter_latency_s = sj.value("enter_latency_s", 0.0);
        st.exit_latency_s = sj.value("exit_latency_s", 0.0);
        m.states.push_back(std::move(st));
    }
    if (j.contains("warmup") && !j.at("warmup").is_null()) {
        WarmupModel w;
        w.delta = j.at("warmup").at("delta").get<double>();
        w.tau_s = j.at("warmup").at("tau_s").get<double>();
        m.warmup = w;
    }
    if (j.contains("cheat") && !j.at("cheat").is_null()) {
        CheatBehavior cb;
        cb.kind = j.at("cheat").value("kind", "scheduled_downshift");
        for (const auto& wj : j.at("cheat").at("schedule")) {
            CheatWindow w;
            w.start_s = wj.at("start_s").get<double>();
            w.end_s = wj.at("end_s").get<double>();
            w.target_state = wj.at("target_state_id").get<int>();
            cb.schedule.push_back(w);
        }
        m.cheat = std::move(cb);
    }
    if (j.contains("interfaces")) {
        for (const auto& [klass, count] : j.at("interfaces").items()) {
            m.interfaces[klass] = count.get<std::uint32_t>();
        }
    }
    m.seed = j.value("seed", 0ull);
    m.step_s = j.value("step_s", 0.1);
    m.validate();
    return m;
}

}  // namespace

DeviceModel DeviceModel::from_json(const json& j) {
    if (j.value("kind", "device") != std::string("device")) {
        fail(Errc::parse, "not a device document");
    }
    try {
        return model_from_json_fields(j);
    } catch (const json::exception& e) {
        fail(Errc::parse, e.what());
    }
}

DeviceModel DeviceModel::load_file(const std::filesystem::path& path) {
    return from_json(parse_json_file(path));
}

json DeviceModel::to_json() const {
    json states_j = json::array();
    for (const PowerState& st : states) {
        states_j.push_back(json{{"id", st.id},
                                {"capacity_fraction", st.capacity_fraction},
                                {"curve", curve_to_json(st.curve)},
                                {"enter_latency_s", st.enter_latency_s},
                                {"exit_latency_s", st.exit_latency_s}});
    }
    json ndr_j = json::object();
    for (const auto& [size, rate] : ndr_gbps_by_packet_size) ndr_j[std::to_string(size)] = rate;
    json j{{"kind", "device"},
           {"name", name},
           {"line_rate", line_rate.gbps},
           {"ndr_by_packet_size", std::move(ndr_j)},
           {"states", std::move(states_j)},
           {"seed", seed},
           {"step_s", step_s}};
    if (!label.empty()) j["label"] = label;
    if (warmup) j["warmup"] = json{{"delta", warmup->delta}, {"tau_s", warmup->tau_s}};
    if (cheat) {
        json sched = json::array();
        for (const CheatWindow& w : cheat->schedule) {
            sched.push_back(json{{"start_s", w.start_s},
                                 {"end_s", w.end_s},
                                 {"target_state_id", w.target_state}});
        }
        j["cheat"] = json{{"kind", cheat->kind}, {"schedule", std::move(sched)}};
    }
    if (!interfaces.empty()) {
        json if_j = json::object();
        for (const auto& [klass, count] : interfaces) if_j[klass] = count;
        j["interfaces"] = std::move(if_j);
    }
    return j;
}

void LoadRunStats::merge(const LoadRunStats& other) {
    if (other.steps == 0) return;
    if (steps == 0) {
        *this = other;
        return;
    }
    if (step_s != other.step_s) fail(Errc::internal, "cannot merge stats across step sizes");
    power_sum_w += other.power_sum_w;
    delivered_sum_gbps += other.delivered_sum_gbps;
    steps += other.steps;
}

Device::Device(DeviceModel model) : model_(std::move(model)) {
    model_.validate();
    if (model_.cheat) {
        for (const CheatWindow& w : model_.cheat->schedule) {
            cheat_events_.emplace_back(w.start_s, w.target_state);
            cheat_events_.emplace_back(w.end_s, 0);
        }
        std::sort(cheat_events_.begin(), cheat_events_.end());
    }
}

Throughput Device::ndr(std::uint32_t packet_size_bytes) const {
    auto it = model_.ndr_gbps_by_packet_size.find(packet_size_bytes);
    if (it == model_.ndr_gbps_by_packet_size.end()) {
        fail(Errc::packet_size_unknown,
             "device '" + model_.name + "' has no NDR for packet size " +
                 std::to_string(packet_size_bytes));
    }
    return Throughput(it->second);
}

const PowerState& Device::effective_state() const {
    if (pending_) {
        const PowerState& a = state_at(pending_->from_idx);
        const PowerState& b = state_at(pending_->to_idx);
        return a.capacity_fraction <= b.capacity_fraction ? a : b;
    }
    return state_at(current_idx_);
}

void Device::begin_transition(int target_idx) {
    int base_idx = pending_ ? effective_state().id : current_idx_;
    if (pending_) {
        current_idx_ = base_idx;
        pending_.reset();
    }
    if (target_idx == current_idx_) return;
    const PowerState& from = state_at(current_idx_);
    const PowerState& to = state_at(target_idx);
    double latency =
        to.capacity_fraction < from.capacity_fraction ? to.enter_latency_s : from.exit_latency_s;
    if (latency <= 0.0) {
        current_idx_ = target_idx;
        return;
    }
    pending_ = Transition{current_idx_, target_idx, now_ + latency};
}

double Device::set_power_state(int state_id) {
    if (state_id < 0 || state_id >= static_cast<int>(model_.states.size())) {
        fail(Errc::unknown_state, "device '" + model_.name + "' has no state " +
                                      std::to_string(state_id));
    }
    resolve_events();
    begin_transition(state_id);
    return pending_ ? pending_->complete_time : now_;
}

void Device::resolve_events() {
    for (;;) {
        if (pending_ && now_ >= pending_->complete_time) {
            current_idx_ = pending_->to_idx;
            pending_.reset();
            continue;
        }
        if (next_cheat_event_ < cheat_events_.size() &&
            cheat_events_[next_cheat_event_].first <= now_) {
            begin_transition(cheat_events_[next_cheat_event_].second);
            ++next_cheat_event_;
            continue;
        }
        break;
    }
}

double Device::warm_factor(double t) const {
    return model_.warmup ? model_.warmup->factor(t) : 1.0;
}

double Device::instantaneous_power(double load_fraction, double at_time) const {
    return effective_state().curve.power_at(load_fraction) * warm_factor(at_time);
}

void Device::tick() {
    resolve_events();
    ++total_steps_;
    now_ = static_cast<double>(total_steps_) * model_.step_s;
}

void Device::advance_to(double t) {
    while (now_ < t - 1e-9) tick();
    resolve_events();
}

std::uint64_t Device::steps_for(double duration_s) const {
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        fail(Errc::validation, "duration must be positive");
    }
    double raw = duration_s / model_.step_s;
    auto steps = static_cast<std::uint64_t>(std::llround(raw));
    if (steps == 0 || std::fabs(static_cast<double>(steps) * model_.step_s - duration_s) >
                          1e-9 * std::max(1.0, duration_s)) {
        fail(Errc::validation, "duration must be a whole multiple of the sim step");
    }
    return steps;
}

LoadRunStats Device::run_load(double offered_gbps, std::uint32_t packet_size_bytes,
                              double duration_s) {
    if (!(offered_gbps >= 0.0) || !std::isfinite(offered_gbps)) {
        fail(Errc::bad_argument, "offered load must be non-negative");
    }
    if (offered_gbps > model_.line_rate.gbps) {
        fail(Errc::bad_argument, "offered load exceeds line rate");
    }
    Throughput peak = ndr(packet_size_bytes);
    std::uint64_t steps = steps_for(duration_s);
    LoadRunStats stats;
    stats.step_s = model_.step_s;
    for (std::uint64_t i = 0; i < steps; ++i) {
        resolve_events();
        const PowerState& st = effective_state();
        double capacity_gbps = st.capacity_fraction * peak.gbps;
        double delivered = std::min(offered_gbps, capacity_gbps);
        double utilization = capacity_gbps > 0.0 ? delivered / capacity_gbps : 0.0;
        stats.power_sum_w += st.curve.power_at(utilization) * warm_factor(now_);
        stats.delivered_sum_gbps += delivered;
        ++stats.steps;
        ++total_steps_;
        now_ = static_cast<double>(total_steps_) * model_.step_s;
    }
    return stats;
}

MeasurementSample Device::offer_load(double offered_gbps, std::uint32_t packet_size_bytes,
                                     double duration_s, const std::string& phase_label) {
    Throughput peak = ndr(packet_size_bytes);
    LoadRunStats stats = run_load(offered_gbps, packet_size_bytes, duration_s);
    MeasurementSample s;
    s.phase = phase_label;
    s.load_fraction = std::min(offered_gbps / peak.gbps, 1.0);
    s.offered = Throughput(offered_gbps);
    // The averaged estimate can land an ulp above the offer; clamp it back.
    s.delivered = Throughput(std::min(stats.avg_delivered_gbps(), offered_gbps));
    s.power = AvgPower(stats.avg_power_w());
    s.duration_s = stats.duration_s();
    s.packet_size_bytes = packet_size_bytes;
    s.validate();
    return s;
}

}  // namespace greenbench
