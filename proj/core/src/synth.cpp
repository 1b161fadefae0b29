#include "spoofguard/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "spoofguard/parallel.hpp"
#include "spoofguard/rng.hpp"
#include "text_io.hpp"

namespace spoofguard {

using nlohmann::json;

namespace {

constexpr double kEdgeMarginS = 60.0;
constexpr double kStepHoldS = 20.0;
constexpr double kStepFallFactor = 3.0;  // fall lasts 3x the rise
constexpr double kRampTauS = 30.0;
constexpr double kRampTailS = 150.0;
constexpr double kSkewedPeak = 0.2;
constexpr int kWarpPieces = 4;

constexpr std::pair<SignalRole, std::string_view> kRoleNames[] = {
    {SignalRole::Step, "step"}, {SignalRole::Spike, "spike"}, {SignalRole::Ramp, "ramp"},
    {SignalRole::Oscillation, "oscillation"}, {SignalRole::Noise, "noise"}};

}  // namespace

std::string_view role_name(SignalRole r) {
    for (const auto& [role, name] : kRoleNames)
        if (role == r) return name;
    return "noise";
}

SignalRole parse_role(std::string_view name) {
    for (const auto& [role, n] : kRoleNames)
        if (n == name) return role;
    throw Error(ErrorKind::Config, "unknown sensor role '" + std::string(name) + "'");
}

const EventTruth& GroundTruth::event(std::string_view type) const {
    for (const auto& e : events)
        if (e.event_type == type) return e;
    throw Error(ErrorKind::Invalid, "no ground truth for event '" + std::string(type) + "'");
}

ScenarioConfig default_scenario() {
    ScenarioConfig c;
    // Noise is set relative to the per-sample change a response causes, so
    // the activity statistic neither drowns in noise nor saturates.
    auto sensor = [](std::string id, std::string modality, double rate, SignalRole role, double noise) {
        SensorConfig s;
        s.id = std::move(id);
        s.modality = std::move(modality);
        s.rate_hz = rate;
        s.role = role;
        s.noise_std = noise;
        return s;
    };
    auto event = [](std::string type, std::int64_t a, std::int64_t b, std::vector<std::string> sensors) {
        EventConfig e;
        e.type = std::move(type);
        e.mean_gap_s = 1296.0;
        e.min_separation_s = 120.0;
        e.sensors = std::move(sensors);
        e.window_a_s = a;
        e.window_b_s = b;
        e.amplitude = 1.0;
        e.confounders_per_hour = 0.0;
        return e;
    };
    c.sensors = {
        sensor("co2", "gas", 1, SignalRole::Noise, 0.05),
        sensor("door_accel", "accelerometer", 4, SignalRole::Spike, 0.05),
        sensor("door_contact", "magnetic", 2, SignalRole::Step, 0.05),
        sensor("fan_temp", "temperature", 1, SignalRole::Ramp, 0.05),
        sensor("fan_vibration", "vibration", 3, SignalRole::Oscillation, 0.2),
        sensor("humidity", "humidity", 1, SignalRole::Noise, 0.05),
        sensor("lux_ceiling", "light", 4, SignalRole::Step, 0.02),
        sensor("lux_desk", "light", 2, SignalRole::Ramp, 0.04),
        sensor("pir_motion", "motion", 1, SignalRole::Noise, 0.05),
        sensor("sound", "microphone", 2, SignalRole::Noise, 0.05),
    };
    c.events = {
        event("door_open", -2, 4, {"door_accel", "door_contact"}),
        event("fan_on", 2, 12, {"fan_temp", "fan_vibration"}),
        event("light_on", 0, 8, {"lux_ceiling", "lux_desk"}),
    };
    return c;
}

namespace {

bool safe_id(std::string_view id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
    });
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::Config, "invalid scenario: " + what); }

}  // namespace

void validate_scenario(const ScenarioConfig& c) {
    if (c.duration_s <= 0) bad("duration must be positive");
    if (!(c.dev_fraction > 0.0 && c.dev_fraction < 1.0)) bad("dev_fraction must lie in (0, 1)");
    if (!(c.warp_factor >= 0.0 && c.warp_factor < 1.0)) bad("warp_factor must lie in [0, 1)");
    if (!(c.lag_jitter_s >= 0.0) || !std::isfinite(c.lag_jitter_s)) bad("lag_jitter must be non-negative");
    if (!(c.amplitude_jitter >= 0.0 && c.amplitude_jitter < 1.0)) bad("amplitude_jitter must lie in [0, 1)");
    if (c.value_decimals < 0 || c.value_decimals > 12) bad("value_decimals must lie in [0, 12]");
    if (c.sensors.empty()) bad("no sensors");
    std::set<std::string> ids;
    for (const auto& s : c.sensors) {
        if (!safe_id(s.id)) bad("sensor id '" + s.id + "' is not a plain file name");
        if (!ids.insert(s.id).second) bad("duplicate sensor '" + s.id + "'");
        if (!(s.rate_hz >= 1.0 && s.rate_hz <= 20.0)) bad("sensor '" + s.id + "' rate must lie in [1, 20] Hz");
        if (!(s.noise_std >= 0.0) || !std::isfinite(s.noise_std)) bad("sensor '" + s.id + "' noise_std must be >= 0");
        if (!std::isfinite(s.baseline)) bad("sensor '" + s.id + "' baseline must be finite");
    }
    if (c.events.empty()) bad("no events");
    std::set<std::string> types;
    for (const auto& e : c.events) {
        if (!safe_id(e.type)) bad("event type '" + e.type + "' is not a plain file name");
        if (!types.insert(e.type).second) bad("duplicate event type '" + e.type + "'");
        if (e.window_a_s >= e.window_b_s) bad("event '" + e.type + "' window needs a < b");
        if (!(e.min_separation_s > static_cast<double>(e.window_b_s - e.window_a_s)))
            bad("event '" + e.type + "' min_separation must exceed the window length");
        if (!(e.mean_gap_s >= e.min_separation_s)) bad("event '" + e.type + "' mean_gap must be >= min_separation");
        if (!std::isfinite(e.amplitude)) bad("event '" + e.type + "' amplitude must be finite");
        if (!(e.confounders_per_hour >= 0.0) || !std::isfinite(e.confounders_per_hour))
            bad("event '" + e.type + "' confounders_per_hour must be >= 0");
        if (e.sensors.empty()) bad("event '" + e.type + "' has no responding sensor");
        for (const auto& id : e.sensors) {
            const auto it = std::find_if(c.sensors.begin(), c.sensors.end(), [&](const auto& s) { return s.id == id; });
            if (it == c.sensors.end()) bad("event '" + e.type + "' references unknown sensor '" + id + "'");
            if (it->role == SignalRole::Noise) bad("event '" + e.type + "' responder '" + id + "' has the noise role");
        }
    }
}

// ---- JSON ----------------------------------------------------------------------

namespace {

json to_json(const ScenarioConfig& c) {
    json j;
    j["start_ns"] = c.start;
    j["duration_s"] = c.duration_s;
    j["dev_fraction"] = c.dev_fraction;
    j["warp_factor"] = c.warp_factor;
    j["lag_jitter_s"] = c.lag_jitter_s;
    j["amplitude_jitter"] = c.amplitude_jitter;
    j["value_decimals"] = c.value_decimals;
    j["seed"] = c.seed;
    j["sensors"] = json::array();
    for (const auto& s : c.sensors) {
        j["sensors"].push_back({{"id", s.id},
                                {"modality", s.modality},
                                {"rate_hz", s.rate_hz},
                                {"role", role_name(s.role)},
                                {"noise_std", s.noise_std},
                                {"baseline", s.baseline}});
    }
    j["events"] = json::array();
    for (const auto& e : c.events) {
        j["events"].push_back({{"type", e.type},
                               {"mean_gap_s", e.mean_gap_s},
                               {"min_separation_s", e.min_separation_s},
                               {"sensors", e.sensors},
                               {"window", {e.window_a_s, e.window_b_s}},
                               {"amplitude", e.amplitude},
                               {"confounders_per_hour", e.confounders_per_hour}});
    }
    return j;
}

}  // namespace

std::string scenario_to_json(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

ScenarioConfig scenario_from_json(std::string_view text) {
    ScenarioConfig c;
    try {
        const json j = json::parse(text);
        const ScenarioConfig d;
        c.start = j.value("start_ns", d.start);
        c.duration_s = j.value("duration_s", d.duration_s);
        c.dev_fraction = j.value("dev_fraction", d.dev_fraction);
        c.warp_factor = j.value("warp_factor", d.warp_factor);
        c.lag_jitter_s = j.value("lag_jitter_s", d.lag_jitter_s);
        c.amplitude_jitter = j.value("amplitude_jitter", d.amplitude_jitter);
        c.value_decimals = j.value("value_decimals", d.value_decimals);
        c.seed = j.value("seed", d.seed);
        for (const auto& s : j.at("sensors")) {
            SensorConfig sc;
            sc.id = s.at("id").get<std::string>();
            sc.modality = s.value("modality", std::string{});
            sc.rate_hz = s.at("rate_hz").get<double>();
            sc.role = parse_role(s.at("role").get<std::string>());
            sc.noise_std = s.value("noise_std", sc.noise_std);
            sc.baseline = s.value("baseline", sc.baseline);
            c.sensors.push_back(std::move(sc));
        }
        for (const auto& e : j.at("events")) {
            EventConfig ec;
            ec.type = e.at("type").get<std::string>();
            ec.mean_gap_s = e.at("mean_gap_s").get<double>();
            ec.min_separation_s = e.at("min_separation_s").get<double>();
            ec.sensors = e.at("sensors").get<std::vector<std::string>>();
            const auto& w = e.at("window");
            if (!w.is_array() || w.size() != 2) bad("event window must be [a, b]");
            ec.window_a_s = w[0].get<std::int64_t>();
            ec.window_b_s = w[1].get<std::int64_t>();
            ec.amplitude = e.value("amplitude", ec.amplitude);
            ec.confounders_per_hour = e.value("confounders_per_hour", ec.confounders_per_hour);
            c.events.push_back(std::move(ec));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, std::string("scenario JSON: ") + e.what());
    }
    validate_scenario(c);
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Config, "cannot read scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

std::string ground_truth_to_json(const GroundTruth& t) {
    json j;
    j["seed"] = t.seed;
    j["events"] = json::array();
    for (const auto& e : t.events) {
        json inj = json::array();
        for (const auto& i : e.injections) inj.push_back({i.start, i.end});
        j["events"].push_back({{"type", e.event_type},
                               {"window", {e.window_a_s, e.window_b_s}},
                               {"sensors", e.sensors},
                               {"true_times", e.true_times},
                               {"injections", inj},
                               {"spoofed_claims", e.spoofed_claims}});
    }
    return j.dump(1) + "\n";
}

GroundTruth ground_truth_from_json(std::string_view text) {
    GroundTruth t;
    try {
        const json j = json::parse(text);
        t.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& e : j.at("events")) {
            EventTruth et;
            et.event_type = e.at("type").get<std::string>();
            et.window_a_s = e.at("window")[0].get<std::int64_t>();
            et.window_b_s = e.at("window")[1].get<std::int64_t>();
            et.sensors = e.at("sensors").get<std::vector<std::string>>();
            et.true_times = e.at("true_times").get<std::vector<Timestamp>>();
            for (const auto& i : e.at("injections")) et.injections.push_back({i[0].get<Timestamp>(), i[1].get<Timestamp>()});
            et.spoofed_claims = e.at("spoofed_claims").get<std::vector<Timestamp>>();
            t.events.push_back(std::move(et));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, std::string("ground truth JSON: ") + e.what());
    }
    return t;
}

// ---- generation ------------------------------------------------------------------

namespace {

Timestamp to_ns(double seconds) { return static_cast<Timestamp>(std::llround(seconds * 1e9)); }

// Millisecond resolution keeps event times readable in logs.
Timestamp round_ms(Timestamp t) { return (t / 1'000'000) * 1'000'000; }

/// Shape inside the window, u in [0, 1].
double shape(SignalRole role, double u) {
    switch (role) {
        case SignalRole::Step:
        case SignalRole::Ramp: return u;
        case SignalRole::Spike: return u < 0.5 ? 2.0 * u : 2.0 * (1.0 - u);
        case SignalRole::Oscillation: return std::sin(2.0 * std::numbers::pi * 3.0 * u);
        case SignalRole::Noise: return 0.0;
    }
    return 0.0;
}

double tail_length(SignalRole role, double window_s) {
    switch (role) {
        case SignalRole::Step: return kStepHoldS + kStepFallFactor * window_s;
        case SignalRole::Ramp: return kRampTailS;
        default: return 0.0;
    }
}

/// Response after the window ends, t seconds past its end.
double tail(SignalRole role, double t, double window_s) {
    if (role == SignalRole::Step) {
        if (t < kStepHoldS) return 1.0;
        const double fall = kStepFallFactor * window_s;
        return std::max(0.0, 1.0 - (t - kStepHoldS) / fall);
    }
    if (role == SignalRole::Ramp) return t < kRampTailS ? std::exp(-t / kRampTauS) : 0.0;
    return 0.0;
}

/// Monotone map from real time in [0, L] to shape progress in [0, 1]:
/// equal time pieces, each advancing at its own speed.
struct Warp {
    std::array<double, kWarpPieces + 1> cum{};  // progress at piece boundaries

    static Warp identity() {
        Warp w;
        for (int i = 0; i <= kWarpPieces; ++i) w.cum[static_cast<std::size_t>(i)] = static_cast<double>(i) / kWarpPieces;
        return w;
    }

    double operator()(double x, double window_s) const {
        const double pos = std::clamp(x / window_s, 0.0, 1.0) * kWarpPieces;
        const auto piece = std::min(static_cast<std::size_t>(pos), static_cast<std::size_t>(kWarpPieces - 1));
        const double frac = pos - static_cast<double>(piece);
        return cum[piece] + frac * (cum[piece + 1] - cum[piece]);
    }
};

struct Response {
    Timestamp window_start = 0;
    double window_s = 0.0;
    double amplitude = 0.0;
    Warp warp;
    bool confounder = false;
};

double response_value(SignalRole role, const Response& r, double t) {
    const double total = r.window_s + tail_length(role, r.window_s);
    if (t < 0.0 || t >= total) return 0.0;
    if (r.confounder && role == SignalRole::Spike) {
        const double u = t / r.window_s;
        return r.amplitude * (u < kSkewedPeak ? u / kSkewedPeak : (1.0 - u) / (1.0 - kSkewedPeak));
    }
    if (r.confounder) t = total - t;
    const double v = t < r.window_s ? shape(role, r.warp(t, r.window_s)) : tail(role, t - r.window_s, r.window_s);
    return r.amplitude * v;
}

void add_response(SensorStream& s, SignalRole role, const Response& r) {
    const double total = r.window_s + tail_length(role, r.window_s);
    auto it = std::lower_bound(s.times.begin(), s.times.end(), r.window_start);
    const Timestamp end = r.window_start + to_ns(total);
    for (; it != s.times.end() && *it < end; ++it) {
        const auto k = static_cast<std::size_t>(it - s.times.begin());
        s.values[k] += response_value(role, r, static_cast<double>(*it - r.window_start) * 1e-9);
    }
}

struct PlannedEvent {
    Timestamp time = 0;
    double lag_s = 0.0;
    Warp warp;
};

std::vector<PlannedEvent> schedule(const ScenarioConfig& c, const EventConfig& e) {
    Rng rng(c.seed, "schedule:" + e.type);
    const double duration = static_cast<double>(c.duration_s);
    if (2.0 * kEdgeMarginS + e.min_separation_s > duration)
        throw Error(ErrorKind::Config, "infeasible schedule for '" + e.type + "': duration too short for min separation");
    std::vector<PlannedEvent> out;
    double t = kEdgeMarginS;
    for (;;) {
        t += (out.empty() ? 0.0 : e.min_separation_s) + rng.exponential(std::max(e.mean_gap_s - e.min_separation_s, 1e-9));
        if (t >= duration - kEdgeMarginS) break;
        PlannedEvent p;
        p.time = round_ms(c.start + to_ns(t));
        out.push_back(p);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        Rng er(c.seed, "event:" + e.type, i);
        out[i].lag_s = c.lag_jitter_s > 0.0 ? er.uniform(-c.lag_jitter_s, c.lag_jitter_s) : 0.0;
        std::array<double, kWarpPieces> speed{};
        double sum = 0.0;
        for (auto& v : speed) {
            v = c.warp_factor > 0.0 ? er.uniform(1.0 - c.warp_factor, 1.0 + c.warp_factor) : 1.0;
            sum += v;
        }
        out[i].warp.cum[0] = 0.0;
        for (std::size_t k = 0; k < kWarpPieces; ++k) out[i].warp.cum[k + 1] = out[i].warp.cum[k] + speed[k] / sum;
        out[i].warp.cum[kWarpPieces] = 1.0;
    }
    return out;
}

std::vector<Timestamp> spoof_claims(const ScenarioConfig& c, const EventConfig& e, const std::vector<PlannedEvent>& truth,
                                    TimeRange test) {
    std::size_t count = 0;
    for (const auto& p : truth) count += test.contains(p.time);
    Rng rng(c.seed, "spoof:" + e.type);
    const double guard_s = e.min_separation_s + static_cast<double>(e.window_b_s - e.window_a_s) + c.lag_jitter_s;
    const double lo = static_cast<double>(test.begin - c.start) * 1e-9 + kEdgeMarginS;
    const double hi = static_cast<double>(test.end - c.start) * 1e-9 - kEdgeMarginS;
    std::vector<Timestamp> claims;
    for (std::size_t k = 0; k < count; ++k) {
        bool placed = false;
        for (int attempt = 0; attempt < 10'000 && !placed; ++attempt) {
            const Timestamp t = round_ms(c.start + to_ns(rng.uniform(lo, hi)));
            const auto near = std::lower_bound(truth.begin(), truth.end(), t - to_ns(guard_s),
                                               [](const PlannedEvent& p, Timestamp v) { return p.time < v; });
            if (near != truth.end() && near->time <= t + to_ns(guard_s)) continue;
            claims.push_back(t);
            placed = true;
        }
        if (!placed) throw Error(ErrorKind::Config, "infeasible schedule for '" + e.type + "': no room for spoofed claims");
    }
    std::sort(claims.begin(), claims.end());
    claims.erase(std::unique(claims.begin(), claims.end()), claims.end());
    return claims;
}

EventLog event_log(const ScenarioConfig& c, const EventConfig& e, const std::vector<PlannedEvent>& truth) {
    EventLog log;
    log.event_type = e.type;
    log.records.reserve(static_cast<std::size_t>(c.duration_s) + truth.size());
    std::size_t next = 0;
    for (std::int64_t s = 0; s < c.duration_s; ++s) {
        const Timestamp sec = c.start + seconds_to_ns(s);
        while (next < truth.size() && truth[next].time < sec) log.records.push_back({truth[next++].time, 1});
        if (next < truth.size() && truth[next].time == sec) {
            log.records.push_back({truth[next++].time, 1});
            continue;
        }
        log.records.push_back({sec, 0});
    }
    while (next < truth.size()) log.records.push_back({truth[next++].time, 1});
    return log;
}

}  // namespace

SyntheticCorpus generate(const ScenarioConfig& c) {
    validate_scenario(c);
    SyntheticCorpus out;
    Dataset& d = out.dataset;
    d.span = {c.start, c.start + seconds_to_ns(c.duration_s)};
    const auto dev_s = static_cast<std::int64_t>(std::llround(static_cast<double>(c.duration_s) * c.dev_fraction));
    d.split.dev_end = c.start + seconds_to_ns(dev_s);
    d.split.train_end = d.split.dev_end + seconds_to_ns((c.duration_s - dev_s) / 2);
    if (!(d.split.dev_end > d.span.begin && d.split.dev_end < d.split.train_end && d.split.train_end < d.span.end))
        throw Error(ErrorKind::Config, "invalid scenario: duration too short to split");

    std::vector<std::vector<PlannedEvent>> plans;
    out.truth.seed = c.seed;
    for (const auto& e : c.events) {
        plans.push_back(schedule(c, e));
        const auto& plan = plans.back();
        EventTruth t;
        t.event_type = e.type;
        t.window_a_s = e.window_a_s;
        t.window_b_s = e.window_b_s;
        t.sensors = e.sensors;
        for (const auto& p : plan) {
            t.true_times.push_back(p.time);
            const Timestamp s0 = p.time + seconds_to_ns(e.window_a_s) + to_ns(p.lag_s);
            t.injections.push_back({s0, s0 + seconds_to_ns(e.window_b_s - e.window_a_s)});
        }
        t.spoofed_claims = spoof_claims(c, e, plan, d.segment(Segment::Test));
        out.truth.events.push_back(std::move(t));
        d.logs.push_back(event_log(c, e, plan));
    }

    // Confounders follow their own Poisson process and are not logged.
    std::vector<std::vector<Timestamp>> confounders(c.events.size());
    for (std::size_t ei = 0; ei < c.events.size(); ++ei) {
        const auto& e = c.events[ei];
        if (e.confounders_per_hour <= 0.0) continue;
        Rng rng(c.seed, "confounders:" + e.type);
        const double mean_gap = 3600.0 / e.confounders_per_hour;
        for (double t = rng.exponential(mean_gap); t < static_cast<double>(c.duration_s); t += rng.exponential(mean_gap))
            confounders[ei].push_back(c.start + to_ns(t));
    }

    const double scale = std::pow(10.0, c.value_decimals);
    d.streams.resize(c.sensors.size());
    parallel_for(c.sensors.size(), [&](std::size_t si) {
        const auto& sc = c.sensors[si];
        SensorStream& s = d.streams[si];
        s.sensor_id = sc.id;
        s.modality = sc.modality;
        Rng rng(c.seed, "sensor:" + sc.id);
        const double period_ns = 1e9 / sc.rate_hz;
        const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(c.duration_s) * sc.rate_hz));
        s.times.resize(n);
        s.values.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double jitter = rng.uniform(-0.2, 0.2);
            s.times[k] = c.start + static_cast<Timestamp>(std::llround((static_cast<double>(k) + 0.5 + jitter) * period_ns));
            s.values[k] = sc.baseline + sc.noise_std * rng.normal();
        }

        for (std::size_t ei = 0; ei < c.events.size(); ++ei) {
            const auto& e = c.events[ei];
            if (std::find(e.sensors.begin(), e.sensors.end(), sc.id) == e.sensors.end()) continue;
            const double window_s = static_cast<double>(e.window_b_s - e.window_a_s);
            for (std::size_t i = 0; i < plans[ei].size(); ++i) {
                const auto& p = plans[ei][i];
                Rng gain(c.seed, "gain:" + e.type + "/" + sc.id, i);
                const double jitter = c.amplitude_jitter > 0.0 ? gain.uniform(-c.amplitude_jitter, c.amplitude_jitter) : 0.0;
                Response r;
                r.window_start = p.time + seconds_to_ns(e.window_a_s) + to_ns(p.lag_s);
                r.window_s = window_s;
                r.amplitude = e.amplitude * (1.0 + jitter);
                r.warp = p.warp;
                add_response(s, sc.role, r);
            }
            for (std::size_t i = 0; i < confounders[ei].size(); ++i) {
                Rng gain(c.seed, "confounder-gain:" + e.type + "/" + sc.id, i);
                const double jitter = c.amplitude_jitter > 0.0 ? gain.uniform(-c.amplitude_jitter, c.amplitude_jitter) : 0.0;
                Response r;
                r.window_start = confounders[ei][i];
                r.window_s = window_s;
                r.amplitude = e.amplitude * (1.0 + jitter);
                r.warp = Warp::identity();
                r.confounder = true;
                add_response(s, sc.role, r);
            }
        }

        for (auto& v : s.values) v = std::round(v * scale) / scale;
    });

    std::sort(d.streams.begin(), d.streams.end(),
              [](const SensorStream& a, const SensorStream& b) { return a.sensor_id < b.sensor_id; });
    std::sort(d.logs.begin(), d.logs.end(), [](const EventLog& a, const EventLog& b) { return a.event_type < b.event_type; });
    validate(d);
    return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& root) {
    write_corpus(corpus.dataset, root);
    write_text_file(root / "ground_truth.json", ground_truth_to_json(corpus.truth));
}

}  // namespace spoofguard
