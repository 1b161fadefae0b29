#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spoofguard/data.hpp"

namespace spoofguard {

enum class SignalRole { Step, Spike, Ramp, Oscillation, Noise };

std::string_view role_name(SignalRole r);
SignalRole parse_role(std::string_view name);

struct SensorConfig {
    std::string id;
    std::string modality;
    double rate_hz = 1.0;  // in [1, 20]
    SignalRole role = SignalRole::Noise;
    double noise_std = 1.0;
    double baseline = 0.0;
};

struct EventConfig {
    std::string type;
    double mean_gap_s = 600.0;
    double min_separation_s = 60.0;
    std::vector<std::string> sensors;  // responders
    std::int64_t window_a_s = 0;       // signature window [a, b] relative to the event
    std::int64_t window_b_s = 5;
    double amplitude = 1.0;
    /// Unlogged look-alike events on the same responders (per hour). Inside the
    /// window they produce the same values as a genuine response in a different
    /// order: time-reversed for step, ramp and oscillation, and a triangle
    /// peaking early for spike.
    double confounders_per_hour = 0.0;
};

struct ScenarioConfig {
    Timestamp start = seconds_to_ns(1'600'000'000);
    std::int64_t duration_s = 3 * 86'400;
    double dev_fraction = 1.0 / 3.0;  // rest is split evenly into train and test
    std::vector<SensorConfig> sensors;
    std::vector<EventConfig> events;
    double warp_factor = 0.2;
    double lag_jitter_s = 1.0;
    double amplitude_jitter = 0.1;
    int value_decimals = 3;
    std::uint64_t seed = 1;
};

/// 3 days, 10 sensors (6 responders, 4 noise), 3 event types, ~200 events each.
ScenarioConfig default_scenario();

/// Throws Error(Config) with the first violated rule.
void validate_scenario(const ScenarioConfig& config);

std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct Injection {
    Timestamp start = 0;  // event time + a + lag
    Timestamp end = 0;    // event time + b + lag
};

struct EventTruth {
    std::string event_type;
    std::int64_t window_a_s = 0;
    std::int64_t window_b_s = 0;
    std::vector<std::string> sensors;
    std::vector<Timestamp> true_times;
    std::vector<Injection> injections;  // parallel to true_times
    std::vector<Timestamp> spoofed_claims;
};

struct GroundTruth {
    std::uint64_t seed = 0;
    std::vector<EventTruth> events;  // config order
    [[nodiscard]] const EventTruth& event(std::string_view type) const;
};

std::string ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(std::string_view text);

struct SyntheticCorpus {
    Dataset dataset;
    GroundTruth truth;
};

/// Deterministic in the config. Each sensor and each event type draws from its
/// own stream, so adding a sensor leaves every other stream unchanged.
/// Throws Error(Config) for invalid configs or infeasible schedules.
SyntheticCorpus generate(const ScenarioConfig& config);

/// Writes the corpus layout plus ground_truth.json.
void write_synthetic(const SyntheticCorpus& corpus, const std::filesystem::path& root);

}  // namespace spoofguard
