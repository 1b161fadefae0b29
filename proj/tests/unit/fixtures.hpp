#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "spoofguard/pipeline.hpp"
#include "spoofguard/synth.hpp"

namespace fixtures {

namespace sg = spoofguard;

/// Two days, one event type with two responders, one noise sensor.
inline sg::ScenarioConfig small_scenario(std::uint64_t seed = 7) {
    sg::ScenarioConfig c;
    c.duration_s = 2 * 86'400;
    c.seed = seed;
    c.sensors = {
        {"accel", "accelerometer", 4.0, sg::SignalRole::Spike, 0.05, 0.0},
        {"contact", "magnetic", 2.0, sg::SignalRole::Step, 0.05, 0.0},
        {"humidity", "humidity", 1.0, sg::SignalRole::Noise, 0.05, 0.0},
    };
    sg::EventConfig e;
    e.type = "door";
    e.mean_gap_s = 900.0;
    e.min_separation_s = 120.0;
    e.sensors = {"accel", "contact"};
    e.window_a_s = -2;
    e.window_b_s = 4;
    c.events = {e};
    return c;
}

inline const sg::SyntheticCorpus& small_corpus() {
    static const sg::SyntheticCorpus corpus = sg::generate(small_scenario());
    return corpus;
}

inline const sg::SyntheticCorpus& default_corpus() {
    static const sg::SyntheticCorpus corpus = sg::generate(sg::default_scenario());
    return corpus;
}

inline sg::PipelineOptions small_options(sg::PipelineKind kind = sg::PipelineKind::Dtw) {
    sg::PipelineOptions o;
    o.kind = kind;
    o.specs = sg::classifier_grid(sg::GridSize::Small);
    o.seed = 3;
    return o;
}

/// Trained once per pipeline kind and reused across test cases.
inline const sg::ModelBundle& small_bundle(sg::PipelineKind kind = sg::PipelineKind::Dtw) {
    static std::map<sg::PipelineKind, sg::ModelBundle> cache;
    auto it = cache.find(kind);
    if (it == cache.end())
        it = cache.emplace(kind, sg::train_event(small_corpus().dataset, "door", small_options(kind)).bundle).first;
    return it->second;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("spoofguard_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixtures
