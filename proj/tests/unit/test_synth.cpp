#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "spoofguard/synth.hpp"

using namespace spoofguard;

namespace {

ScenarioConfig quiet_day(std::uint64_t seed) {
    ScenarioConfig c;
    c.duration_s = 86'400;
    c.seed = seed;
    c.sensors = {{"s", "x", 1.0, SignalRole::Step, 0.1, 0.0}};
    EventConfig e;
    e.type = "e";
    e.mean_gap_s = 600.0;
    e.min_separation_s = 60.0;
    e.sensors = {"s"};
    c.events = {e};
    return c;
}

bool is_config_error(const ScenarioConfig& c) {
    try {
        validate_scenario(c);
    } catch (const Error& e) {
        return e.kind() == ErrorKind::Config;
    }
    return false;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("default scenario shape") {
    const auto c = default_scenario();
    CHECK_NOTHROW(validate_scenario(c));
    CHECK(c.duration_s == 3 * 86'400);
    CHECK(c.sensors.size() == 10);
    CHECK(c.events.size() == 3);
    CHECK(c.warp_factor == 0.2);
    std::size_t responders = 0;
    for (const auto& s : c.sensors) responders += s.role != SignalRole::Noise;
    CHECK(responders == 6);
    for (const auto& s : c.sensors) CHECK((s.rate_hz >= 1.0 && s.rate_hz <= 20.0));
}

TEST_CASE("invalid configs are rejected") {
    auto c = quiet_day(1);
    c.sensors[0].rate_hz = 50.0;
    CHECK(is_config_error(c));
    c = quiet_day(1);
    c.events[0].sensors = {"ghost"};
    CHECK(is_config_error(c));
    c = quiet_day(1);
    c.events[0].window_a_s = 3;
    c.events[0].window_b_s = 3;
    CHECK(is_config_error(c));
    c = quiet_day(1);
    c.warp_factor = 1.5;
    CHECK(is_config_error(c));
    CHECK_THROWS_AS(scenario_from_json("{not json"), Error);
}

TEST_CASE("scenario json round-trips") {
    const auto c = default_scenario();
    CHECK(scenario_to_json(scenario_from_json(scenario_to_json(c))) == scenario_to_json(c));
}

TEST_CASE("infeasible schedules are reported") {
    auto c = quiet_day(1);
    c.duration_s = 600;
    c.events[0].mean_gap_s = 100.0;
    c.events[0].min_separation_s = 90.0;
    CHECK_THROWS_AS(generate(c), Error);
}

TEST_CASE("event counts follow the mean gap") {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto n = static_cast<double>(generate(quiet_day(seed)).truth.event("e").true_times.size());
        CHECK(std::abs(n - 144.0) <= 36.0);
        total += n;
    }
    CHECK(std::abs(total / 20.0 - 144.0) <= 2.0 * 12.0 / std::sqrt(20.0));
}

TEST_CASE("ground truth is consistent with the logs") {
    const auto& corpus = fixtures::small_corpus();
    const auto& t = corpus.truth.event("door");
    const auto& log = corpus.dataset.log("door");
    std::vector<Timestamp> ones;
    for (const auto& r : log.records)
        if (r.label) ones.push_back(r.time);
    CHECK(ones == t.true_times);
    CHECK(t.injections.size() == t.true_times.size());
    for (std::size_t i = 1; i < t.true_times.size(); ++i)
        CHECK(t.true_times[i] - t.true_times[i - 1] >= seconds_to_ns(120));
    CHECK(ground_truth_to_json(ground_truth_from_json(ground_truth_to_json(corpus.truth))) ==
          ground_truth_to_json(corpus.truth));
}

TEST_CASE("spoofed claims keep clear of true events") {
    const auto& t = fixtures::small_corpus().truth.event("door");
    const auto test = fixtures::small_corpus().dataset.segment(Segment::Test);
    CHECK(!t.spoofed_claims.empty());
    const Timestamp span = seconds_to_ns(t.window_b_s - t.window_a_s);
    for (auto c : t.spoofed_claims) {
        CHECK(test.contains(c));
        for (auto e : t.true_times) CHECK(std::llabs(c - e) > span);
    }
}

TEST_CASE("generation is deterministic and streams are independent") {
    const auto a = fixtures::scratch("synth_a"), b = fixtures::scratch("synth_b");
    write_synthetic(generate(fixtures::small_scenario(9)), a);
    write_synthetic(generate(fixtures::small_scenario(9)), b);
    for (const auto& rel : {"meta.json", "ground_truth.json", "events/door.csv", "sensors/accel.csv", "sensors/contact.csv"})
        CHECK(fixtures::slurp(a / rel) == fixtures::slurp(b / rel));

    auto more = fixtures::small_scenario(9);
    more.sensors.push_back({"co2", "gas", 1.0, SignalRole::Noise, 0.1, 0.0});
    const auto extended = generate(more);
    const auto base = generate(fixtures::small_scenario(9));
    CHECK(extended.dataset.stream("accel").values == base.dataset.stream("accel").values);
    CHECK(extended.truth.event("door").true_times == base.truth.event("door").true_times);
}

TEST_CASE("without warp and jitter every injected signature matches") {
    auto c = fixtures::small_scenario(4);
    c.warp_factor = 0.0;
    c.lag_jitter_s = 0.0;
    c.amplitude_jitter = 0.0;
    for (auto& s : c.sensors) s.noise_std = 0.0;
    c.sensors[1].rate_hz = 20.0;
    const auto corpus = generate(c);
    const auto& s = corpus.dataset.stream("contact");
    const auto& t = corpus.truth.event("door");
    std::vector<double> first;
    for (auto e : t.true_times) {
        const auto w = slice_window(s, e, 0, 2);
        std::vector<double> v(w.begin(), w.end());
        if (first.empty()) first = v;
        double mean_a = 0.0, mean_b = 0.0;
        for (double x : first) mean_a += x / static_cast<double>(first.size());
        for (double x : v) mean_b += x / static_cast<double>(v.size());
        CHECK(mean_b == doctest::Approx(mean_a).epsilon(0.02));
    }
}

TEST_CASE("noise sensors ignore the event schedule") {
    auto c = fixtures::small_scenario(5);
    auto d = c;
    d.events[0].mean_gap_s = 3000.0;
    CHECK(generate(c).dataset.stream("humidity").values == generate(d).dataset.stream("humidity").values);
}

TEST_CASE("default corpus stays under 200 MB and re-ingests cleanly") {
    const auto root = fixtures::scratch("synth_size");
    write_synthetic(fixtures::default_corpus(), root);
    std::uintmax_t bytes = 0;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file()) bytes += e.file_size();
    CHECK(bytes <= 200u * 1000u * 1000u);
    const auto loaded = ingest_corpus(root);
    CHECK(loaded.warnings.empty());
    CHECK(loaded.streams.size() == 10);
    std::filesystem::remove_all(root);
}

}
