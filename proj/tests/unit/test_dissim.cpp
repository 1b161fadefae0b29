#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "spoofguard/dissim.hpp"
#include "spoofguard/parallel.hpp"

using namespace spoofguard;

namespace {

const auto& corpus() { return fixtures::small_corpus(); }

SensorSelection two_sensor_selection() {
    SensorSelection s;
    s.event_type = "door";
    s.windows = {{"accel", -2, 4, 0.6}, {"contact", -2, 4, 0.5}};
    return s;
}

TimeRange train_range() { return corpus().dataset.segment(Segment::Train); }

std::size_t train_positives() {
    std::size_t n = 0;
    for (const auto& r : corpus().dataset.log("door").records) n += r.label == 1 && train_range().contains(r.time);
    return n;
}

}  // namespace

TEST_SUITE("dissim") {

TEST_CASE("normalization uses the requested range and guards zero variance") {
    Dataset d;
    SensorStream flat, ramp;
    flat.sensor_id = "flat";
    ramp.sensor_id = "ramp";
    for (int i = 0; i < 10; ++i) {
        flat.times.push_back(i);
        flat.values.push_back(4.0);
        ramp.times.push_back(i);
        ramp.values.push_back(i < 5 ? 0.0 : 2.0);
    }
    d.streams = {flat, ramp};
    const std::vector<std::string> ids{"flat", "ramp"};
    const auto stats = compute_normalization(d, ids, {0, 10});
    CHECK(stats.at("flat").mean == 4.0);
    CHECK(stats.at("flat").stddev == 1.0);
    CHECK(stats.at("ramp").mean == 1.0);
    CHECK(stats.at("ramp").stddev == doctest::Approx(1.0));
    CHECK(compute_normalization(d, ids, {0, 5}).at("ramp").mean == 0.0);
}

TEST_CASE("empty windows are imputed from the last reading") {
    SensorStream s;
    s.sensor_id = "s";
    s.times = {seconds_to_ns(1), seconds_to_ns(100)};
    s.values = {3.0, 9.0};
    const SensorNorm norm{"s", 1.0, 2.0};
    const auto w = prepare_window(s, norm, seconds_to_ns(50), -5, 5);
    CHECK(w.imputed);
    CHECK(w.values == std::vector<double>{1.0, 1.0});
    const auto before = prepare_window(s, norm, 0, -5, 0);
    CHECK(before.imputed);
    CHECK(before.values == std::vector<double>{0.0, 0.0});
    const auto full = prepare_window(s, norm, seconds_to_ns(100), 0, 1);
    CHECK_FALSE(full.imputed);
    CHECK(full.values == std::vector<double>{4.0});
}

TEST_CASE("prototypes are the training 1-events in time order") {
    const auto sel = two_sensor_selection();
    const auto stats = compute_normalization(corpus().dataset, sel.sensor_ids(), train_range());
    const auto p = build_prototypes(corpus().dataset, "door", sel, stats, train_range());
    CHECK(p.size() == train_positives());
    CHECK(p.sensor_ids == sel.sensor_ids());
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(train_range().contains(p.prototypes[i].anchor));
        CHECK(p.prototypes[i].series.size() == 2);
        if (i) CHECK(p.prototypes[i - 1].anchor < p.prototypes[i].anchor);
    }
    const auto capped = build_prototypes(corpus().dataset, "door", sel, stats, train_range(), 5, 1);
    CHECK(capped.size() == 5);
    CHECK(std::is_sorted(capped.prototypes.begin(), capped.prototypes.end(),
                         [](const Prototype& a, const Prototype& b) { return a.anchor < b.anchor; }));
    CHECK(build_prototypes(corpus().dataset, "door", sel, stats, train_range(), 5, 1) == capped);
}

TEST_CASE("no 1-events means no prototypes") {
    const auto sel = two_sensor_selection();
    const auto stats = compute_normalization(corpus().dataset, sel.sensor_ids(), train_range());
    const TimeRange tiny{train_range().begin, train_range().begin + 1};
    CHECK_THROWS_AS(build_prototypes(corpus().dataset, "door", sel, stats, tiny), Error);
}

TEST_CASE("embedding layout, self-distance and purity") {
    const auto sel = two_sensor_selection();
    const auto stats = compute_normalization(corpus().dataset, sel.sensor_ids(), train_range());
    const auto p = build_prototypes(corpus().dataset, "door", sel, stats, train_range(), 6, 2);
    const EmbeddingContext ctx{corpus().dataset, sel, p, stats};
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Instance self{"door", p.prototypes[k].anchor, 1};
        const auto v = embed(self, ctx);
        REQUIRE(v.values.size() == 2 * p.size());
        CHECK(v.values[k] == 0.0);
        CHECK(v.values[p.size() + k] == 0.0);
        for (double x : v.values) CHECK(x >= 0.0);
    }
    const Instance a{"door", train_range().begin + seconds_to_ns(777), 0};
    CHECK(embed(a, ctx).values == embed(a, ctx).values);
    const auto labels = dissim_column_labels(p);
    CHECK(labels.front() == "accel/0");
    CHECK(labels.back() == "contact/" + std::to_string(p.size() - 1));
}

TEST_CASE("figure-style univariate space: two prototypes embed in two dimensions") {
    Dataset d;
    d.span = {0, seconds_to_ns(1000)};
    d.split = {seconds_to_ns(10), seconds_to_ns(900)};
    SensorStream s;
    s.sensor_id = "x";
    for (int t = 0; t < 1000; ++t) {
        s.times.push_back(seconds_to_ns(t));
        s.values.push_back(t % 100 < 5 ? 1.0 : 0.0);
    }
    d.streams = {s};
    EventLog log;
    log.event_type = "e";
    for (int k = 1; k <= 8; ++k) log.records.push_back({seconds_to_ns(100 * k), static_cast<std::uint8_t>(k == 1 || k == 4)});
    d.logs = {log};
    SensorSelection sel;
    sel.event_type = "e";
    sel.windows = {{"x", 0, 5, 1.0}};
    const auto stats = compute_normalization(d, sel.sensor_ids(), d.segment(Segment::Train));
    const auto p = build_prototypes(d, "e", sel, stats, d.segment(Segment::Train));
    REQUIRE(p.size() == 2);
    std::vector<Instance> inst;
    for (const auto& r : log.records) inst.push_back({"e", r.time, r.label});
    const auto m = embed_all(inst, {d, sel, p, stats});
    CHECK(m.values.rows == 8);
    CHECK(m.values.cols == 2);
}

TEST_CASE("embed_all is schedule independent and counts DTW calls") {
    const auto sel = two_sensor_selection();
    const auto stats = compute_normalization(corpus().dataset, sel.sensor_ids(), train_range());
    const auto p = build_prototypes(corpus().dataset, "door", sel, stats, train_range(), 8, 2);
    const EmbeddingContext ctx{corpus().dataset, sel, p, stats};
    const auto inst = build_instances(corpus().dataset.log("door"), train_range(), 500);
    set_thread_count(1);
    const auto serial = embed_all(inst, ctx);
    set_thread_count(4);
    const auto parallel = embed_all(inst, ctx);
    set_thread_count(0);
    CHECK(serial.values == parallel.values);
    CHECK(serial.imputed == parallel.imputed);
    CHECK(serial.dtw_calls == inst.size() * p.size() * 2);
    CHECK(embed_all(std::span<const Instance>{}, ctx).values.rows == 0);
    std::vector<Instance> reversed(inst.rbegin(), inst.rend());
    const auto rev = embed_all(reversed, ctx);
    for (std::size_t i = 0; i < inst.size(); ++i) CHECK(rev.values.row(inst.size() - 1 - i)[0] == serial.values.row(i)[0]);
}

TEST_CASE("embedding csv has coordinate labels") {
    const auto sel = two_sensor_selection();
    const auto stats = compute_normalization(corpus().dataset, sel.sensor_ids(), train_range());
    const auto p = build_prototypes(corpus().dataset, "door", sel, stats, train_range(), 2, 2);
    const auto inst = build_instances(corpus().dataset.log("door"), train_range(), 5000);
    const auto m = embed_all(inst, {corpus().dataset, sel, p, stats});
    const auto path = fixtures::scratch("embedding_csv") / "e.csv";
    write_embedding_csv(m, path);
    const auto text = fixtures::slurp(path);
    CHECK(text.substr(0, text.find('\n')) == "accel/0,accel/1,contact/0,contact/1");
    CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == inst.size() + 1);
}

}
