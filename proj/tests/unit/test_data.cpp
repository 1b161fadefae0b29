#include <doctest.h>

#include <functional>

#include "fixtures.hpp"
#include "spoofguard/data.hpp"

using namespace spoofguard;

namespace {

std::string error_text(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

SensorStream stream_of(std::vector<Timestamp> t, std::vector<double> v) {
    SensorStream s;
    s.sensor_id = "s";
    s.times = std::move(t);
    s.values = std::move(v);
    return s;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("sensor csv parses rows in order") {
    const auto s = parse_sensor_csv("timestamp_ns,value\n1,0.5\n2,0.7\n", "a.csv");
    REQUIRE(s.size() == 2);
    CHECK(s.times == std::vector<Timestamp>{1, 2});
    CHECK(s.values == std::vector<double>{0.5, 0.7});
}

TEST_CASE("out-of-order sensor rows are rejected") {
    CHECK_THROWS_AS(parse_sensor_csv("timestamp_ns,value\n2,0.5\n1,0.7\n", "a.csv"), Error);
    const auto msg = error_text([] { parse_sensor_csv("timestamp_ns,value\n2,0.5\n1,0.7\n", "a.csv"); });
    CHECK(msg.find("increasing") != std::string::npos);
}

TEST_CASE("malformed rows name file and line") {
    const auto msg = error_text([] { parse_sensor_csv("timestamp_ns,value\n1,0.5\n2,abc\n", "door.csv"); });
    CHECK(msg.find("door.csv") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
    CHECK_THROWS_AS(parse_event_csv("timestamp_ns,label\n1,2\n", "e.csv"), Error);
    CHECK_THROWS_AS(parse_sensor_csv("time,value\n1,0.5\n", "a.csv"), Error);
}

TEST_CASE("event csv parses labels") {
    const auto log = parse_event_csv("timestamp_ns,label\n5,0\n9,1\n", "door.csv");
    REQUIRE(log.records.size() == 2);
    CHECK(log.records[1] == EventRecord{9, 1});
}

TEST_CASE("ingest rejects an empty sensors directory") {
    const auto root = fixtures::scratch("empty_sensors");
    std::filesystem::create_directories(root / "sensors");
    std::filesystem::create_directories(root / "events");
    std::ofstream(root / "events" / "door.csv") << "timestamp_ns,label\n1,1\n";
    std::ofstream(root / "meta.json") << R"({"sensors": [], "split": {"dev_end": 10, "train_end": 20}})";
    const auto msg = error_text([&] { ingest_corpus(root); });
    CHECK(msg.find("no sensors") != std::string::npos);
}

TEST_CASE("ingest rejects meta referencing an unknown sensor") {
    const auto root = fixtures::scratch("unknown_sensor");
    std::filesystem::create_directories(root / "sensors");
    std::filesystem::create_directories(root / "events");
    std::ofstream(root / "sensors" / "a.csv") << "timestamp_ns,value\n1,0.5\n100,0.5\n";
    std::ofstream(root / "events" / "door.csv") << "timestamp_ns,label\n1,1\n";
    std::ofstream(root / "meta.json")
        << R"({"sensors": [{"id": "a", "modality": "x"}, {"id": "ghost", "modality": "x"}],
              "split": {"dev_end": 10, "train_end": 20}})";
    const auto msg = error_text([&] { ingest_corpus(root); });
    CHECK(msg.find("ghost") != std::string::npos);
}

TEST_CASE("corpus round-trips byte-identically") {
    const auto& d = fixtures::small_corpus().dataset;
    const auto a = fixtures::scratch("roundtrip_a"), b = fixtures::scratch("roundtrip_b");
    write_corpus(d, a);
    const auto loaded = ingest_corpus(a);
    CHECK(loaded.warnings.empty());
    CHECK(loaded.span == d.span);
    write_corpus(loaded, b);
    for (const auto& rel : {"meta.json", "sensors/accel.csv", "sensors/humidity.csv", "events/door.csv"})
        CHECK(fixtures::slurp(a / rel) == fixtures::slurp(b / rel));
}

TEST_CASE("sampling counts on a 13-day event-free grid") {
    EventLog log;
    log.event_type = "quiet";
    const TimeRange grid{0, seconds_to_ns(1'123'200)};
    CHECK(build_instances(log, grid, 1).size() == 1'123'200);
    CHECK(build_instances(log, grid, 100).size() == 11'232);
    CHECK(build_instances(log, grid, 500).size() == 2'247);
}

TEST_CASE("instances keep every 1-event and skip grid seconds that hold one") {
    EventLog log;
    log.event_type = "door";
    log.records = {{seconds_to_ns(0), 0}, {seconds_to_ns(10), 1}, {seconds_to_ns(15), 1}, {seconds_to_ns(40), 1}};
    const auto inst = build_instances(log, {0, seconds_to_ns(50)}, 10);
    std::vector<std::pair<Timestamp, int>> got;
    for (const auto& i : inst) got.emplace_back(i.anchor / kNanosPerSecond, i.label);
    const std::vector<std::pair<Timestamp, int>> want{{0, 0}, {10, 1}, {15, 1}, {20, 0}, {30, 0}, {40, 1}};
    CHECK(got == want);
}

TEST_CASE("instances outside the segment are excluded") {
    EventLog log;
    log.records = {{seconds_to_ns(5), 1}, {seconds_to_ns(25), 1}};
    const auto inst = build_instances(log, {seconds_to_ns(10), seconds_to_ns(30)}, 100);
    REQUIRE(inst.size() == 2);
    CHECK(inst[0].label == 0);
    CHECK(inst[1].anchor == seconds_to_ns(25));
}

TEST_CASE("window slicing is half-open") {
    std::vector<Timestamp> t;
    std::vector<double> v;
    for (int i = 0; i < 400; ++i) {
        t.push_back(seconds_to_ns(100) + i * kNanosPerSecond / 20);
        v.push_back(i);
    }
    const auto s = stream_of(t, v);
    CHECK(slice_window(s, seconds_to_ns(50), -10, 10).empty());
    CHECK(slice_window(s, seconds_to_ns(105), 0, 2).size() == 40);
    const auto w = slice_window(s, t[7], 0, 1);
    REQUIRE(!w.empty());
    CHECK(w.front() == 7.0);
    CHECK(slice_window(s, t[7], -1, 0).back() == 6.0);
}

TEST_CASE("last value before a time") {
    const auto s = stream_of({10, 20}, {1.0, 2.0});
    CHECK(last_value_before(s, 10) == nullptr);
    REQUIRE(last_value_before(s, 11) != nullptr);
    CHECK(*last_value_before(s, 21) == 2.0);
}

TEST_CASE("segments follow the split boundaries") {
    const auto& d = fixtures::small_corpus().dataset;
    CHECK(d.segment(Segment::Dev).begin == d.span.begin);
    CHECK(d.segment(Segment::Dev).end == d.segment(Segment::Train).begin);
    CHECK(d.segment(Segment::Train).end == d.segment(Segment::Test).begin);
    CHECK(d.segment(Segment::Test).end == d.span.end);
}

}
