#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spoofguard/common.hpp"

namespace spoofguard {

/// One sensor's readings, stored column-wise. Timestamps strictly increase
/// and every value is finite once a stream has passed validation.
struct SensorStream {
    std::string sensor_id;
    std::string modality;
    std::vector<Timestamp> times;
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool empty() const { return times.empty(); }
};

struct EventRecord {
    Timestamp time = 0;
    std::uint8_t label = 0;
    bool operator==(const EventRecord&) const = default;
};

struct EventLog {
    std::string event_type;
    std::vector<EventRecord> records;
};

/// A labelled anchor time. label 1: the event occurred; label 0: sampled quiet moment.
struct Instance {
    std::string event_type;
    Timestamp anchor = 0;
    std::uint8_t label = 0;
    bool operator==(const Instance&) const = default;
};

enum class Segment { Dev, Train, Test };

std::string_view segment_name(Segment s);

struct SplitBoundaries {
    Timestamp dev_end = 0;
    Timestamp train_end = 0;
};

struct Dataset {
    TimeRange span;
    SplitBoundaries split;
    std::vector<SensorStream> streams;  // sorted by sensor_id
    std::vector<EventLog> logs;         // sorted by event_type
    std::vector<std::string> warnings;  // non-fatal ingestion diagnostics

    [[nodiscard]] const SensorStream& stream(std::string_view sensor_id) const;
    [[nodiscard]] const SensorStream* find_stream(std::string_view sensor_id) const;
    [[nodiscard]] const EventLog& log(std::string_view event_type) const;
    [[nodiscard]] const EventLog* find_log(std::string_view event_type) const;
    [[nodiscard]] TimeRange segment(Segment s) const;
    [[nodiscard]] std::vector<std::string> sensor_ids() const;
    [[nodiscard]] std::vector<std::string> event_types() const;
};

/// Sorts streams/logs and checks every structural invariant; throws Error(Data).
void validate(const Dataset& dataset);

/// Loads a corpus directory:
///   events/<event_type>.csv   header `timestamp_ns,label`
///   sensors/<sensor_id>.csv   header `timestamp_ns,value`
///   meta.json                 sensors, split boundaries, optional span
Dataset ingest_corpus(const std::filesystem::path& root);

/// Writes the same layout ingest_corpus reads. Output is byte-stable.
void write_corpus(const Dataset& dataset, const std::filesystem::path& root);

/// Parses one sensor CSV body; `origin` names the file in error messages.
SensorStream parse_sensor_csv(std::string_view text, std::string_view origin,
                              std::vector<std::string>* warnings = nullptr);
EventLog parse_event_csv(std::string_view text, std::string_view origin,
                         std::vector<std::string>* warnings = nullptr);

/// Label-1 records inside `segment` plus label-0 anchors on the whole-second
/// grid segment.begin + {0, k, 2k, ...}. Grid seconds holding a 1-event are
/// skipped. Output is ordered by anchor.
std::vector<Instance> build_instances(const EventLog& log, TimeRange segment,
                                      std::int64_t sample_every_s);

/// Index range [first, last) of readings with anchor+t_minus <= t < anchor+t_plus.
std::pair<std::size_t, std::size_t> window_bounds(const SensorStream& stream, Timestamp anchor,
                                                  std::int64_t t_minus_s, std::int64_t t_plus_s);

/// View of the readings inside the half-open window. May be empty.
std::span<const double> slice_window(const SensorStream& stream, Timestamp anchor,
                                     std::int64_t t_minus_s, std::int64_t t_plus_s);

/// Last reading strictly before `t`, if any.
const double* last_value_before(const SensorStream& stream, Timestamp t);

}  // namespace spoofguard
