#include "spoofguard/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spoofguard/parallel.hpp"
#include "text_io.hpp"

namespace spoofguard {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view segment_name(Segment s) {
    switch (s) {
        case Segment::Dev: return "dev";
        case Segment::Train: return "train";
        case Segment::Test: return "test";
    }
    return "?";
}

const SensorStream* Dataset::find_stream(std::string_view sensor_id) const {
    auto it = std::lower_bound(streams.begin(), streams.end(), sensor_id,
                               [](const SensorStream& s, std::string_view id) { return s.sensor_id < id; });
    return (it != streams.end() && it->sensor_id == sensor_id) ? &*it : nullptr;
}

const SensorStream& Dataset::stream(std::string_view sensor_id) const {
    if (const auto* s = find_stream(sensor_id)) return *s;
    throw Error(ErrorKind::Incompatible, "unknown sensor '" + std::string(sensor_id) + "'");
}

const EventLog* Dataset::find_log(std::string_view event_type) const {
    auto it = std::lower_bound(logs.begin(), logs.end(), event_type,
                               [](const EventLog& l, std::string_view t) { return l.event_type < t; });
    return (it != logs.end() && it->event_type == event_type) ? &*it : nullptr;
}

const EventLog& Dataset::log(std::string_view event_type) const {
    if (const auto* l = find_log(event_type)) return *l;
    throw Error(ErrorKind::Incompatible, "unknown event type '" + std::string(event_type) + "'");
}

TimeRange Dataset::segment(Segment s) const {
    switch (s) {
        case Segment::Dev: return {span.begin, split.dev_end};
        case Segment::Train: return {split.dev_end, split.train_end};
        case Segment::Test: return {split.train_end, span.end};
    }
    return {};
}

std::vector<std::string> Dataset::sensor_ids() const {
    std::vector<std::string> ids;
    ids.reserve(streams.size());
    for (const auto& s : streams) ids.push_back(s.sensor_id);
    return ids;
}

std::vector<std::string> Dataset::event_types() const {
    std::vector<std::string> types;
    types.reserve(logs.size());
    for (const auto& l : logs) types.push_back(l.event_type);
    return types;
}

void validate(const Dataset& d) {
    if (d.streams.empty()) throw Error(ErrorKind::Data, "no sensors");
    if (!(d.span.begin <= d.split.dev_end && d.split.dev_end < d.split.train_end &&
          d.split.train_end < d.span.end)) {
        throw Error(ErrorKind::Data, "split boundaries must satisfy start <= dev_end < train_end < end");
    }
    for (std::size_t i = 0; i < d.streams.size(); ++i) {
        const auto& s = d.streams[i];
        if (i > 0 && !(d.streams[i - 1].sensor_id < s.sensor_id))
            throw Error(ErrorKind::Data, "streams not sorted or duplicated at '" + s.sensor_id + "'");
        if (s.times.size() != s.values.size())
            throw Error(ErrorKind::Data, "stream '" + s.sensor_id + "' has mismatched columns");
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (!std::isfinite(s.values[k]))
                throw Error(ErrorKind::Data, "stream '" + s.sensor_id + "' holds a non-finite value");
            if (k > 0 && s.times[k] <= s.times[k - 1])
                throw Error(ErrorKind::Data, "timestamps not strictly increasing in stream '" + s.sensor_id + "'");
        }
    }
    for (std::size_t i = 0; i < d.logs.size(); ++i) {
        const auto& l = d.logs[i];
        if (i > 0 && !(d.logs[i - 1].event_type < l.event_type))
            throw Error(ErrorKind::Data, "event logs not sorted or duplicated at '" + l.event_type + "'");
        for (std::size_t k = 0; k < l.records.size(); ++k) {
            if (l.records[k].label > 1)
                throw Error(ErrorKind::Data, "event log '" + l.event_type + "' has a label other than 0/1");
            if (k > 0 && l.records[k].time <= l.records[k - 1].time)
                throw Error(ErrorKind::Data, "timestamps not strictly increasing in event log '" + l.event_type + "'");
        }
    }
}

namespace {

[[noreturn]] void row_error(std::string_view origin, std::size_t line, std::string_view why) {
    std::ostringstream os;
    os << origin << ':' << line << ": " << why;
    throw Error(ErrorKind::Data, os.str());
}

// Walks `text` line by line after checking the header. Calls on_row(fields, line_no).
template <class OnRow>
void for_each_row(std::string_view text, std::string_view origin, std::string_view header, OnRow&& on_row) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!saw_header) {
            if (line != header) row_error(origin, line_no, "expected header '" + std::string(header) + "'");
            saw_header = true;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            row_error(origin, line_no, "expected two comma-separated fields");
        on_row(line.substr(0, comma), line.substr(comma + 1), line_no);
    }
    if (!saw_header) row_error(origin, 1, "missing header '" + std::string(header) + "'");
}

Timestamp parse_timestamp(std::string_view field, std::string_view origin, std::size_t line) {
    Timestamp t = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), t);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        row_error(origin, line, "malformed timestamp '" + std::string(field) + "'");
    return t;
}

std::string stream_name(std::string_view origin) {
    return fs::path(std::string(origin)).stem().string();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Data, "cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

std::vector<fs::path> list_csv(const fs::path& dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

SensorStream parse_sensor_csv(std::string_view text, std::string_view origin, std::vector<std::string>* warnings) {
    SensorStream s;
    s.sensor_id = stream_name(origin);
    std::size_t duplicates = 0;
    for_each_row(text, origin, "timestamp_ns,value", [&](std::string_view tf, std::string_view vf, std::size_t line) {
        const Timestamp t = parse_timestamp(tf, origin, line);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(vf.data(), vf.data() + vf.size(), v);
        if (ec != std::errc{} || ptr != vf.data() + vf.size() || vf.empty() || !std::isfinite(v))
            row_error(origin, line, "malformed value '" + std::string(vf) + "'");
        if (!s.times.empty()) {
            if (t == s.times.back()) {
                ++duplicates;
                return;
            }
            if (t < s.times.back())
                throw Error(ErrorKind::Data, "timestamps not strictly increasing in stream '" + s.sensor_id +
                                                 "' (" + std::string(origin) + ":" + std::to_string(line) + ")");
        }
        s.times.push_back(t);
        s.values.push_back(v);
    });
    if (duplicates > 0 && warnings != nullptr) {
        warnings->push_back("stream '" + s.sensor_id + "': dropped " + std::to_string(duplicates) +
                            " duplicate timestamp(s), kept first");
    }
    return s;
}

EventLog parse_event_csv(std::string_view text, std::string_view origin, std::vector<std::string>* warnings) {
    EventLog log;
    log.event_type = stream_name(origin);
    std::size_t duplicates = 0;
    for_each_row(text, origin, "timestamp_ns,label", [&](std::string_view tf, std::string_view lf, std::size_t line) {
        const Timestamp t = parse_timestamp(tf, origin, line);
        if (lf != "0" && lf != "1") row_error(origin, line, "label must be 0 or 1, got '" + std::string(lf) + "'");
        if (!log.records.empty()) {
            if (t == log.records.back().time) {
                ++duplicates;
                return;
            }
            if (t < log.records.back().time)
                throw Error(ErrorKind::Data, "timestamps not strictly increasing in event log '" + log.event_type +
                                                 "' (" + std::string(origin) + ":" + std::to_string(line) + ")");
        }
        log.records.push_back({t, static_cast<std::uint8_t>(lf[0] - '0')});
    });
    if (duplicates > 0 && warnings != nullptr) {
        warnings->push_back("event log '" + log.event_type + "': dropped " + std::to_string(duplicates) +
                            " duplicate timestamp(s), kept first");
    }
    return log;
}

Dataset ingest_corpus(const fs::path& root) {
    const fs::path meta_path = root / "meta.json";
    if (!fs::exists(meta_path)) throw Error(ErrorKind::Data, "missing " + meta_path.string());
    json meta;
    try {
        meta = json::parse(read_file(meta_path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, meta_path.string() + ": " + e.what());
    }

    const auto sensor_files = list_csv(root / "sensors");
    if (sensor_files.empty()) throw Error(ErrorKind::Data, "no sensors");
    const auto event_files = list_csv(root / "events");

    Dataset d;
    d.streams.resize(sensor_files.size());
    d.logs.resize(event_files.size());
    std::vector<std::vector<std::string>> sensor_warnings(sensor_files.size());
    std::vector<std::vector<std::string>> event_warnings(event_files.size());
    parallel_for(sensor_files.size() + event_files.size(), [&](std::size_t i) {
        if (i < sensor_files.size()) {
            const auto& p = sensor_files[i];
            d.streams[i] = parse_sensor_csv(read_file(p), p.string(), &sensor_warnings[i]);
        } else {
            const std::size_t j = i - sensor_files.size();
            const auto& p = event_files[j];
            d.logs[j] = parse_event_csv(read_file(p), p.string(), &event_warnings[j]);
        }
    });
    std::sort(d.streams.begin(), d.streams.end(),
              [](const SensorStream& a, const SensorStream& b) { return a.sensor_id < b.sensor_id; });
    std::sort(d.logs.begin(), d.logs.end(),
              [](const EventLog& a, const EventLog& b) { return a.event_type < b.event_type; });
    for (auto& w : sensor_warnings) d.warnings.insert(d.warnings.end(), w.begin(), w.end());
    for (auto& w : event_warnings) d.warnings.insert(d.warnings.end(), w.begin(), w.end());

    try {
        for (const auto& entry : meta.at("sensors")) {
            const auto id = entry.at("id").get<std::string>();
            auto it = std::find_if(d.streams.begin(), d.streams.end(),
                                   [&](const SensorStream& s) { return s.sensor_id == id; });
            if (it == d.streams.end()) throw Error(ErrorKind::Data, "meta.json references unknown sensor '" + id + "'");
            it->modality = entry.value("modality", std::string{});
        }
        for (const auto& s : d.streams) {
            const bool declared = std::any_of(meta.at("sensors").begin(), meta.at("sensors").end(),
                                              [&](const json& e) { return e.at("id") == s.sensor_id; });
            if (!declared) throw Error(ErrorKind::Data, "sensor file '" + s.sensor_id + "' is not declared in meta.json");
        }
        const auto& split = meta.at("split");
        d.split.dev_end = split.at("dev_end").get<Timestamp>();
        d.split.train_end = split.at("train_end").get<Timestamp>();
        if (meta.contains("span")) {
            d.span.begin = meta["span"].at("start").get<Timestamp>();
            d.span.end = meta["span"].at("end").get<Timestamp>();
        } else {
            // Fall back to the covered time range of all files.
            Timestamp lo = std::numeric_limits<Timestamp>::max();
            Timestamp hi = std::numeric_limits<Timestamp>::min();
            for (const auto& s : d.streams)
                if (!s.empty()) lo = std::min(lo, s.times.front()), hi = std::max(hi, s.times.back());
            for (const auto& l : d.logs)
                if (!l.records.empty())
                    lo = std::min(lo, l.records.front().time), hi = std::max(hi, l.records.back().time);
            d.span = {lo, hi + kNanosPerSecond};
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, meta_path.string() + ": " + e.what());
    }

    validate(d);
    return d;
}

void write_corpus(const Dataset& d, const fs::path& root) {
    fs::create_directories(root / "sensors");
    fs::create_directories(root / "events");

    json meta;
    meta["span"] = {{"start", d.span.begin}, {"end", d.span.end}};
    meta["split"] = {{"dev_end", d.split.dev_end}, {"train_end", d.split.train_end}};
    meta["sensors"] = json::array();
    for (const auto& s : d.streams) meta["sensors"].push_back({{"id", s.sensor_id}, {"modality", s.modality}});
    write_text_file(root / "meta.json", meta.dump(2) + "\n");

    parallel_for(d.streams.size() + d.logs.size(), [&](std::size_t i) {
        std::string out;
        if (i < d.streams.size()) {
            const auto& s = d.streams[i];
            out.reserve(s.size() * 32 + 32);
            out += "timestamp_ns,value\n";
            for (std::size_t k = 0; k < s.size(); ++k) {
                append_int(out, s.times[k]);
                out += ',';
                append_double(out, s.values[k]);
                out += '\n';
            }
            write_text_file(root / "sensors" / (s.sensor_id + ".csv"), out);
        } else {
            const auto& l = d.logs[i - d.streams.size()];
            out.reserve(l.records.size() * 24 + 32);
            out += "timestamp_ns,label\n";
            for (const auto& r : l.records) {
                append_int(out, r.time);
                out += ',';
                out += static_cast<char>('0' + r.label);
                out += '\n';
            }
            write_text_file(root / "events" / (l.event_type + ".csv"), out);
        }
    });
}

std::vector<Instance> build_instances(const EventLog& log, TimeRange segment, std::int64_t sample_every_s) {
    if (sample_every_s < 1) throw Error(ErrorKind::Invalid, "sample_every must be >= 1 second");
    std::vector<Instance> out;
    if (segment.end <= segment.begin) return out;

    std::vector<Timestamp> positives;
    for (const auto& r : log.records)
        if (r.label == 1 && segment.contains(r.time)) positives.push_back(r.time);

    const Timestamp step = seconds_to_ns(sample_every_s);
    const auto slots = static_cast<std::size_t>((segment.duration() - 1) / step + 1);
    out.reserve(slots + positives.size());

    auto pos = positives.begin();
    for (std::size_t k = 0; k < slots; ++k) {
        const Timestamp g = segment.begin + static_cast<Timestamp>(k) * step;
        while (pos != positives.end() && *pos < g) out.push_back({log.event_type, *pos++, 1});
        // Any 1-event inside [g, g + 1 s) claims this second.
        if (pos != positives.end() && *pos < g + kNanosPerSecond) continue;
        out.push_back({log.event_type, g, 0});
    }
    while (pos != positives.end()) out.push_back({log.event_type, *pos++, 1});
    return out;
}

std::pair<std::size_t, std::size_t> window_bounds(const SensorStream& stream, Timestamp anchor,
                                                  std::int64_t t_minus_s, std::int64_t t_plus_s) {
    if (t_minus_s >= t_plus_s) throw Error(ErrorKind::Invalid, "window requires t_minus < t_plus");
    const Timestamp lo = anchor + seconds_to_ns(t_minus_s);
    const Timestamp hi = anchor + seconds_to_ns(t_plus_s);
    const auto first = std::lower_bound(stream.times.begin(), stream.times.end(), lo);
    const auto last = std::lower_bound(first, stream.times.end(), hi);
    return {static_cast<std::size_t>(first - stream.times.begin()), static_cast<std::size_t>(last - stream.times.begin())};
}

std::span<const double> slice_window(const SensorStream& stream, Timestamp anchor, std::int64_t t_minus_s,
                                     std::int64_t t_plus_s) {
    const auto [first, last] = window_bounds(stream, anchor, t_minus_s, t_plus_s);
    return std::span<const double>(stream.values).subspan(first, last - first);
}

const double* last_value_before(const SensorStream& stream, Timestamp t) {
    const auto it = std::lower_bound(stream.times.begin(), stream.times.end(), t);
    if (it == stream.times.begin()) return nullptr;
    return &stream.values[static_cast<std::size_t>(it - stream.times.begin()) - 1];
}

}  // namespace spoofguard
