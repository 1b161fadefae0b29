#include "spoofguard/dissim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "spoofguard/parallel.hpp"
#include "spoofguard/rng.hpp"
#include "text_io.hpp"

namespace spoofguard {

const SensorNorm& NormalizationStats::at(std::string_view sensor_id) const {
    auto it = std::lower_bound(sensors.begin(), sensors.end(), sensor_id,
                               [](const SensorNorm& s, std::string_view id) { return s.sensor_id < id; });
    if (it == sensors.end() || it->sensor_id != sensor_id)
        throw Error(ErrorKind::Incompatible, "no normalization statistics for sensor '" + std::string(sensor_id) + "'");
    return *it;
}

NormalizationStats compute_normalization(const Dataset& dataset, std::span<const std::string> sensor_ids,
                                         TimeRange range) {
    NormalizationStats stats;
    for (const auto& id : sensor_ids) {
        const auto& s = dataset.stream(id);
        const auto first = std::lower_bound(s.times.begin(), s.times.end(), range.begin) - s.times.begin();
        const auto last = std::lower_bound(s.times.begin(), s.times.end(), range.end) - s.times.begin();
        SensorNorm norm{id, 0.0, 1.0};
        const auto count = static_cast<double>(last - first);
        if (count > 0) {
            double sum = 0.0;
            for (auto k = first; k < last; ++k) sum += s.values[static_cast<std::size_t>(k)];
            norm.mean = sum / count;
            double ss = 0.0;
            for (auto k = first; k < last; ++k) {
                const double d = s.values[static_cast<std::size_t>(k)] - norm.mean;
                ss += d * d;
            }
            const double sd = std::sqrt(ss / count);
            norm.stddev = (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
        }
        stats.sensors.push_back(std::move(norm));
    }
    std::sort(stats.sensors.begin(), stats.sensors.end(),
              [](const SensorNorm& a, const SensorNorm& b) { return a.sensor_id < b.sensor_id; });
    return stats;
}

PreparedWindow prepare_window(const SensorStream& stream, const SensorNorm& norm, Timestamp anchor,
                              std::int64_t t_minus_s, std::int64_t t_plus_s) {
    const auto [first, last] = window_bounds(stream, anchor, t_minus_s, t_plus_s);
    PreparedWindow out;
    if (last > first) {
        out.values.reserve(last - first);
        for (std::size_t k = first; k < last; ++k) out.values.push_back((stream.values[k] - norm.mean) / norm.stddev);
        return out;
    }
    const double fill = first > 0 ? (stream.values[first - 1] - norm.mean) / norm.stddev : 0.0;
    out.values.assign(2, fill);
    out.imputed = true;
    return out;
}

PrototypeSet build_prototypes(const Dataset& dataset, std::string_view event_type, const SensorSelection& selection,
                              const NormalizationStats& stats, TimeRange train_range, std::size_t max_prototypes,
                              std::uint64_t seed) {
    std::vector<Timestamp> anchors;
    for (const auto& r : dataset.log(event_type).records)
        if (r.label == 1 && train_range.contains(r.time)) anchors.push_back(r.time);
    if (anchors.empty()) {
        throw Error(ErrorKind::Untrainable,
                    "untrainable event '" + std::string(event_type) + "': no 1-events in the training split");
    }
    if (max_prototypes > 0 && anchors.size() > max_prototypes) {
        // Partial Fisher-Yates, then restore time order.
        Rng rng(seed, "prototypes:" + std::string(event_type));
        for (std::size_t i = 0; i < max_prototypes; ++i) {
            const auto j = i + rng.below(anchors.size() - i);
            std::swap(anchors[i], anchors[j]);
        }
        anchors.resize(max_prototypes);
        std::sort(anchors.begin(), anchors.end());
    }

    PrototypeSet set;
    set.event_type = std::string(event_type);
    set.sensor_ids = selection.sensor_ids();
    set.prototypes.resize(anchors.size());
    for (std::size_t p = 0; p < anchors.size(); ++p) {
        auto& proto = set.prototypes[p];
        proto.anchor = anchors[p];
        for (const auto& w : selection.windows) {
            proto.series.push_back(
                prepare_window(dataset.stream(w.sensor_id), stats.at(w.sensor_id), anchors[p], w.t_minus, w.t_plus)
                    .values);
        }
    }
    return set;
}

namespace {

void check_context(const EmbeddingContext& ctx) {
    if (ctx.prototypes.sensor_ids != ctx.selection.sensor_ids())
        throw Error(ErrorKind::Incompatible, "prototype set was built for a different sensor selection");
}

std::size_t embed_into(const Instance& instance, const EmbeddingContext& ctx, std::span<double> out,
                       std::span<std::uint8_t> imputed) {
    const auto& windows = ctx.selection.windows;
    const std::size_t k = ctx.prototypes.size();
    std::size_t calls = 0;
    for (std::size_t s = 0; s < windows.size(); ++s) {
        const auto& w = windows[s];
        const auto prepared =
            prepare_window(ctx.dataset.stream(w.sensor_id), ctx.stats.at(w.sensor_id), instance.anchor, w.t_minus, w.t_plus);
        imputed[s] = prepared.imputed ? 1 : 0;
        for (std::size_t p = 0; p < k; ++p) {
            out[s * k + p] = dtw(prepared.values, ctx.prototypes.prototypes[p].series[s], ctx.band);
            ++calls;
        }
    }
    return calls;
}

}  // namespace

DissimVector embed(const Instance& instance, const EmbeddingContext& ctx) {
    check_context(ctx);
    if (!ctx.dataset.span.contains(instance.anchor))
        throw Error(ErrorKind::Coverage, "instance anchor lies outside the corpus span");
    DissimVector v;
    v.values.resize(ctx.selection.windows.size() * ctx.prototypes.size());
    v.imputed.resize(ctx.selection.windows.size());
    embed_into(instance, ctx, v.values, v.imputed);
    return v;
}

std::vector<std::string> dissim_column_labels(const PrototypeSet& prototypes) {
    std::vector<std::string> labels;
    for (const auto& id : prototypes.sensor_ids)
        for (std::size_t p = 0; p < prototypes.size(); ++p) labels.push_back(id + "/" + std::to_string(p));
    return labels;
}

EmbeddingMatrix embed_all(std::span<const Instance> instances, const EmbeddingContext& ctx) {
    check_context(ctx);
    const std::size_t sensors = ctx.selection.windows.size();
    EmbeddingMatrix m;
    m.values = Matrix(instances.size(), sensors * ctx.prototypes.size());
    m.imputed.assign(instances.size() * sensors, 0);
    m.column_labels = dissim_column_labels(ctx.prototypes);
    for (const auto& inst : instances)
        if (!ctx.dataset.span.contains(inst.anchor))
            throw Error(ErrorKind::Coverage, "instance anchor lies outside the corpus span");

    std::vector<std::size_t> calls(instances.size(), 0);
    parallel_for(instances.size(), [&](std::size_t i) {
        calls[i] = embed_into(instances[i], ctx, m.values.row(i),
                              std::span<std::uint8_t>(m.imputed).subspan(i * sensors, sensors));
    });
    for (auto c : calls) m.dtw_calls += c;
    return m;
}

void write_embedding_csv(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
    std::string out;
    for (std::size_t j = 0; j < matrix.column_labels.size(); ++j) {
        if (j) out += ',';
        out += matrix.column_labels[j];
    }
    out += '\n';
    for (std::size_t i = 0; i < matrix.values.rows; ++i) {
        const auto row = matrix.values.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            append_double(out, row[j]);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

}  // namespace spoofguard
