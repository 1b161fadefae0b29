#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spoofguard/data.hpp"
#include "spoofguard/distance.hpp"
#include "spoofguard/esw.hpp"
#include "spoofguard/matrix.hpp"

namespace spoofguard {

struct SensorNorm {
    std::string sensor_id;
    double mean = 0.0;
    double stddev = 1.0;  // never 0; degenerate sensors get 1
    bool operator==(const SensorNorm&) const = default;
};

/// Per-sensor standardization learned on the training split.
struct NormalizationStats {
    std::vector<SensorNorm> sensors;  // sorted by sensor_id
    [[nodiscard]] const SensorNorm& at(std::string_view sensor_id) const;
    bool operator==(const NormalizationStats&) const = default;
};

NormalizationStats compute_normalization(const Dataset& dataset, std::span<const std::string> sensor_ids,
                                         TimeRange range);

/// A sliced, z-scored window. Empty windows are replaced by a constant series
/// of length 2 holding the last reading before the window (or the training
/// mean, i.e. 0 after scaling, when there is none).
struct PreparedWindow {
    std::vector<double> values;
    bool imputed = false;
};

PreparedWindow prepare_window(const SensorStream& stream, const SensorNorm& norm, Timestamp anchor,
                              std::int64_t t_minus_s, std::int64_t t_plus_s);

struct Prototype {
    Timestamp anchor = 0;
    std::vector<std::vector<double>> series;  // one per selected sensor, selection order
    bool operator==(const Prototype&) const = default;
};

/// Training 1-events used as reference points of the dissimilarity space.
struct PrototypeSet {
    std::string event_type;
    std::vector<std::string> sensor_ids;  // selection order
    std::vector<Prototype> prototypes;    // time order
    [[nodiscard]] std::size_t size() const { return prototypes.size(); }
    bool operator==(const PrototypeSet&) const = default;
};

/// All label-1 records of `event_type` inside `train_range` become prototypes.
/// max_prototypes > 0 keeps a seeded uniform subsample (still in time order).
/// Throws Error(Untrainable) when the range holds no 1-event.
PrototypeSet build_prototypes(const Dataset& dataset, std::string_view event_type, const SensorSelection& selection,
                              const NormalizationStats& stats, TimeRange train_range, std::size_t max_prototypes = 0,
                              std::uint64_t seed = 0);

/// Everything needed to map an instance into the dissimilarity space.
struct EmbeddingContext {
    const Dataset& dataset;
    const SensorSelection& selection;
    const PrototypeSet& prototypes;
    const NormalizationStats& stats;
    BandSpec band = BandSpec::default_band();
};

/// phi(instance): DTW to every prototype, sensor-major / prototype-minor.
struct DissimVector {
    std::vector<double> values;
    std::vector<std::uint8_t> imputed;  // one flag per selected sensor
};

DissimVector embed(const Instance& instance, const EmbeddingContext& ctx);

struct EmbeddingMatrix {
    Matrix values;                            // one row per instance, input order
    std::vector<std::uint8_t> imputed;        // rows x sensors
    std::vector<std::string> column_labels;   // "sensor_id/prototype_index"
    std::size_t dtw_calls = 0;
};

EmbeddingMatrix embed_all(std::span<const Instance> instances, const EmbeddingContext& ctx);

std::vector<std::string> dissim_column_labels(const PrototypeSet& prototypes);

/// CSV with header = column labels, one row per instance.
void write_embedding_csv(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

}  // namespace spoofguard
