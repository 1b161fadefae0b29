#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spoofguard/dissim.hpp"
#include "spoofguard/esw.hpp"
#include "spoofguard/evaluation.hpp"
#include "spoofguard/learners.hpp"

namespace spoofguard {

enum class PipelineKind { Dtw, Statistical, EndToEnd };

std::string_view pipeline_name(PipelineKind k);  // "dtw", "statistical", "e2e"
PipelineKind parse_pipeline(std::string_view name);

/// A trained verifier for one event type. Verification needs only this and
/// the sensor data.
struct ModelBundle {
    static constexpr int kSchemaVersion = 1;

    int schema_version = kSchemaVersion;
    std::string event_type;
    PipelineKind pipeline = PipelineKind::Dtw;
    std::int64_t sample_every_s = 100;
    BandSpec band = BandSpec::default_band();
    SensorSelection selection;
    PrototypeSet prototypes;  // empty for the statistical pipeline
    NormalizationStats stats;
    TrainedModel model;
    double threshold = 0.0;
    MetricSummary validation;
    std::vector<RankedEntry> leaderboard;
    std::string fingerprint;
};

struct BundleWriteOptions {
    /// Large numeric arrays go to a binary sidecar when they exceed this size.
    std::size_t sidecar_threshold_bytes = 10u << 20;
};

/// Writes `path` and, for large bundles, `path` + ".bin" next to it.
void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path, const BundleWriteOptions& options = {});

/// Throws Error(Incompatible) on unreadable, malformed or wrong-version bundles.
ModelBundle load_bundle(const std::filesystem::path& path);

/// Warning text when the bundle was trained under a different fingerprint.
std::optional<std::string> fingerprint_mismatch(const ModelBundle& bundle, const std::string& expected);

}  // namespace spoofguard
