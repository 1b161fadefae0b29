#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spoofguard/bundle.hpp"
#include "spoofguard/data.hpp"

namespace spoofguard {

struct PipelineOptions {
    PipelineKind kind = PipelineKind::Dtw;
    std::int64_t sample_every_s = 100;
    double rmi_threshold = 0.25;
    BandSpec band = BandSpec::default_band();
    std::size_t cv_folds = 5;
    std::vector<ClassifierSpec> specs = classifier_grid(GridSize::Full);
    std::size_t max_prototypes = 0;
    double rank_std_penalty = 0.5;
    EswOptions esw;  // sample_every_s, band and seed are taken from the fields above
    std::uint64_t seed = 0;
};

/// Hash of every setting that influences training, as 16 hex digits.
std::string options_fingerprint(const PipelineOptions& options);

/// Training instances stop this far before the test split so that no
/// training window reads test data.
TimeRange guarded_train_range(const Dataset& dataset, const EswOptions& esw);

struct TrainOutcome {
    ModelBundle bundle;
    std::vector<std::string> warnings;
};

/// Window search on dev, embedding and model selection on train. The test
/// split is never read. Throws Error(Untrainable) naming the event.
TrainOutcome train_event(const Dataset& dataset, const std::string& event_type, const PipelineOptions& options);

/// Feature matrix for instances under a trained bundle (DTW or statistical).
EmbeddingMatrix bundle_features(const ModelBundle& bundle, const Dataset& dataset, std::span<const Instance> instances);

/// Throws Error(Incompatible) if the dataset lacks the event log or a sensor.
void check_compatible(const ModelBundle& bundle, const Dataset& dataset);

struct EvaluationOutcome {
    std::string event_type;
    std::string classifier_id;
    PipelineKind pipeline = PipelineKind::Dtw;
    EerResult sweep;      // EER on this segment with its own threshold
    RateAt at_threshold;  // DR and FAR at the bundle threshold
    double threshold = 0.0;
    std::size_t n0 = 0, n1 = 0;
    std::size_t dropped = 0;  // instances without full sensor coverage
    bool complete = false;    // false when a class had no covered instance
    std::vector<std::string> warnings;
};

EvaluationOutcome evaluate_event(const ModelBundle& bundle, const Dataset& dataset, Segment segment);

struct VerificationDecision {
    std::string event_type;
    Timestamp claim = 0;
    double score = 0.0;
    double threshold = 0.0;
    bool genuine = false;
};

/// Scores one claimed event. Throws Error(Coverage) "insufficient evidence
/// window" when a selected sensor's window leaves the recorded span.
VerificationDecision verify_claim(const ModelBundle& bundle, const Dataset& dataset, Timestamp claim);

/// True when every selected window around `anchor` lies inside the span and
/// each stream has a reading at or before the window end.
bool has_coverage(const ModelBundle& bundle, const Dataset& dataset, Timestamp anchor);

}  // namespace spoofguard
