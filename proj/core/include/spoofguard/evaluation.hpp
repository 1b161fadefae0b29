#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spoofguard/common.hpp"
#include "spoofguard/learners.hpp"
#include "spoofguard/matrix.hpp"

namespace spoofguard {

/// Operating point at the equal-error threshold.
/// DR: share of 0-event scores below the threshold (correctly rejected).
/// FAR: share of 1-event scores below the threshold (genuine events rejected).
struct EerResult {
    double eer = 0.0;
    double dr = 0.0;
    double far = 0.0;
    double threshold = 0.0;
};

/// Sweeps thresholds over the distinct scores. Where FAR - (1 - DR) is zero on
/// a whole interval the threshold is its midpoint; otherwise the crossing is
/// interpolated linearly between the neighbouring distinct scores.
/// Throws Error(Invalid) if either list is empty.
EerResult eer_sweep(std::span<const double> scores_0, std::span<const double> scores_1);

/// DR and FAR at a fixed threshold (verdict genuine when score >= threshold).
struct RateAt {
    double dr = 0.0;
    double far = 0.0;
};
RateAt rates_at(std::span<const double> scores_0, std::span<const double> scores_1, double threshold);

struct CvSplit {
    std::vector<std::size_t> train;       // folds 1..k
    std::vector<std::size_t> validation;  // fold k+1
};

/// K equal, time-ordered folds over n rows (boundaries floor(i*n/K)); K-1 splits.
std::vector<CvSplit> rolling_splits(std::size_t n, std::size_t folds);

/// Feature matrix with labels, rows in time order.
struct LabeledMatrix {
    Matrix x;
    std::vector<std::uint8_t> y;
    std::vector<Timestamp> anchors;
    /// Optional, one per column: anchor of the instance a column was derived
    /// from (its prototype). A split only uses columns whose origin precedes
    /// its validation fold, so no validation row is compared with itself.
    std::vector<Timestamp> column_origin;
};

struct MetricStat {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation across splits
    bool operator==(const MetricStat&) const = default;
};

struct MetricSummary {
    MetricStat eer, dr, far;
    std::size_t splits_used = 0;
    std::size_t splits_skipped = 0;
    bool operator==(const MetricSummary&) const = default;
};

MetricSummary summarize(std::span<const EerResult> per_split);

struct CvOutcome {
    MetricSummary summary;
    std::vector<double> pooled_0;  // validation scores of 0-rows, all splits
    std::vector<double> pooled_1;
    std::vector<std::string> warnings;
};

/// Trains on folds 1..k and sweeps fold k+1. Splits whose training or
/// validation part lacks a class are skipped and counted.
/// Throws Error(Untrainable) "event too rare for CV" when none is usable.
CvOutcome cross_validate(const ClassifierSpec& spec, const LabeledMatrix& data, std::size_t folds,
                         std::uint64_t seed);

struct RankOptions {
    double std_penalty = 0.5;
};

/// mean(DR) - mean(FAR) - mean(EER) - std_penalty * (std(EER) + std(DR) + std(FAR)).
double rank_score(const MetricSummary& m, const RankOptions& options = {});

struct RankedEntry {
    ClassifierSpec spec;
    MetricSummary summary;
    double score = 0.0;
};

/// Descending rank score; ties by lower mean EER, then identifier.
std::vector<RankedEntry> rank(std::vector<RankedEntry> entries, const RankOptions& options = {});

struct Selection {
    TrainedModel model;  // winner retrained on all rows
    double threshold = 0.0;
    MetricSummary summary;
    std::vector<RankedEntry> leaderboard;
    std::vector<std::string> warnings;
};

/// Cross-validates every spec, ranks them, retrains the winner on every row and
/// fixes the threshold by eer_sweep over the winner's pooled validation scores.
/// Specs with no usable split drop out; if all do, Error(Untrainable).
Selection select_best(std::span<const ClassifierSpec> specs, const LabeledMatrix& data, std::size_t folds,
                      std::uint64_t seed, const RankOptions& options = {});

}  // namespace spoofguard
