#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "spoofguard/dissim.hpp"

namespace spoofguard {

/// Per selected sensor: mean, std, min, max, mean |diff| of the z-scored
/// window, in that order (5 features per sensor, selection order).
struct StatVector {
    std::vector<double> values;
    std::vector<std::uint8_t> imputed;  // one flag per selected sensor
};

inline constexpr std::size_t kStatFeatures = 5;

struct StatisticalContext {
    const Dataset& dataset;
    const SensorSelection& selection;
    const NormalizationStats& stats;
};

/// Summary statistics of one series; empty input gives all zeros.
std::array<double, kStatFeatures> window_summary(std::span<const double> series);

StatVector embed_statistical(const Instance& instance, const StatisticalContext& ctx);

/// Row per instance, input order. dtw_calls stays 0.
EmbeddingMatrix embed_statistical_all(std::span<const Instance> instances, const StatisticalContext& ctx);

std::vector<std::string> statistical_column_labels(const SensorSelection& selection);

}  // namespace spoofguard
