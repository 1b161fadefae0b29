#include "spoofguard/statistical.hpp"

#include <algorithm>
#include <cmath>

#include "spoofguard/parallel.hpp"

namespace spoofguard {

std::array<double, kStatFeatures> window_summary(std::span<const double> series) {
    std::array<double, kStatFeatures> out{};
    if (series.empty()) return out;
    const auto n = static_cast<double>(series.size());
    double sum = 0.0;
    for (double v : series) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    out[0] = mean;
    out[1] = std::sqrt(ss / n);
    out[2] = *lo;
    out[3] = *hi;
    out[4] = window_statistic(series);
    return out;
}

namespace {

void embed_into(const Instance& instance, const StatisticalContext& ctx, std::span<double> out,
                std::span<std::uint8_t> imputed) {
    for (std::size_t s = 0; s < ctx.selection.windows.size(); ++s) {
        const auto& w = ctx.selection.windows[s];
        const auto prepared = prepare_window(ctx.dataset.stream(w.sensor_id), ctx.stats.at(w.sensor_id),
                                             instance.anchor, w.t_minus, w.t_plus);
        const auto summary = window_summary(prepared.values);
        std::copy(summary.begin(), summary.end(), out.begin() + static_cast<std::ptrdiff_t>(s * kStatFeatures));
        imputed[s] = prepared.imputed;
    }
}

}  // namespace

StatVector embed_statistical(const Instance& instance, const StatisticalContext& ctx) {
    StatVector v;
    v.values.resize(ctx.selection.windows.size() * kStatFeatures);
    v.imputed.resize(ctx.selection.windows.size());
    embed_into(instance, ctx, v.values, v.imputed);
    return v;
}

EmbeddingMatrix embed_statistical_all(std::span<const Instance> instances, const StatisticalContext& ctx) {
    const std::size_t s = ctx.selection.windows.size();
    EmbeddingMatrix m;
    m.values = Matrix(instances.size(), s * kStatFeatures);
    m.imputed.assign(instances.size() * s, 0);
    m.column_labels = statistical_column_labels(ctx.selection);
    parallel_for(instances.size(), [&](std::size_t i) {
        embed_into(instances[i], ctx, m.values.row(i), std::span<std::uint8_t>(m.imputed).subspan(i * s, s));
    });
    return m;
}

std::vector<std::string> statistical_column_labels(const SensorSelection& selection) {
    static constexpr const char* kNames[kStatFeatures] = {"mean", "std", "min", "max", "mean_abs_diff"};
    std::vector<std::string> labels;
    for (const auto& w : selection.windows)
        for (const char* name : kNames) labels.push_back(w.sensor_id + "/" + name);
    return labels;
}

}  // namespace spoofguard
