#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spoofguard/data.hpp"
#include "spoofguard/distance.hpp"

namespace spoofguard {

/// Relative window [t_minus, t_plus) in whole seconds around an event anchor.
struct WindowCandidate {
    std::int64_t t_minus = 0;
    std::int64_t t_plus = 0;
    [[nodiscard]] std::int64_t length() const { return t_plus - t_minus; }
    bool operator==(const WindowCandidate&) const = default;
};

struct EventSignatureWindow {
    std::string sensor_id;
    std::int64_t t_minus = 0;
    std::int64_t t_plus = 0;
    double rmi = 0.0;  // selection score in [0, 1]
    [[nodiscard]] WindowCandidate window() const { return {t_minus, t_plus}; }
    bool operator==(const EventSignatureWindow&) const = default;
};

struct SensorSelection {
    std::string event_type;
    std::vector<EventSignatureWindow> windows;  // descending score, then sensor id
    double threshold = 0.0;
    [[nodiscard]] std::vector<std::string> sensor_ids() const;
    bool operator==(const SensorSelection&) const = default;
};

enum class EswMethod { MutualInformation, DistanceBased };

struct EswOptions {
    std::int64_t search_min_s = -30;
    std::int64_t search_max_s = 30;
    std::int64_t sample_every_s = 100;  // 0-instance grid spacing on the dev split
    std::size_t rmi_bins = 8;
    // Distance-based variant only.
    std::size_t max_pairs = 200;
    BandSpec band = BandSpec::default_band();
    std::uint64_t seed = 0;
};

/// Every integer window lo <= t_minus < t_plus <= hi, ordered by (t_minus, t_plus).
/// [-30, +30] yields C(61, 2) = 1830 candidates.
std::vector<WindowCandidate> window_grid(std::int64_t lo = -30, std::int64_t hi = 30);

/// Mean absolute first difference; 0 for fewer than two points.
double window_statistic(std::span<const double> series);

/// I(E;S)/H(E), with S the equal-frequency bin of each statistic. Tied values
/// share a bin (bin = floor(bins * #smaller / n)), so the estimate depends on
/// ranks only. Throws Error(Invalid) for length mismatch, n < 2 or one class.
double rmi(std::span<const std::uint8_t> labels, std::span<const double> statistics, std::size_t bins = 8);

/// Scores of every window_grid() candidate for one (event, sensor) on the dev split.
std::vector<double> esw_scores(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                               const EswOptions& options, EswMethod method = EswMethod::MutualInformation);

/// Argmax of esw_scores; ties go to the shorter window, then smaller |t_minus|,
/// then smaller t_minus. Throws Error(Untrainable) when dev holds no 1-event.
EventSignatureWindow search_esw(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                                const EswOptions& options);

/// Same grid scored by DTW class separation:
///   mean DTW over cross-class pairs / (mean DTW over 1-1 pairs + 1e-9).
/// With a single dev 1-event the denominator is dropped. The returned rmi is
/// 1 - 1/max(ratio, 1), an order-preserving map onto [0, 1).
EventSignatureWindow search_esw_distance_based(const Dataset& dataset, std::string_view event_type,
                                               std::string_view sensor_id, const EswOptions& options);

/// Runs the window search on every sensor and keeps those scoring >= threshold.
/// Throws Error(Untrainable) if none pass.
SensorSelection select_sensors(const Dataset& dataset, std::string_view event_type, double threshold,
                               const EswOptions& options, EswMethod method = EswMethod::MutualInformation);

/// Picks the best index of `scores` over `grid` using the tie-break rule above.
std::size_t best_window_index(std::span<const WindowCandidate> grid, std::span<const double> scores);

/// Intersection over union of two windows on the time axis.
double window_iou(WindowCandidate a, WindowCandidate b);

}  // namespace spoofguard
