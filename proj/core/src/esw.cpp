#include "spoofguard/esw.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spoofguard/dissim.hpp"
#include "spoofguard/parallel.hpp"
#include "spoofguard/rng.hpp"

namespace spoofguard {

std::vector<std::string> SensorSelection::sensor_ids() const {
    std::vector<std::string> ids;
    ids.reserve(windows.size());
    for (const auto& w : windows) ids.push_back(w.sensor_id);
    return ids;
}

std::vector<WindowCandidate> window_grid(std::int64_t lo, std::int64_t hi) {
    std::vector<WindowCandidate> grid;
    for (std::int64_t a = lo; a <= hi; ++a)
        for (std::int64_t b = a + 1; b <= hi; ++b) grid.push_back({a, b});
    return grid;
}

double window_statistic(std::span<const double> series) {
    if (series.size() < 2) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) sum += std::abs(series[i] - series[i - 1]);
    return sum / static_cast<double>(series.size() - 1);
}

namespace {

double entropy2(double c0, double c1) {
    const double n = c0 + c1;
    double h = 0.0;
    if (c0 > 0) h -= (c0 / n) * std::log(c0 / n);
    if (c1 > 0) h -= (c1 / n) * std::log(c1 / n);
    return h;
}

}  // namespace

double rmi(std::span<const std::uint8_t> labels, std::span<const double> statistics, std::size_t bins) {
    const std::size_t n = labels.size();
    if (n != statistics.size()) throw Error(ErrorKind::Invalid, "rmi: labels and statistics differ in length");
    if (n < 2) throw Error(ErrorKind::Invalid, "rmi: need at least two samples");
    if (bins < 1) throw Error(ErrorKind::Invalid, "rmi: need at least one bin");

    std::size_t ones = 0;
    for (auto l : labels) ones += (l != 0);
    if (ones == 0 || ones == n) throw Error(ErrorKind::Invalid, "rmi: labels hold a single class (H(E) = 0)");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return statistics[a] < statistics[b] || (statistics[a] == statistics[b] && a < b);
    });

    std::vector<double> counts(2 * bins, 0.0);
    std::size_t k = 0;
    while (k < n) {
        std::size_t end = k;
        while (end < n && statistics[order[end]] == statistics[order[k]]) ++end;
        const std::size_t bin = std::min(bins - 1, (bins * k) / n);  // k values are strictly smaller
        for (std::size_t q = k; q < end; ++q) counts[2 * bin + (labels[order[q]] != 0)] += 1.0;
        k = end;
    }

    const double h_e = entropy2(static_cast<double>(n - ones), static_cast<double>(ones));
    double h_e_given_s = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double c0 = counts[2 * b];
        const double c1 = counts[2 * b + 1];
        if (c0 + c1 == 0) continue;
        h_e_given_s += ((c0 + c1) / static_cast<double>(n)) * entropy2(c0, c1);
    }
    return std::clamp((h_e - h_e_given_s) / h_e, 0.0, 1.0);
}

std::size_t best_window_index(std::span<const WindowCandidate> grid, std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto& c = grid[i];
        const auto& b = grid[best];
        if (scores[i] != scores[best]) {
            if (scores[i] > scores[best]) best = i;
            continue;
        }
        if (c.length() != b.length()) {
            if (c.length() < b.length()) best = i;
            continue;
        }
        const auto ca = std::abs(c.t_minus), ba = std::abs(b.t_minus);
        if (ca != ba) {
            if (ca < ba) best = i;
            continue;
        }
        if (c.t_minus < b.t_minus) best = i;
    }
    return best;
}

double window_iou(WindowCandidate a, WindowCandidate b) {
    const auto inter = std::max<std::int64_t>(0, std::min(a.t_plus, b.t_plus) - std::max(a.t_minus, b.t_minus));
    const auto uni = a.length() + b.length() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

namespace {

struct DevInstances {
    std::vector<Instance> instances;
    std::vector<std::uint8_t> labels;
    std::size_t positives = 0;
};

DevInstances dev_instances(const Dataset& dataset, std::string_view event_type, const EswOptions& options) {
    const auto& log = dataset.log(event_type);
    DevInstances out;
    out.instances = build_instances(log, dataset.segment(Segment::Dev), options.sample_every_s);
    out.labels.reserve(out.instances.size());
    for (const auto& inst : out.instances) {
        out.labels.push_back(inst.label);
        out.positives += inst.label;
    }
    if (out.positives == 0) {
        throw Error(ErrorKind::Untrainable,
                    "untrainable event '" + std::string(event_type) + "': no 1-events in the development split");
    }
    return out;
}

// Global reading index at each whole-second offset lo..hi of every instance.
std::vector<std::size_t> offset_index(const SensorStream& stream, std::span<const Instance> instances,
                                      std::int64_t lo, std::int64_t hi) {
    const auto width = static_cast<std::size_t>(hi - lo + 1);
    std::vector<std::size_t> idx(instances.size() * width);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        auto it = stream.times.begin();
        for (std::int64_t o = lo; o <= hi; ++o) {
            it = std::lower_bound(it, stream.times.end(), instances[i].anchor + seconds_to_ns(o));
            idx[i * width + static_cast<std::size_t>(o - lo)] = static_cast<std::size_t>(it - stream.times.begin());
        }
    }
    return idx;
}

std::vector<double> mi_scores(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                              const EswOptions& options) {
    const auto dev = dev_instances(dataset, event_type, options);
    const auto& stream = dataset.stream(sensor_id);
    const auto grid = window_grid(options.search_min_s, options.search_max_s);
    const auto lo = options.search_min_s;
    const auto width = static_cast<std::size_t>(options.search_max_s - lo + 1);

    // prefix[k] = sum of |x[q+1] - x[q]| for q < k
    std::vector<double> prefix(stream.size() + 1, 0.0);
    for (std::size_t k = 1; k < stream.size(); ++k)
        prefix[k] = prefix[k - 1] + std::abs(stream.values[k] - stream.values[k - 1]);

    const auto idx = offset_index(stream, dev.instances, lo, options.search_max_s);
    const std::size_t n = dev.instances.size();

    std::vector<double> scores(grid.size());
    parallel_for(grid.size(), [&](std::size_t w) {
        const auto a = static_cast<std::size_t>(grid[w].t_minus - lo);
        const auto b = static_cast<std::size_t>(grid[w].t_plus - lo);
        std::vector<double> stats(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t first = idx[i * width + a];
            const std::size_t last = idx[i * width + b];
            stats[i] = (last - first < 2) ? 0.0
                                          : (prefix[last - 1] - prefix[first]) / static_cast<double>(last - first - 1);
        }
        scores[w] = rmi(dev.labels, stats, options.rmi_bins);
    });
    return scores;
}

struct PairPlan {
    std::vector<std::pair<std::size_t, std::size_t>> cross;
    std::vector<std::pair<std::size_t, std::size_t>> within;
};

PairPlan plan_pairs(const std::vector<std::size_t>& pos, const std::vector<std::size_t>& neg, std::size_t max_pairs,
                    Rng& rng) {
    PairPlan plan;
    const std::size_t within_total = pos.size() * (pos.size() - 1) / 2;
    const std::size_t within_quota = within_total == 0 ? 0 : max_pairs / 2;
    const std::size_t cross_quota = max_pairs - within_quota;

    if (pos.size() * neg.size() <= cross_quota) {
        for (auto p : pos)
            for (auto q : neg) plan.cross.emplace_back(p, q);
    } else {
        for (std::size_t k = 0; k < cross_quota; ++k)
            plan.cross.emplace_back(pos[rng.below(pos.size())], neg[rng.below(neg.size())]);
    }
    if (within_total <= within_quota) {
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = i + 1; j < pos.size(); ++j) plan.within.emplace_back(pos[i], pos[j]);
    } else {
        for (std::size_t k = 0; k < within_quota; ++k) {
            const auto i = rng.below(pos.size());
            auto j = rng.below(pos.size() - 1);
            if (j >= i) ++j;
            plan.within.emplace_back(pos[std::min(i, j)], pos[std::max(i, j)]);
        }
    }
    return plan;
}

std::vector<double> distance_scores(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                                    const EswOptions& options) {
    const auto dev = dev_instances(dataset, event_type, options);
    const auto& stream = dataset.stream(sensor_id);
    const auto grid = window_grid(options.search_min_s, options.search_max_s);
    const auto lo = options.search_min_s;
    const auto width = static_cast<std::size_t>(options.search_max_s - lo + 1);

    const std::string sensor(sensor_id);
    const auto norm = compute_normalization(dataset, std::span<const std::string>(&sensor, 1),
                                            dataset.segment(Segment::Dev))
                          .at(sensor_id);
    std::vector<double> z(stream.size());
    for (std::size_t k = 0; k < stream.size(); ++k) z[k] = (stream.values[k] - norm.mean) / norm.stddev;

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dev.instances.size(); ++i) (dev.labels[i] ? pos : neg).push_back(i);
    Rng rng(options.seed, "esw-pairs:" + std::string(event_type) + "/" + sensor);
    const auto plan = plan_pairs(pos, neg, options.max_pairs, rng);

    // Only instances that appear in a pair need offsets.
    std::vector<std::size_t> used;
    for (const auto& [a, b] : plan.cross) used.push_back(a), used.push_back(b);
    for (const auto& [a, b] : plan.within) used.push_back(a), used.push_back(b);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::vector<Instance> subset;
    subset.reserve(used.size());
    for (auto u : used) subset.push_back(dev.instances[u]);
    const auto idx = offset_index(stream, subset, lo, options.search_max_s);
    auto slot = [&](std::size_t instance) {
        return static_cast<std::size_t>(std::lower_bound(used.begin(), used.end(), instance) - used.begin());
    };

    std::vector<double> scores(grid.size());
    parallel_for(grid.size(), [&](std::size_t w) {
        const auto a = static_cast<std::size_t>(grid[w].t_minus - lo);
        const auto b = static_cast<std::size_t>(grid[w].t_plus - lo);
        std::vector<double> fill_a(2), fill_b(2);
        auto window_of = [&](std::size_t instance, std::vector<double>& fill) -> Series {
            const std::size_t s = slot(instance);
            const std::size_t first = idx[s * width + a];
            const std::size_t last = idx[s * width + b];
            if (last > first) return Series(z).subspan(first, last - first);
            const double v = first > 0 ? z[first - 1] : 0.0;
            fill.assign(2, v);
            return Series(fill);
        };
        double cross = 0.0;
        for (const auto& [p, q] : plan.cross) cross += dtw(window_of(p, fill_a), window_of(q, fill_b), options.band);
        cross /= static_cast<double>(plan.cross.size());
        if (plan.within.empty()) {
            scores[w] = cross;
            return;
        }
        double within = 0.0;
        for (const auto& [p, q] : plan.within) within += dtw(window_of(p, fill_a), window_of(q, fill_b), options.band);
        within /= static_cast<double>(plan.within.size());
        scores[w] = cross / (within + 1e-9);
    });
    return scores;
}

EventSignatureWindow pick(std::string_view sensor_id, const EswOptions& options, const std::vector<double>& scores) {
    const auto grid = window_grid(options.search_min_s, options.search_max_s);
    const auto best = best_window_index(grid, scores);
    return {std::string(sensor_id), grid[best].t_minus, grid[best].t_plus, scores[best]};
}

}  // namespace

std::vector<double> esw_scores(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                               const EswOptions& options, EswMethod method) {
    if (options.search_min_s >= options.search_max_s) throw Error(ErrorKind::Invalid, "empty ESW search space");
    return method == EswMethod::MutualInformation ? mi_scores(dataset, event_type, sensor_id, options)
                                                  : distance_scores(dataset, event_type, sensor_id, options);
}

EventSignatureWindow search_esw(const Dataset& dataset, std::string_view event_type, std::string_view sensor_id,
                                const EswOptions& options) {
    return pick(sensor_id, options, esw_scores(dataset, event_type, sensor_id, options, EswMethod::MutualInformation));
}

EventSignatureWindow search_esw_distance_based(const Dataset& dataset, std::string_view event_type,
                                               std::string_view sensor_id, const EswOptions& options) {
    auto esw = pick(sensor_id, options, esw_scores(dataset, event_type, sensor_id, options, EswMethod::DistanceBased));
    esw.rmi = 1.0 - 1.0 / std::max(esw.rmi, 1.0);
    return esw;
}

SensorSelection select_sensors(const Dataset& dataset, std::string_view event_type, double threshold,
                               const EswOptions& options, EswMethod method) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::Config, "RMI threshold must lie in [0, 1]");
    // Fail fast on untrainable events before fanning out.
    (void)dev_instances(dataset, event_type, options);

    const auto ids = dataset.sensor_ids();
    std::vector<EventSignatureWindow> found(ids.size());
    parallel_for(ids.size(), [&](std::size_t i) {
        found[i] = method == EswMethod::MutualInformation ? search_esw(dataset, event_type, ids[i], options)
                                                          : search_esw_distance_based(dataset, event_type, ids[i], options);
    });

    SensorSelection sel;
    sel.event_type = std::string(event_type);
    sel.threshold = threshold;
    for (auto& w : found)
        if (w.rmi >= threshold) sel.windows.push_back(std::move(w));
    std::sort(sel.windows.begin(), sel.windows.end(), [](const auto& a, const auto& b) {
        return a.rmi != b.rmi ? a.rmi > b.rmi : a.sensor_id < b.sensor_id;
    });
    if (sel.windows.empty()) {
        throw Error(ErrorKind::Untrainable, "no informative sensors for event '" + std::string(event_type) + "'");
    }
    return sel;
}

}  // namespace spoofguard
