#include "spoofguard/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "spoofguard/parallel.hpp"

namespace spoofguard {

namespace {

// Share of sorted values strictly below t.
double share_below(const std::vector<double>& sorted, double t) {
    return static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) - sorted.begin()) /
           static_cast<double>(sorted.size());
}

}  // namespace

EerResult eer_sweep(std::span<const double> scores_0, std::span<const double> scores_1) {
    if (scores_0.empty() || scores_1.empty()) throw Error(ErrorKind::Invalid, "eer_sweep: both classes need scores");
    std::vector<double> s0(scores_0.begin(), scores_0.end());
    std::vector<double> s1(scores_1.begin(), scores_1.end());
    std::sort(s0.begin(), s0.end());
    std::sort(s1.begin(), s1.end());

    std::vector<double> cand;
    cand.reserve(s0.size() + s1.size() + 1);
    std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(cand));
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    cand.push_back(std::nextafter(cand.back(), std::numeric_limits<double>::infinity()));

    // g = FAR - (1 - DR) is non-decreasing in the threshold, -1 at the lowest
    // candidate and +1 at the sentinel. It is constant on (cand[k-1], cand[k]].
    std::vector<double> dr(cand.size()), far(cand.size()), g(cand.size());
    for (std::size_t k = 0; k < cand.size(); ++k) {
        dr[k] = share_below(s0, cand[k]);
        far[k] = share_below(s1, cand[k]);
        g[k] = far[k] + dr[k] - 1.0;
    }

    EerResult r;
    const auto first_nonneg = static_cast<std::size_t>(
        std::find_if(g.begin(), g.end(), [](double v) { return v >= 0.0; }) - g.begin());
    if (g[first_nonneg] == 0.0) {
        std::size_t last_zero = first_nonneg;
        while (last_zero + 1 < g.size() && g[last_zero + 1] == 0.0) ++last_zero;
        r.threshold = 0.5 * (cand[first_nonneg - 1] + cand[last_zero]);
        r.dr = dr[first_nonneg];
        r.far = far[first_nonneg];
    } else {
        const std::size_t hi = first_nonneg, lo = first_nonneg - 1;
        const double a = -g[lo] / (g[hi] - g[lo]);
        r.threshold = cand[lo] + a * (cand[hi] - cand[lo]);
        r.dr = dr[lo] + a * (dr[hi] - dr[lo]);
        r.far = far[lo] + a * (far[hi] - far[lo]);
    }
    r.eer = 0.5 * (r.far + 1.0 - r.dr);
    return r;
}

RateAt rates_at(std::span<const double> scores_0, std::span<const double> scores_1, double threshold) {
    RateAt r;
    if (!scores_0.empty()) {
        r.dr = static_cast<double>(std::count_if(scores_0.begin(), scores_0.end(),
                                                 [&](double s) { return s < threshold; })) /
               static_cast<double>(scores_0.size());
    }
    if (!scores_1.empty()) {
        r.far = static_cast<double>(std::count_if(scores_1.begin(), scores_1.end(),
                                                  [&](double s) { return s < threshold; })) /
                static_cast<double>(scores_1.size());
    }
    return r;
}

std::vector<CvSplit> rolling_splits(std::size_t n, std::size_t folds) {
    if (folds < 2) throw Error(ErrorKind::Config, "cross-validation needs at least 2 folds");
    std::vector<std::size_t> bound(folds + 1);
    for (std::size_t i = 0; i <= folds; ++i) bound[i] = i * n / folds;
    std::vector<CvSplit> splits;
    for (std::size_t k = 1; k < folds; ++k) {
        CvSplit s;
        for (std::size_t i = 0; i < bound[k]; ++i) s.train.push_back(i);
        for (std::size_t i = bound[k]; i < bound[k + 1]; ++i) s.validation.push_back(i);
        splits.push_back(std::move(s));
    }
    return splits;
}

MetricSummary summarize(std::span<const EerResult> per_split) {
    MetricSummary m;
    m.splits_used = per_split.size();
    if (per_split.empty()) return m;
    auto stat = [&](auto field) {
        MetricStat s;
        const double first = per_split.front().*field;
        if (std::all_of(per_split.begin(), per_split.end(), [&](const auto& r) { return r.*field == first; })) {
            s.mean = first;
            return s;
        }
        for (const auto& r : per_split) s.mean += r.*field;
        s.mean /= static_cast<double>(per_split.size());
        double ss = 0.0;
        for (const auto& r : per_split) ss += (r.*field - s.mean) * (r.*field - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(per_split.size()));
        return s;
    };
    m.eer = stat(&EerResult::eer);
    m.dr = stat(&EerResult::dr);
    m.far = stat(&EerResult::far);
    return m;
}

namespace {

bool has_both(std::span<const std::uint8_t> y, std::span<const std::size_t> rows) {
    bool zero = false, one = false;
    for (auto r : rows) (y[r] ? one : zero) = true;
    return zero && one;
}

Matrix submatrix(const Matrix& x, std::span<const std::size_t> rows, std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = x(rows[i], cols[j]);
    return out;
}

}  // namespace

CvOutcome cross_validate(const ClassifierSpec& spec, const LabeledMatrix& data, std::size_t folds, std::uint64_t seed) {
    const std::size_t n = data.x.rows;
    if (data.y.size() != n) throw Error(ErrorKind::Invalid, "cross_validate: label count differs from row count");
    const bool filter_columns = !data.column_origin.empty();
    if (filter_columns && data.column_origin.size() != data.x.cols)
        throw Error(ErrorKind::Invalid, "cross_validate: column origin count differs from column count");

    CvOutcome out;
    std::vector<EerResult> results;
    const auto splits = rolling_splits(n, folds);
    for (std::size_t k = 0; k < splits.size(); ++k) {
        const auto& s = splits[k];
        const std::string tag = "split " + std::to_string(k + 1) + ": ";
        if (s.train.empty() || s.validation.empty() || !has_both(data.y, s.train) || !has_both(data.y, s.validation)) {
            out.warnings.push_back(tag + "skipped, a fold lacks one class");
            ++out.summary.splits_skipped;
            continue;
        }
        std::vector<std::size_t> cols;
        const Timestamp cutoff = data.anchors.empty() ? 0 : data.anchors[s.validation.front()];
        for (std::size_t j = 0; j < data.x.cols; ++j)
            if (!filter_columns || data.column_origin[j] < cutoff) cols.push_back(j);
        if (cols.empty()) {
            out.warnings.push_back(tag + "skipped, no prototype precedes the validation fold");
            ++out.summary.splits_skipped;
            continue;
        }
        std::vector<std::uint8_t> ytrain, yval;
        for (auto r : s.train) ytrain.push_back(data.y[r]);
        for (auto r : s.validation) yval.push_back(data.y[r]);
        const auto model = train(spec, submatrix(data.x, s.train, cols), ytrain, seed);
        const auto scores = score_all(model, submatrix(data.x, s.validation, cols));
        std::vector<double> s0, s1;
        for (std::size_t i = 0; i < scores.size(); ++i) (yval[i] ? s1 : s0).push_back(scores[i]);
        results.push_back(eer_sweep(s0, s1));
        out.pooled_0.insert(out.pooled_0.end(), s0.begin(), s0.end());
        out.pooled_1.insert(out.pooled_1.end(), s1.begin(), s1.end());
    }
    if (results.empty()) throw Error(ErrorKind::Untrainable, "event too rare for CV");
    const auto skipped = out.summary.splits_skipped;
    out.summary = summarize(results);
    out.summary.splits_skipped = skipped;
    return out;
}

double rank_score(const MetricSummary& m, const RankOptions& options) {
    return m.dr.mean - m.far.mean - m.eer.mean - options.std_penalty * (m.eer.std + m.dr.std + m.far.std);
}

std::vector<RankedEntry> rank(std::vector<RankedEntry> entries, const RankOptions& options) {
    for (auto& e : entries) e.score = rank_score(e.summary, options);
    std::sort(entries.begin(), entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.summary.eer.mean != b.summary.eer.mean) return a.summary.eer.mean < b.summary.eer.mean;
        return a.spec.identifier() < b.spec.identifier();
    });
    return entries;
}

Selection select_best(std::span<const ClassifierSpec> specs, const LabeledMatrix& data, std::size_t folds,
                      std::uint64_t seed, const RankOptions& options) {
    if (specs.empty()) throw Error(ErrorKind::Config, "no classifier specs to select from");
    std::vector<std::optional<CvOutcome>> outcomes(specs.size());
    std::vector<std::string> failures(specs.size());
    parallel_for(specs.size(), [&](std::size_t i) {
        try {
            outcomes[i] = cross_validate(specs[i], data, folds, seed);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Untrainable) throw;
            failures[i] = e.what();
        }
    });

    Selection sel;
    std::vector<RankedEntry> entries;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!outcomes[i]) continue;
        entries.push_back({specs[i], outcomes[i]->summary, 0.0});
    }
    if (entries.empty()) throw Error(ErrorKind::Untrainable, failures.front());
    // Skipped-split warnings do not depend on the spec; report them once.
    for (const auto& o : outcomes)
        if (o) {
            sel.warnings = o->warnings;
            break;
        }

    sel.leaderboard = rank(std::move(entries), options);
    const auto& winner = sel.leaderboard.front();
    const auto idx = static_cast<std::size_t>(
        std::find(specs.begin(), specs.end(), winner.spec) - specs.begin());
    const auto& pooled = *outcomes[idx];
    sel.threshold = eer_sweep(pooled.pooled_0, pooled.pooled_1).threshold;
    sel.summary = winner.summary;
    sel.model = train(winner.spec, data.x, data.y, seed);
    return sel;
}

}  // namespace spoofguard
