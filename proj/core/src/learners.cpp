#include "spoofguard/learners.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spoofguard/parallel.hpp"
#include "spoofguard/rng.hpp"
#include "text_io.hpp"

namespace spoofguard {

ClassifierSpec ClassifierSpec::make_knn(std::size_t k, KnnWeighting w) {
    ClassifierSpec s;
    s.family = Family::Knn;
    s.knn = {k, w};
    return s;
}

ClassifierSpec ClassifierSpec::make_svm(double c, std::size_t epochs) {
    ClassifierSpec s;
    s.family = Family::LinearSvm;
    s.svm = {c, epochs};
    return s;
}

ClassifierSpec ClassifierSpec::make_forest(std::size_t trees, std::size_t max_depth, std::size_t min_leaf) {
    ClassifierSpec s;
    s.family = Family::RandomForest;
    s.forest = {trees, max_depth, min_leaf};
    return s;
}

std::string ClassifierSpec::identifier() const {
    std::string id;
    switch (family) {
        case Family::Knn:
            id = "knn:k=" + std::to_string(knn.k) +
                 (knn.weighting == KnnWeighting::Uniform ? ":w=uniform" : ":w=distance");
            break;
        case Family::LinearSvm:
            id = "svm:C=" + format_double(svm.c) + ":epochs=" + std::to_string(svm.epochs);
            break;
        case Family::RandomForest:
            id = "rf:trees=" + std::to_string(forest.trees) +
                 ":depth=" + (forest.max_depth == 0 ? std::string("inf") : std::to_string(forest.max_depth)) +
                 ":leaf=" + std::to_string(forest.min_leaf);
            break;
    }
    return id;
}

ClassifierSpec ClassifierSpec::parse(const std::string& identifier) {
    std::vector<std::string> parts;
    std::stringstream ss(identifier);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    auto value = [&](std::size_t i, std::string_view key) -> std::string {
        if (i >= parts.size() || parts[i].rfind(std::string(key) + "=", 0) != 0)
            throw Error(ErrorKind::Incompatible, "malformed classifier identifier '" + identifier + "'");
        return parts[i].substr(key.size() + 1);
    };
    try {
        if (!parts.empty() && parts[0] == "knn" && parts.size() == 3) {
            const auto w = value(2, "w");
            if (w != "uniform" && w != "distance") throw Error(ErrorKind::Incompatible, "unknown kNN weighting " + w);
            return make_knn(std::stoul(value(1, "k")), w == "uniform" ? KnnWeighting::Uniform : KnnWeighting::InverseDistance);
        }
        if (!parts.empty() && parts[0] == "svm" && parts.size() == 3)
            return make_svm(std::stod(value(1, "C")), std::stoul(value(2, "epochs")));
        if (!parts.empty() && parts[0] == "rf" && parts.size() == 4) {
            const auto depth = value(2, "depth");
            return make_forest(std::stoul(value(1, "trees")), depth == "inf" ? 0 : std::stoul(depth),
                               std::stoul(value(3, "leaf")));
        }
    } catch (const std::logic_error&) {
    }
    throw Error(ErrorKind::Incompatible, "malformed classifier identifier '" + identifier + "'");
}

std::vector<ClassifierSpec> classifier_grid(GridSize size) {
    std::vector<ClassifierSpec> grid;
    if (size == GridSize::Small) {
        grid.push_back(ClassifierSpec::make_knn(3, KnnWeighting::Uniform));
        grid.push_back(ClassifierSpec::make_knn(7, KnnWeighting::InverseDistance));
        grid.push_back(ClassifierSpec::make_svm(1.0, 20));
        grid.push_back(ClassifierSpec::make_svm(10.0, 100));
        grid.push_back(ClassifierSpec::make_forest(50, 0, 1));
        grid.push_back(ClassifierSpec::make_forest(100, 10, 5));
        return grid;
    }
    for (std::size_t k : {1, 3, 5, 7, 9})
        for (auto w : {KnnWeighting::Uniform, KnnWeighting::InverseDistance}) grid.push_back(ClassifierSpec::make_knn(k, w));
    for (double c : {0.01, 0.1, 1.0, 10.0, 100.0})
        for (std::size_t e : {20, 100}) grid.push_back(ClassifierSpec::make_svm(c, e));
    for (std::size_t t : {50, 100, 200})
        for (std::size_t d : {0, 10, 5})
            for (std::size_t l : {1, 5}) grid.push_back(ClassifierSpec::make_forest(t, d, l));
    return grid;
}

namespace {

std::array<double, 2> class_weights(std::span<const std::uint8_t> y) {
    double n1 = 0;
    for (auto v : y) n1 += (v != 0);
    const double n = static_cast<double>(y.size());
    return {n / (2.0 * (n - n1)), n / (2.0 * n1)};
}

// ---- kNN -------------------------------------------------------------------

double knn_score(const KnnParams& p, const KnnModel& m, std::span<const double> x) {
    const std::size_t n = m.train_x.rows;
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = m.train_x.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            const double d = r[j] - x[j];
            s += d * d;
        }
        dist[i] = {std::sqrt(s), i};
    }
    const std::size_t k = std::min(p.k, n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < k; ++q) {
        const double w = p.weighting == KnnWeighting::Uniform ? 1.0 : 1.0 / (dist[q].first + 1e-12);
        num += w * m.train_y[dist[q].second];
        den += w;
    }
    return num / den;
}

// ---- linear SVM ------------------------------------------------------------

struct Standardizer {
    std::vector<double> mean, scale;

    static Standardizer fit(const Matrix& x) {
        Standardizer s;
        s.mean.assign(x.cols, 0.0);
        s.scale.assign(x.cols, 1.0);
        if (x.rows == 0) return s;
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += x(i, j);
        for (auto& m : s.mean) m /= static_cast<double>(x.rows);
        std::vector<double> ss(x.cols, 0.0);
        for (std::size_t i = 0; i < x.rows; ++i)
            for (std::size_t j = 0; j < x.cols; ++j) {
                const double d = x(i, j) - s.mean[j];
                ss[j] += d * d;
            }
        for (std::size_t j = 0; j < x.cols; ++j) {
            const double sd = std::sqrt(ss[j] / static_cast<double>(x.rows));
            s.scale[j] = sd > 0.0 ? sd : 1.0;
        }
        return s;
    }
};

Matrix standardize(const Matrix& x, std::span<const double> mean, std::span<const double> scale) {
    Matrix z(x.rows, x.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) z(i, j) = (x(i, j) - mean[j]) / scale[j];
    return z;
}

double margin(std::span<const double> w, double b, std::span<const double> z) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * z[j];
    return s;
}

// 1/2 (|w|^2 + b^2) + C * mean_i(weight_i * hinge_i), on standardized rows.
double objective_z(std::span<const double> w, double b, double c, const Matrix& z, std::span<const std::uint8_t> y) {
    const auto cw = class_weights(y);
    double reg = b * b;
    for (double v : w) reg += v * v;
    double loss = 0.0;
    for (std::size_t i = 0; i < z.rows; ++i) {
        const double yi = y[i] ? 1.0 : -1.0;
        loss += cw[y[i] ? 1 : 0] * std::max(0.0, 1.0 - yi * margin(w, b, z.row(i)));
    }
    return 0.5 * reg + c * loss / static_cast<double>(z.rows);
}

SvmModel train_svm(const SvmParams& p, const Matrix& x, std::span<const std::uint8_t> y, std::uint64_t seed) {
    if (!(p.c > 0.0)) throw Error(ErrorKind::Invalid, "SVM C must be positive");
    const auto st = Standardizer::fit(x);
    const Matrix z = standardize(x, st.mean, st.scale);
    const std::size_t n = z.rows, d = z.cols;
    const auto cw = class_weights(y);
    // Pegasos on F/C = lambda/2 |w|^2 + mean(weight * hinge), lambda = 1/C.
    const double lambda = 1.0 / p.c;
    const double radius = std::sqrt(2.0 / lambda);

    struct State {
        std::vector<double> w, w_sum;
        double b = 0.0, b_sum = 0.0;
        std::uint64_t t = 0;
    };
    State state{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};

    auto averaged = [&](const State& s, std::vector<double>& w, double& b) {
        const double inv = s.t > 0 ? 1.0 / static_cast<double>(s.t) : 0.0;
        w.resize(d);
        for (std::size_t j = 0; j < d; ++j) w[j] = s.w_sum[j] * inv;
        b = s.b_sum * inv;
    };

    SvmModel model;
    model.feature_mean = st.mean;
    model.feature_scale = st.scale;
    model.weights.assign(d, 0.0);
    model.bias = 0.0;
    double best_obj = objective_z(model.weights, model.bias, p.c, z, y);

    Rng rng(seed, "svm-shuffle");
    std::vector<std::size_t> order(n);
    double step_scale = 1.0;
    for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        bool accepted = false;
        for (int attempt = 0; attempt < 6 && !accepted; ++attempt) {
            State trial = state;
            for (std::size_t i : order) {
                ++trial.t;
                const double eta = step_scale / (lambda * static_cast<double>(trial.t));
                const double yi = y[i] ? 1.0 : -1.0;
                const auto zi = z.row(i);
                const double m = yi * margin(trial.w, trial.b, zi);
                const double shrink = 1.0 - eta * lambda;
                for (auto& v : trial.w) v *= shrink;
                trial.b *= shrink;
                if (m < 1.0) {
                    const double g = eta * cw[y[i] ? 1 : 0] * yi;
                    for (std::size_t j = 0; j < d; ++j) trial.w[j] += g * zi[j];
                    trial.b += g;
                }
                double norm2 = trial.b * trial.b;
                for (double v : trial.w) norm2 += v * v;
                if (norm2 > radius * radius) {
                    const double f = radius / std::sqrt(norm2);
                    for (auto& v : trial.w) v *= f;
                    trial.b *= f;
                }
                for (std::size_t j = 0; j < d; ++j) trial.w_sum[j] += trial.w[j];
                trial.b_sum += trial.b;
            }
            std::vector<double> w_avg;
            double b_avg = 0.0;
            averaged(trial, w_avg, b_avg);
            const double obj = objective_z(w_avg, b_avg, p.c, z, y);
            if (obj <= best_obj) {
                state = std::move(trial);
                model.weights = std::move(w_avg);
                model.bias = b_avg;
                best_obj = obj;
                accepted = true;
            } else {
                // Epoch made the averaged iterate worse: retry it with half the step size.
                step_scale *= 0.5;
            }
        }
        model.objective_trace.push_back(best_obj);
    }
    return model;
}

// ---- random forest -----------------------------------------------------------

struct TreeBuilder {
    const Matrix& x;
    std::span<const std::uint8_t> y;
    const ForestParams& params;
    std::array<double, 2> cw;
    std::size_t mtry;
    Rng& rng;
    DecisionTree tree;

    struct Sample {
        std::uint32_t row;
        std::uint32_t count;
    };

    static double impurity(double w0, double w1) {
        const double w = w0 + w1;
        return w > 0.0 ? w - (w0 * w0 + w1 * w1) / w : 0.0;
    }

    int leaf(double w0, double w1) {
        const int id = static_cast<int>(tree.feature.size());
        tree.feature.push_back(-1);
        tree.threshold.push_back(0.0);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.positive_fraction.push_back(w1 / (w0 + w1));
        return id;
    }

    int build(std::vector<Sample>& samples, std::size_t begin, std::size_t end, std::size_t depth) {
        double w0 = 0.0, w1 = 0.0;
        std::size_t count = 0;
        for (std::size_t k = begin; k < end; ++k) {
            const auto& s = samples[k];
            (y[s.row] ? w1 : w0) += s.count * cw[y[s.row] ? 1 : 0];
            count += s.count;
        }
        if (w0 == 0.0 || w1 == 0.0 || (params.max_depth > 0 && depth >= params.max_depth) ||
            count < 2 * params.min_leaf) {
            return leaf(w0, w1);
        }

        // Sample mtry distinct features.
        std::vector<std::size_t> feats(x.cols);
        std::iota(feats.begin(), feats.end(), 0);
        for (std::size_t i = 0; i < mtry; ++i) std::swap(feats[i], feats[i + rng.below(x.cols - i)]);
        feats.resize(mtry);

        const double parent = impurity(w0, w1);
        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, std::uint32_t>> vals(end - begin);
        for (const std::size_t f : feats) {
            for (std::size_t k = begin; k < end; ++k) vals[k - begin] = {x(samples[k].row, f), static_cast<std::uint32_t>(k)};
            std::sort(vals.begin(), vals.end());
            double l0 = 0.0, l1 = 0.0;
            std::size_t lcount = 0;
            for (std::size_t q = 0; q + 1 < vals.size(); ++q) {
                const auto& s = samples[vals[q].second];
                (y[s.row] ? l1 : l0) += s.count * cw[y[s.row] ? 1 : 0];
                lcount += s.count;
                if (vals[q].first == vals[q + 1].first) continue;
                if (lcount < params.min_leaf || count - lcount < params.min_leaf) continue;
                const double gain = parent - impurity(l0, l1) - impurity(w0 - l0, w1 - l1);
                double thr = 0.5 * (vals[q].first + vals[q + 1].first);
                if (!(thr < vals[q + 1].first)) thr = vals[q].first;
                const auto fi = static_cast<int>(f);
                if (gain > best_gain || (gain == best_gain && best_feature >= 0 &&
                                         (fi < best_feature || (fi == best_feature && thr < best_threshold)))) {
                    best_gain = gain;
                    best_feature = fi;
                    best_threshold = thr;
                }
            }
        }
        if (best_feature < 0 || best_gain <= 1e-12 * (w0 + w1)) return leaf(w0, w1);

        auto mid_it = std::stable_partition(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                            samples.begin() + static_cast<std::ptrdiff_t>(end), [&](const Sample& s) {
                                                return x(s.row, static_cast<std::size_t>(best_feature)) <= best_threshold;
                                            });
        const auto mid = static_cast<std::size_t>(mid_it - samples.begin());

        const int id = static_cast<int>(tree.feature.size());
        tree.feature.push_back(best_feature);
        tree.threshold.push_back(best_threshold);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.positive_fraction.push_back(w1 / (w0 + w1));
        const int l = build(samples, begin, mid, depth + 1);
        const int r = build(samples, mid, end, depth + 1);
        tree.left[static_cast<std::size_t>(id)] = l;
        tree.right[static_cast<std::size_t>(id)] = r;
        return id;
    }
};

bool tree_vote(const DecisionTree& t, std::span<const double> x) {
    return t.positive_fraction[static_cast<std::size_t>(tree_leaf(t, x))] > 0.5;
}

ForestModel train_forest(const ForestParams& p, const Matrix& x, std::span<const std::uint8_t> y, std::uint64_t seed) {
    if (p.trees == 0) throw Error(ErrorKind::Invalid, "forest needs at least one tree");
    const std::size_t n = x.rows;
    const auto cw = class_weights(y);
    const std::size_t mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(x.cols))));

    ForestModel model;
    model.trees.resize(p.trees);
    // oob[t * n + i]: -1 in-bag, else the tree's vote.
    std::vector<std::int8_t> oob(p.trees * n, -1);
    parallel_for(p.trees, [&](std::size_t t) {
        Rng rng(seed, "rf-tree", t);
        std::vector<std::uint32_t> counts(n, 0);
        for (std::size_t k = 0; k < n; ++k) ++counts[rng.below(n)];
        std::vector<TreeBuilder::Sample> samples;
        for (std::size_t i = 0; i < n; ++i)
            if (counts[i] > 0) samples.push_back({static_cast<std::uint32_t>(i), counts[i]});
        TreeBuilder builder{x, y, p, cw, std::min(mtry, x.cols), rng, {}};
        builder.build(samples, 0, samples.size(), 0);
        model.trees[t] = std::move(builder.tree);
        for (std::size_t i = 0; i < n; ++i)
            if (counts[i] == 0) oob[t * n + i] = tree_vote(model.trees[t], x.row(i)) ? 1 : 0;
    });

    std::size_t evaluated = 0, wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t votes = 0, total = 0;
        for (std::size_t t = 0; t < p.trees; ++t) {
            const auto v = oob[t * n + i];
            if (v < 0) continue;
            ++total;
            votes += static_cast<std::size_t>(v);
        }
        if (total == 0) continue;
        ++evaluated;
        const bool predicted = 2 * votes >= total;
        wrong += predicted != (y[i] != 0);
    }
    model.oob_error = evaluated ? static_cast<double>(wrong) / static_cast<double>(evaluated) : 0.0;
    return model;
}

}  // namespace

int tree_leaf(const DecisionTree& t, std::span<const double> x) {
    std::size_t node = 0;
    while (t.feature[node] >= 0) {
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(t.feature[node])] <= t.threshold[node] ? t.left[node]
                                                                                                         : t.right[node]);
    }
    return static_cast<int>(node);
}

double svm_objective(const SvmModel& model, double c, const Matrix& x, std::span<const std::uint8_t> y) {
    const Matrix z = standardize(x, model.feature_mean, model.feature_scale);
    return objective_z(model.weights, model.bias, c, z, y);
}

TrainedModel train(const ClassifierSpec& spec, const Matrix& x, std::span<const std::uint8_t> y, std::uint64_t seed) {
    if (x.rows != y.size()) throw Error(ErrorKind::Invalid, "train: row count differs from label count");
    if (x.data.size() != x.rows * x.cols) throw Error(ErrorKind::Invalid, "train: ragged feature matrix");
    TrainedModel model;
    model.spec = spec;
    model.dims = x.cols;
    for (auto v : y) (v ? model.n_positive : model.n_negative) += 1;
    if (model.n_positive == 0 || model.n_negative == 0)
        throw Error(ErrorKind::Invalid, "train: labels must contain both classes");

    const std::uint64_t s = fnv1a64(spec.identifier(), seed);
    switch (spec.family) {
        case Family::Knn: {
            if (spec.knn.k == 0) throw Error(ErrorKind::Invalid, "kNN needs k >= 1");
            model.params = KnnModel{x, std::vector<std::uint8_t>(y.begin(), y.end())};
            break;
        }
        case Family::LinearSvm: model.params = train_svm(spec.svm, x, y, s); break;
        case Family::RandomForest: model.params = train_forest(spec.forest, x, y, s); break;
    }
    return model;
}

double score(const TrainedModel& model, std::span<const double> x) {
    if (x.size() != model.dims) throw Error(ErrorKind::Invalid, "score: feature dimension mismatch");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_score(model.spec.knn, m, x);
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                double s = m.bias;
                for (std::size_t j = 0; j < x.size(); ++j) s += m.weights[j] * (x[j] - m.feature_mean[j]) / m.feature_scale[j];
                return s;
            } else {
                std::size_t votes = 0;
                for (const auto& t : m.trees) votes += tree_vote(t, x);
                return static_cast<double>(votes) / static_cast<double>(m.trees.size());
            }
        },
        model.params);
}

std::vector<double> score_all(const TrainedModel& model, const Matrix& x) {
    if (x.rows > 0 && x.cols != model.dims) throw Error(ErrorKind::Invalid, "score: feature dimension mismatch");
    std::vector<double> out(x.rows);
    parallel_for(x.rows, [&](std::size_t i) { out[i] = score(model, x.row(i)); });
    return out;
}

}  // namespace spoofguard
