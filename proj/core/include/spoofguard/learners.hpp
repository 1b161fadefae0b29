#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spoofguard/matrix.hpp"

namespace spoofguard {

enum class Family { Knn, LinearSvm, RandomForest };
enum class KnnWeighting { Uniform, InverseDistance };

struct KnnParams {
    std::size_t k = 5;
    KnnWeighting weighting = KnnWeighting::Uniform;
    bool operator==(const KnnParams&) const = default;
};

struct SvmParams {
    double c = 1.0;
    std::size_t epochs = 20;
    bool operator==(const SvmParams&) const = default;
};

struct ForestParams {
    std::size_t trees = 100;
    std::size_t max_depth = 0;  // 0: unlimited
    std::size_t min_leaf = 1;
    bool operator==(const ForestParams&) const = default;
};

struct ClassifierSpec {
    Family family = Family::Knn;
    KnnParams knn;
    SvmParams svm;
    ForestParams forest;

    static ClassifierSpec make_knn(std::size_t k, KnnWeighting w);
    static ClassifierSpec make_svm(double c, std::size_t epochs);
    static ClassifierSpec make_forest(std::size_t trees, std::size_t max_depth, std::size_t min_leaf);

    /// e.g. "knn:k=3:w=uniform", "svm:C=0.1:epochs=20", "rf:trees=50:depth=inf:leaf=1"
    [[nodiscard]] std::string identifier() const;
    static ClassifierSpec parse(const std::string& identifier);

    bool operator==(const ClassifierSpec& o) const { return identifier() == o.identifier(); }
};

enum class GridSize { Small, Full };

/// Full: 10 kNN + 10 SVM + 18 RF = 38 variants. Small: 6, two per family.
std::vector<ClassifierSpec> classifier_grid(GridSize size);

struct KnnModel {
    Matrix train_x;
    std::vector<std::uint8_t> train_y;
};

struct SvmModel {
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    std::vector<double> weights;  // standardized feature space
    double bias = 0.0;
    std::vector<double> objective_trace;  // objective of the averaged iterate after each epoch
};

/// Flat tree: node i is a leaf when feature[i] < 0.
struct DecisionTree {
    std::vector<int> feature;
    std::vector<double> threshold;  // go left when x[feature] <= threshold
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> positive_fraction;  // weighted, leaves only
    bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    double oob_error = 0.0;
};

struct TrainedModel {
    ClassifierSpec spec;
    std::size_t dims = 0;
    std::size_t n_negative = 0;
    std::size_t n_positive = 0;
    std::variant<KnnModel, SvmModel, ForestModel> params;
};

/// Class imbalance is handled with inverse-frequency instance weights
/// (n / (2 n_c)) for the SVM and the forest. Deterministic in (spec, X, y, seed).
/// Throws Error(Invalid) on single-class labels or shape mismatch.
TrainedModel train(const ClassifierSpec& spec, const Matrix& x, std::span<const std::uint8_t> y, std::uint64_t seed);

/// Higher = more like a genuine 1-event. kNN: weighted share of 1-neighbours;
/// forest: share of trees voting 1; SVM: signed margin.
double score(const TrainedModel& model, std::span<const double> x);
std::vector<double> score_all(const TrainedModel& model, const Matrix& x);

/// Leaf reached by x; exposed for tests.
int tree_leaf(const DecisionTree& tree, std::span<const double> x);

/// Weighted, regularized hinge objective the SVM minimizes (bias folded in as a weight).
double svm_objective(const SvmModel& model, double c, const Matrix& x, std::span<const std::uint8_t> y);

}  // namespace spoofguard
