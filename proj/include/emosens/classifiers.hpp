#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "emosens/emotion.hpp"
#include "emosens/matrix.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

enum class ModelKind { DecisionTree, RandomForest, Gbdt, AdaBoost, Knn, GaussianNb };

// Tags: dt, rf, gbdt, adaboost, knn, gnb. `lightgbm`, `xgboost` and `nb` are
// accepted as aliases when parsing.
std::string_view model_tag(ModelKind kind) noexcept;
ModelKind parse_model_tag(std::string_view tag);

using ClassScores = std::array<double, kNumEmotions>;

// Per-algorithm numeric hyperparameters. Unset keys take the algorithm's
// default; keys the algorithm does not use are rejected by validate().
class HyperParams {
 public:
  HyperParams() = default;
  HyperParams(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  HyperParams& set(const std::string& key, double value) {
    values_[key] = value;
    return *this;
  }
  bool has(const std::string& key) const { return values_.contains(key); }
  double get(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  const std::map<std::string, double>& values() const { return values_; }

  // Throws InvalidHyperParam for unknown keys or out-of-range values.
  void validate(ModelKind kind) const;

  friend bool operator==(const HyperParams&, const HyperParams&) = default;

 private:
  std::map<std::string, double> values_;
};

// Defaults for every key `kind` understands, overlaid with `hp`.
HyperParams resolved_hyperparams(ModelKind kind, const HyperParams& hp);

// ---------------------------------------------------------------------------
// Model state

// Flat binary tree. A node with feature < 0 is a leaf; samples with
// x[feature] <= threshold go left.
template <typename Leaf>
struct Tree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Leaf leaf{};
  };
  std::vector<Node> nodes;

  const Leaf& evaluate(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].leaf;
  }
  std::size_t depth() const;
  std::size_t leaf_count() const;
};

using ClassificationTree = Tree<ClassScores>;  // leaf = class frequency distribution
using RegressionTree = Tree<double>;          // leaf = raw score increment

struct DecisionTreeState {
  ClassificationTree tree;
};

struct RandomForestState {
  std::vector<ClassificationTree> trees;
  std::vector<std::uint64_t> seeds;
};

struct GbdtState {
  // rounds[r][c] is the tree fitted for class c in round r.
  std::vector<std::array<RegressionTree, kNumEmotions>> rounds;
  double learning_rate = 0.1;
  ClassScores base_scores{};
  // Mean cross-entropy on the training set after 0..n rounds.
  std::vector<double> train_loss;
};

struct Stump {
  int feature = -1;  // -1: constant prediction `left_class`
  double threshold = 0.0;
  Emotion left_class = Emotion::Calmness;
  Emotion right_class = Emotion::Calmness;
};

struct AdaBoostState {
  std::vector<Stump> stumps;
  std::vector<double> stump_weights;
};

struct KnnState {
  Matrix train;
  std::vector<Emotion> labels;
  std::size_t k = 1;
};

struct GaussianNbState {
  std::array<std::vector<double>, kNumEmotions> means;
  std::array<std::vector<double>, kNumEmotions> variances;
  ClassScores priors{};
};

using ModelState = std::variant<DecisionTreeState, RandomForestState, GbdtState, AdaBoostState,
                                KnnState, GaussianNbState>;

struct Model {
  ModelState state;
  HyperParams hyperparams;  // fully resolved
  std::size_t n_features = 0;

  ModelKind kind() const noexcept { return static_cast<ModelKind>(state.index()); }
};

// ---------------------------------------------------------------------------
// Training. All trainers throw EmptyTrain on zero rows and InvalidHyperParam
// on bad settings; output is deterministic for a fixed seed.

Model train_decision_tree(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
Model train_random_forest(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
// Throws NonFiniteGradient if raw scores overflow.
Model train_gbdt(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
Model train_adaboost(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
// Throws InvalidK when k exceeds the number of training rows.
Model train_knn(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
Model train_gaussian_nb(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});

Model train_model(ModelKind kind, const Matrix& x, std::span<const Emotion> y, const HyperParams& hp = {});
Model train_model(ModelKind kind, const LabeledDataset& data, const HyperParams& hp = {});

// ---------------------------------------------------------------------------
// Inference. Both throw ShapeError when the width differs from training.

std::vector<Emotion> predict(const Model& model, const Matrix& x);
// n x 9 matrix; rows sum to 1.
Matrix predict_proba(const Model& model, const Matrix& x);

// GBDT raw scores using only the first `rounds` boosting rounds.
Matrix gbdt_raw_scores(const GbdtState& state, const Matrix& x, std::size_t rounds);

// ---------------------------------------------------------------------------
// Serialization: versioned JSON document with nested tree objects.

inline constexpr std::string_view kModelFormatVersion = "1.0";

std::string model_to_json(const Model& model);
// Accepts any 1.x document.
Model model_from_json(std::string_view text);

// ---------------------------------------------------------------------------
// Split search primitives, exposed for verification.

struct HistogramSplit {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Best gradient-boosting split of all rows using equal-frequency histograms
// with at most `n_bins` bins per feature. Gain is
// GL^2/(HL+l) + GR^2/(HR+l) - G^2/(H+l).
HistogramSplit best_histogram_split(const Matrix& x, std::span<const double> gradients,
                                    std::span<const double> hessians, std::size_t n_bins,
                                    double lambda, std::size_t min_samples_leaf = 1);

}  // namespace emosens
