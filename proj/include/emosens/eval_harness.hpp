#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "emosens/classifiers.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

// ---------------------------------------------------------------------------
// Grouped folds

struct FoldAssignment {
  std::size_t k = 0;
  std::map<std::string, std::size_t> fold_of_group;
};

struct FoldSplit {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// Groups are taken in descending example count (ties by group id) and each
// goes to the fold holding the fewest groups, then the fewest examples, then
// the lowest index. Fold group counts differ by at most one. Throws
// TooManyFolds when k exceeds the number of distinct groups.
FoldAssignment group_k_fold(std::span<const std::string> groups, std::size_t k);

std::vector<FoldSplit> fold_splits(const FoldAssignment& folds, std::span<const std::string> groups);

// ---------------------------------------------------------------------------
// Metrics

using ConfusionMatrix = std::array<std::array<std::int64_t, kNumEmotions>, kNumEmotions>;

struct Metrics {
  double accuracy = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;
  double f1_weighted = 0.0;
  ConfusionMatrix confusion{};  // [true][predicted]
  double runtime_s = 0.0;
};

inline constexpr std::size_t kNumMetricValues = 8;
inline constexpr std::array<std::string_view, kNumMetricValues> kMetricNames = {
    "accuracy",           "precision_macro", "recall_macro", "f1_macro",
    "precision_weighted", "recall_weighted", "f1_weighted",  "runtime_s"};

using MetricValues = std::array<double, kNumMetricValues>;
MetricValues metric_values(const Metrics& m);

// Precision/recall with 0/0 = 0. Macro averages run over the classes present
// in y_true; weighted averages use y_true support. Throws ShapeError on a
// length mismatch or empty input.
Metrics evaluate_predictions(std::span<const Emotion> y_true, std::span<const Emotion> y_pred);

// ---------------------------------------------------------------------------
// Cross-validation

struct CurvePoint {
  double fraction = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  bool skipped = false;  // fewer than one training group at this fraction
};

struct CvReport {
  ModelKind model = ModelKind::DecisionTree;
  HyperParams hyperparams;  // resolved
  std::size_t k = 0;
  std::vector<Metrics> per_fold;
  std::vector<double> train_accuracy;  // per fold
  MetricValues mean{};
  MetricValues std{};  // population
  std::optional<std::vector<CurvePoint>> curve_points;
};

// Per fold: fit min-max on the training rows, scale both sides, train,
// predict the held-out groups and score. Throws TooManyFolds and anything
// training throws.
CvReport cross_validate(const LabeledDataset& data, ModelKind model, const HyperParams& hp,
                        std::size_t k = 10);

// Recomputes mean/std from per_fold.
void summarize(CvReport& report);

struct GridSearchResult {
  HyperParams best;
  std::size_t best_index = 0;
  CvReport report;                         // cross-validation of `best`
  std::vector<double> mean_accuracy;       // per grid point
};

// Best mean accuracy wins; ties keep the earliest grid point. Throws EmptyGrid.
GridSearchResult grid_search(const LabeledDataset& data, ModelKind model,
                             std::span<const HyperParams> grid, std::size_t k = 10);

// Grid used when tuning without an explicit one. Always contains the default
// hyperparameters, so the tuned score never falls below the untuned one.
std::vector<HyperParams> default_grid(ModelKind model);

// For each fraction, trains on a seeded subset of each fold's training groups
// and records mean train and validation accuracy across folds.
std::vector<CurvePoint> learning_curve(const LabeledDataset& data, ModelKind model,
                                       const HyperParams& hp, std::span<const double> fractions,
                                       std::size_t k = 10, std::uint64_t seed = 42);

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json to_json(const Metrics& m);
nlohmann::json to_json(const CvReport& r);
nlohmann::json to_json(const HyperParams& hp);
HyperParams hyperparams_from_json(const nlohmann::json& j);
std::vector<HyperParams> grid_from_json(const nlohmann::json& j);
std::string format_curve_csv(std::span<const CurvePoint> points);

}  // namespace emosens
