#include "emosens/eval_harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "emosens/error.hpp"
#include "emosens/hrv_features.hpp"

namespace emosens {

using nlohmann::json;

FoldAssignment group_k_fold(std::span<const std::string> groups, std::size_t k) {
  std::map<std::string, std::size_t> sizes;
  for (const auto& g : groups) ++sizes[g];
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "k must be at least 2");
  if (k > sizes.size()) {
    throw Error(ErrorKind::TooManyFolds, "k = " + std::to_string(k) + " exceeds " +
                                             std::to_string(sizes.size()) + " distinct groups");
  }
  std::vector<std::pair<std::string, std::size_t>> order(sizes.begin(), sizes.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::size_t> fold_groups(k, 0), fold_rows(k, 0);
  FoldAssignment out;
  out.k = k;
  for (const auto& [group, size] : order) {
    std::size_t target = 0;
    for (std::size_t f = 1; f < k; ++f) {
      if (std::tie(fold_groups[f], fold_rows[f]) < std::tie(fold_groups[target], fold_rows[target])) {
        target = f;
      }
    }
    out.fold_of_group[group] = target;
    ++fold_groups[target];
    fold_rows[target] += size;
  }
  return out;
}

std::vector<FoldSplit> fold_splits(const FoldAssignment& folds, std::span<const std::string> groups) {
  std::vector<FoldSplit> splits(folds.k);
  for (std::size_t r = 0; r < groups.size(); ++r) {
    const std::size_t f = folds.fold_of_group.at(groups[r]);
    for (std::size_t s = 0; s < folds.k; ++s) (s == f ? splits[s].test : splits[s].train).push_back(r);
  }
  return splits;
}

MetricValues metric_values(const Metrics& m) {
  return {m.accuracy,           m.precision_macro, m.recall_macro, m.f1_macro,
          m.precision_weighted, m.recall_weighted, m.f1_weighted,  m.runtime_s};
}

Metrics evaluate_predictions(std::span<const Emotion> y_true, std::span<const Emotion> y_pred) {
  if (y_true.size() != y_pred.size() || y_true.empty()) {
    throw Error(ErrorKind::ShapeError, "need equal, non-zero numbers of true and predicted labels");
  }
  Metrics m;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++m.confusion[index_of(y_true[i])][index_of(y_pred[i])];

  const double n = static_cast<double>(y_true.size());
  double correct = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < kNumEmotions; ++c) {
    double predicted = 0.0, support = 0.0;
    for (std::size_t o = 0; o < kNumEmotions; ++o) {
      predicted += static_cast<double>(m.confusion[o][c]);
      support += static_cast<double>(m.confusion[c][o]);
    }
    const double tp = static_cast<double>(m.confusion[c][c]);
    correct += tp;
    if (support == 0.0) continue;
    const double precision = predicted > 0.0 ? tp / predicted : 0.0;
    const double recall = tp / support;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    ++present;
    m.precision_macro += precision;
    m.recall_macro += recall;
    m.f1_macro += f1;
    m.precision_weighted += precision * support;
    m.recall_weighted += recall * support;
    m.f1_weighted += f1 * support;
  }
  // Sums of ratios can land an ulp above 1.
  auto unit = [](double v) { return std::min(v, 1.0); };
  m.accuracy = correct / n;
  m.precision_macro = unit(m.precision_macro / static_cast<double>(present));
  m.recall_macro = unit(m.recall_macro / static_cast<double>(present));
  m.f1_macro = unit(m.f1_macro / static_cast<double>(present));
  m.precision_weighted = unit(m.precision_weighted / n);
  m.recall_weighted = unit(m.recall_weighted / n);
  m.f1_weighted = unit(m.f1_weighted / n);
  return m;
}

void summarize(CvReport& report) {
  report.mean.fill(0.0);
  report.std.fill(0.0);
  if (report.per_fold.empty()) return;
  const double n = static_cast<double>(report.per_fold.size());
  for (const auto& m : report.per_fold) {
    const auto v = metric_values(m);
    for (std::size_t i = 0; i < kNumMetricValues; ++i) report.mean[i] += v[i];
  }
  for (double& v : report.mean) v /= n;
  for (const auto& m : report.per_fold) {
    const auto v = metric_values(m);
    for (std::size_t i = 0; i < kNumMetricValues; ++i) {
      report.std[i] += (v[i] - report.mean[i]) * (v[i] - report.mean[i]);
    }
  }
  for (double& v : report.std) v = std::sqrt(v / n);
}

namespace {

struct FoldOutcome {
  Metrics metrics;
  double train_accuracy = 0.0;
};

FoldOutcome run_fold(const LabeledDataset& data, std::span<const std::size_t> train_rows,
                     std::span<const std::size_t> test_rows, ModelKind kind, const HyperParams& hp,
                     const std::string& fold_name) {
  const auto start = std::chrono::steady_clock::now();
  const LabeledDataset train = data.subset(train_rows);
  const LabeledDataset test = data.subset(test_rows);
  const ScalerParams scaler = fit_minmax(train.features, fold_name);
  const Matrix train_x = apply_minmax(scaler, train.features);
  const Matrix test_x = apply_minmax(scaler, test.features);
  const Model model = train_model(kind, train_x, train.labels, hp);
  const auto predicted = predict(model, test_x);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  FoldOutcome out;
  out.metrics = evaluate_predictions(test.labels, predicted);
  out.metrics.runtime_s = elapsed;
  out.train_accuracy = evaluate_predictions(train.labels, predict(model, train_x)).accuracy;
  return out;
}

}  // namespace

CvReport cross_validate(const LabeledDataset& data, ModelKind kind, const HyperParams& hp, std::size_t k) {
  CvReport report;
  report.model = kind;
  report.hyperparams = resolved_hyperparams(kind, hp);
  report.k = k;
  const auto splits = fold_splits(group_k_fold(data.groups, k), data.groups);
  for (std::size_t f = 0; f < splits.size(); ++f) {
    auto outcome = run_fold(data, splits[f].train, splits[f].test, kind, hp, "fold-" + std::to_string(f));
    report.per_fold.push_back(outcome.metrics);
    report.train_accuracy.push_back(outcome.train_accuracy);
  }
  summarize(report);
  return report;
}

GridSearchResult grid_search(const LabeledDataset& data, ModelKind kind, std::span<const HyperParams> grid,
                             std::size_t k) {
  if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "hyperparameter grid is empty");
  for (const auto& hp : grid) hp.validate(kind);
  GridSearchResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CvReport report = cross_validate(data, kind, grid[i], k);
    result.mean_accuracy.push_back(report.mean[0]);
    if (i == 0 || report.mean[0] > result.report.mean[0]) {
      result.best = grid[i];
      result.best_index = i;
      result.report = std::move(report);
    }
  }
  return result;
}

std::vector<HyperParams> default_grid(ModelKind kind) {
  std::vector<HyperParams> grid;
  auto add = [&](std::initializer_list<std::pair<const char*, double>> values) {
    HyperParams hp;
    for (const auto& [key, value] : values) hp.set(key, value);
    grid.push_back(std::move(hp));
  };
  switch (kind) {
    case ModelKind::DecisionTree:
      for (double depth : {0.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
        for (double leaf : {1.0, 2.0, 4.0, 8.0}) add({{"max_depth", depth}, {"min_samples_leaf", leaf}});
      }
      break;
    case ModelKind::RandomForest:
      for (double trees : {100.0, 50.0, 200.0}) {
        for (double depth : {0.0, 8.0}) add({{"n_trees", trees}, {"max_depth", depth}});
      }
      break;
    case ModelKind::Gbdt:
      for (double lr : {0.1, 0.05, 0.2}) {
        for (double leaves : {31.0, 7.0, 15.0}) add({{"learning_rate", lr}, {"max_leaves", leaves}});
      }
      break;
    case ModelKind::AdaBoost:
      for (double rounds : {50.0, 25.0, 100.0, 200.0}) add({{"n_rounds", rounds}});
      break;
    case ModelKind::Knn:
      for (double k : {5.0, 1.0, 3.0, 7.0, 9.0, 15.0}) add({{"k", k}});
      break;
    case ModelKind::GaussianNb:
      add({});
      break;
  }
  return grid;
}

std::vector<CurvePoint> learning_curve(const LabeledDataset& data, ModelKind kind, const HyperParams& hp,
                                       std::span<const double> fractions, std::size_t k, std::uint64_t seed) {
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "curve fractions must lie in (0, 1]");
    }
  }
  hp.validate(kind);
  const auto splits = fold_splits(group_k_fold(data.groups, k), data.groups);

  std::vector<CurvePoint> points;
  for (double fraction : fractions) {
    CurvePoint point;
    point.fraction = fraction;
    for (std::size_t f = 0; f < splits.size() && !point.skipped; ++f) {
      std::vector<std::string> train_groups;
      {
        std::set<std::string> unique;
        for (auto r : splits[f].train) unique.insert(data.groups[r]);
        train_groups.assign(unique.begin(), unique.end());
      }
      const auto keep = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(train_groups.size())));
      if (keep < 1) {
        point.skipped = true;
        break;
      }
      std::vector<std::size_t> rows;
      if (keep == train_groups.size()) {
        rows = splits[f].train;
      } else {
        std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (f + 1));
        std::shuffle(train_groups.begin(), train_groups.end(), rng);
        const std::set<std::string> chosen(train_groups.begin(),
                                           train_groups.begin() + static_cast<std::ptrdiff_t>(keep));
        for (auto r : splits[f].train) {
          if (chosen.contains(data.groups[r])) rows.push_back(r);
        }
      }
      const auto outcome = run_fold(data, rows, splits[f].test, kind, hp, "fold-" + std::to_string(f));
      point.train_accuracy += outcome.train_accuracy;
      point.val_accuracy += outcome.metrics.accuracy;
    }
    if (point.skipped) {
      point.train_accuracy = point.val_accuracy = 0.0;
    } else {
      point.train_accuracy /= static_cast<double>(splits.size());
      point.val_accuracy /= static_cast<double>(splits.size());
    }
    points.push_back(point);
  }
  return points;
}

// ---------------------------------------------------------------------------

json to_json(const HyperParams& hp) {
  json j = json::object();
  for (const auto& [key, value] : hp.values()) {
    if (value == std::floor(value) && std::abs(value) < 9.0e15) {
      j[key] = static_cast<std::int64_t>(value);
    } else {
      j[key] = value;
    }
  }
  return j;
}

HyperParams hyperparams_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidHyperParam, "hyperparameters must be a JSON object");
  HyperParams hp;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      hp.set(key, value.get<bool>() ? 1.0 : 0.0);
    } else if (value.is_number()) {
      hp.set(key, value.get<double>());
    } else {
      throw Error(ErrorKind::InvalidHyperParam, "hyperparameter '" + key + "' must be numeric");
    }
  }
  return hp;
}

std::vector<HyperParams> grid_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidHyperParam, "grid must be a JSON array of objects");
  std::vector<HyperParams> grid;
  for (const auto& point : j) grid.push_back(hyperparams_from_json(point));
  return grid;
}

json to_json(const Metrics& m) {
  json j;
  const auto values = metric_values(m);
  for (std::size_t i = 0; i < kNumMetricValues; ++i) j[std::string(kMetricNames[i])] = values[i];
  j["confusion"] = m.confusion;
  return j;
}

json to_json(const CvReport& r) {
  json j;
  j["model"] = model_tag(r.model);
  j["hyperparams"] = to_json(r.hyperparams);
  j["k"] = r.k;
  j["classes"] = kEmotionNames;
  json folds = json::array();
  for (std::size_t f = 0; f < r.per_fold.size(); ++f) {
    json fold = to_json(r.per_fold[f]);
    fold["fold"] = f;
    fold["train_accuracy"] = r.train_accuracy[f];
    folds.push_back(std::move(fold));
  }
  j["per_fold"] = folds;
  json mean, stdev;
  for (std::size_t i = 0; i < kNumMetricValues; ++i) {
    mean[std::string(kMetricNames[i])] = r.mean[i];
    stdev[std::string(kMetricNames[i])] = r.std[i];
  }
  j["mean"] = mean;
  j["std"] = stdev;
  if (r.curve_points) {
    json curve = json::array();
    for (const auto& p : *r.curve_points) {
      curve.push_back({{"fraction", p.fraction},
                       {"train_accuracy", p.train_accuracy},
                       {"val_accuracy", p.val_accuracy},
                       {"skipped", p.skipped}});
    }
    j["curve_points"] = curve;
  }
  return j;
}

std::string format_curve_csv(std::span<const CurvePoint> points) {
  std::string out = "fraction,train_acc,val_acc\n";
  for (const auto& p : points) {
    out += format_double(p.fraction) + ',';
    out += p.skipped ? std::string("skipped,skipped") : format_double(p.train_accuracy) + ',' + format_double(p.val_accuracy);
    out += '\n';
  }
  return out;
}

}  // namespace emosens
