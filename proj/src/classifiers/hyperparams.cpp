#include <cmath>
#include <limits>

#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens {
namespace {

struct Rule {
  const char* key;
  double fallback;
  double lo;
  double hi;
  bool integer;
  bool lo_open = false;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Rule> rules_for(ModelKind kind) {
  switch (kind) {
    case ModelKind::DecisionTree:
      return {{"max_depth", 0, 0, 1000, true}, {"min_samples_leaf", 1, 1, kInf, true}};
    case ModelKind::RandomForest:
      return {{"n_trees", 100, 1, 100000, true},  {"max_depth", 0, 0, 1000, true},
              {"min_samples_leaf", 1, 1, kInf, true}, {"max_features", 0, 0, kInf, true},
              {"bootstrap", 1, 0, 1, true},        {"seed", 42, 0, 9.007199254740992e15, true}};
    case ModelKind::Gbdt:
      return {{"n_rounds", 100, 1, 100000, true},
              {"learning_rate", 0.1, 0, 1, false, true},
              {"max_leaves", 31, 2, 100000, true},
              {"n_bins", 255, 2, 65535, true},
              {"lambda", 1.0, 0, kInf, false},
              {"min_samples_leaf", 5, 1, kInf, true},
              {"max_depth", 0, 0, 1000, true},
              {"subsample", 1.0, 0, 1, false, true},
              {"colsample", 1.0, 0, 1, false, true},
              {"seed", 42, 0, 9.007199254740992e15, true}};
    case ModelKind::AdaBoost:
      return {{"n_rounds", 50, 1, 100000, true}, {"seed", 42, 0, 9.007199254740992e15, true}};
    case ModelKind::Knn:
      return {{"k", 5, 1, kInf, true}};
    case ModelKind::GaussianNb:
      return {};
  }
  return {};
}

}  // namespace

std::string_view model_tag(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::DecisionTree: return "dt";
    case ModelKind::RandomForest: return "rf";
    case ModelKind::Gbdt: return "gbdt";
    case ModelKind::AdaBoost: return "adaboost";
    case ModelKind::Knn: return "knn";
    case ModelKind::GaussianNb: return "gnb";
  }
  return "unknown";
}

ModelKind parse_model_tag(std::string_view tag) {
  if (tag == "dt" || tag == "decision_tree") return ModelKind::DecisionTree;
  if (tag == "rf" || tag == "random_forest") return ModelKind::RandomForest;
  if (tag == "gbdt" || tag == "lightgbm" || tag == "xgboost") return ModelKind::Gbdt;
  if (tag == "adaboost" || tag == "ada") return ModelKind::AdaBoost;
  if (tag == "knn") return ModelKind::Knn;
  if (tag == "gnb" || tag == "nb" || tag == "naive_bayes") return ModelKind::GaussianNb;
  throw Error(ErrorKind::InvalidArgument, "unknown model tag '" + std::string(tag) + "'");
}

void HyperParams::validate(ModelKind kind) const {
  const auto rules = rules_for(kind);
  for (const auto& [key, value] : values_) {
    const Rule* rule = nullptr;
    for (const auto& r : rules) {
      if (key == r.key) rule = &r;
    }
    if (!rule) {
      throw Error(ErrorKind::InvalidHyperParam,
                  "'" + key + "' is not a hyperparameter of " + std::string(model_tag(kind)));
    }
    const bool below = rule->lo_open ? !(value > rule->lo) : !(value >= rule->lo);
    if (!std::isfinite(value) || below || value > rule->hi ||
        (rule->integer && value != std::floor(value))) {
      throw Error(ErrorKind::InvalidHyperParam, "'" + key + "' = " + std::to_string(value) + " out of range");
    }
  }
}

HyperParams resolved_hyperparams(ModelKind kind, const HyperParams& hp) {
  hp.validate(kind);
  HyperParams out;
  for (const auto& r : rules_for(kind)) out.set(r.key, hp.get(r.key, r.fallback));
  return out;
}

}  // namespace emosens
