#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifier_common.hpp"
#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens {

template <typename Leaf>
std::size_t Tree<Leaf>::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

template <typename Leaf>
std::size_t Tree<Leaf>::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature < 0; }));
}

template struct Tree<ClassScores>;
template struct Tree<double>;

Model train_model(ModelKind kind, const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  switch (kind) {
    case ModelKind::DecisionTree: return train_decision_tree(x, y, hp);
    case ModelKind::RandomForest: return train_random_forest(x, y, hp);
    case ModelKind::Gbdt: return train_gbdt(x, y, hp);
    case ModelKind::AdaBoost: return train_adaboost(x, y, hp);
    case ModelKind::Knn: return train_knn(x, y, hp);
    case ModelKind::GaussianNb: return train_gaussian_nb(x, y, hp);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown model kind");
}

Model train_model(ModelKind kind, const LabeledDataset& data, const HyperParams& hp) {
  return train_model(kind, data.features, data.labels, hp);
}

namespace {

void check_width(const Model& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model.n_features) {
    throw Error(ErrorKind::ShapeError, "model expects " + std::to_string(model.n_features) +
                                           " features, got " + std::to_string(x.cols()));
  }
}

void normalize(std::span<double> row) {
  const double total = std::accumulate(row.begin(), row.end(), 0.0);
  if (total > 0.0) {
    for (double& v : row) v /= total;
  }
}

struct ProbaVisitor {
  const Matrix& x;
  Matrix& out;

  void operator()(const DecisionTreeState& s) const {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto& leaf = s.tree.evaluate(x.row(r));
      std::copy(leaf.begin(), leaf.end(), out.row(r).begin());
      normalize(out.row(r));
    }
  }

  void operator()(const RandomForestState& s) const {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto row = out.row(r);
      for (const auto& tree : s.trees) row[detail::argmax(tree.evaluate(x.row(r)))] += 1.0;
      normalize(row);
    }
  }

  void operator()(const GbdtState& s) const {
    const Matrix raw = gbdt_raw_scores(s, x, s.rounds.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto in = raw.row(r);
      auto row = out.row(r);
      const double peak = *std::max_element(in.begin(), in.end());
      for (std::size_t k = 0; k < kNumEmotions; ++k) row[k] = std::exp(in[k] - peak);
      normalize(row);
    }
  }

  void operator()(const AdaBoostState& s) const {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto row = out.row(r);
      const auto xr = x.row(r);
      for (std::size_t m = 0; m < s.stumps.size(); ++m) {
        const Stump& st = s.stumps[m];
        const Emotion e = st.feature < 0 || xr[static_cast<std::size_t>(st.feature)] <= st.threshold
                              ? st.left_class
                              : st.right_class;
        row[index_of(e)] += s.stump_weights[m];
      }
      normalize(row);
    }
  }

  void operator()(const KnnState& s) const {
    std::vector<std::pair<double, std::size_t>> dist(s.train.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto q = x.row(r);
      for (std::size_t i = 0; i < s.train.rows(); ++i) {
        const auto t = s.train.row(i);
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d += (q[j] - t[j]) * (q[j] - t[j]);
        dist[i] = {d, i};
      }
      // Lexicographic (distance, row) order: equal distances favour the lower row.
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(s.k), dist.end());
      auto row = out.row(r);
      for (std::size_t i = 0; i < s.k; ++i) row[index_of(s.labels[dist[i].second])] += 1.0;
      normalize(row);
    }
  }

  void operator()(const GaussianNbState& s) const {
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto q = x.row(r);
      ClassScores log_joint;
      log_joint.fill(-std::numeric_limits<double>::infinity());
      for (std::size_t k = 0; k < kNumEmotions; ++k) {
        if (s.priors[k] <= 0.0) continue;
        double lj = std::log(s.priors[k]);
        for (std::size_t j = 0; j < q.size(); ++j) {
          const double v = s.variances[k][j];
          const double d = q[j] - s.means[k][j];
          lj -= 0.5 * (std::log(2.0 * M_PI * v) + d * d / v);
        }
        log_joint[k] = lj;
      }
      const double peak = *std::max_element(log_joint.begin(), log_joint.end());
      auto row = out.row(r);
      for (std::size_t k = 0; k < kNumEmotions; ++k) {
        row[k] = std::isfinite(log_joint[k]) ? std::exp(log_joint[k] - peak) : 0.0;
      }
      normalize(row);
    }
  }
};

}  // namespace

Matrix predict_proba(const Model& model, const Matrix& x) {
  check_width(model, x);
  Matrix out(x.rows(), kNumEmotions);
  std::visit(ProbaVisitor{x, out}, model.state);
  return out;
}

std::vector<Emotion> predict(const Model& model, const Matrix& x) {
  check_width(model, x);
  std::vector<Emotion> labels(x.rows());
  if (const auto* gbdt = std::get_if<GbdtState>(&model.state)) {
    const Matrix raw = gbdt_raw_scores(*gbdt, x, gbdt->rounds.size());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      ClassScores s{};
      std::copy(raw.row(r).begin(), raw.row(r).end(), s.begin());
      labels[r] = emotion_from_index(detail::argmax(s));
    }
    return labels;
  }
  const Matrix proba = predict_proba(model, x);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    ClassScores s{};
    std::copy(proba.row(r).begin(), proba.row(r).end(), s.begin());
    labels[r] = emotion_from_index(detail::argmax(s));
  }
  return labels;
}

}  // namespace emosens
