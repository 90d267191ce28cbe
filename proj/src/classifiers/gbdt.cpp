// Multiclass gradient-boosted trees: softmax cross-entropy, one regression
// tree per class per round, leaf-wise growth over equal-frequency histograms.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "classifier_common.hpp"
#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"
#include "emosens/parallel.hpp"

namespace emosens {
namespace {

// Bin b of a feature covers (thresholds[b-1], thresholds[b]].
struct BinnedMatrix {
  std::vector<std::vector<double>> thresholds;  // per feature, ascending
  std::vector<std::uint16_t> bins;              // row-major, rows x features
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::uint16_t operator()(std::size_t r, std::size_t f) const { return bins[r * cols + f]; }
  std::size_t bin_count(std::size_t f) const { return thresholds[f].size() + 1; }
};

std::vector<double> feature_thresholds(std::vector<double> values, std::size_t n_bins) {
  std::sort(values.begin(), values.end());
  std::vector<double> distinct = values;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> out;
  if (distinct.size() <= n_bins) {
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
      out.push_back(detail::midpoint_threshold(distinct[i], distinct[i + 1]));
    }
    return out;
  }
  const std::size_t n = values.size();
  for (std::size_t b = 1; b < n_bins; ++b) {
    std::size_t pos = b * n / n_bins;
    while (pos < n && pos > 0 && values[pos - 1] == values[pos]) ++pos;
    if (pos == 0 || pos >= n) continue;
    const double t = detail::midpoint_threshold(values[pos - 1], values[pos]);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

BinnedMatrix bin_matrix(const Matrix& x, std::size_t n_bins) {
  BinnedMatrix bm;
  bm.rows = x.rows();
  bm.cols = x.cols();
  bm.thresholds.resize(bm.cols);
  bm.bins.resize(bm.rows * bm.cols);
  std::vector<double> column(bm.rows);
  for (std::size_t f = 0; f < bm.cols; ++f) {
    for (std::size_t r = 0; r < bm.rows; ++r) column[r] = x(r, f);
    bm.thresholds[f] = feature_thresholds(column, n_bins);
    const auto& t = bm.thresholds[f];
    for (std::size_t r = 0; r < bm.rows; ++r) {
      bm.bins[r * bm.cols + f] =
          static_cast<std::uint16_t>(std::lower_bound(t.begin(), t.end(), x(r, f)) - t.begin());
    }
  }
  return bm;
}

struct LeafSplit {
  int feature = -1;
  std::size_t bin = 0;
  double gain = 0.0;
};

struct GrowthSettings {
  std::size_t max_leaves = 31;
  std::size_t max_depth = 0;
  std::size_t min_samples_leaf = 1;
  double lambda = 1.0;
};

double score_term(double g, double h, double lambda) { return g * g / (h + lambda); }

LeafSplit find_leaf_split(const BinnedMatrix& bm, std::span<const std::size_t> rows,
                          std::span<const double> g, std::span<const double> h,
                          std::span<const std::size_t> features, const GrowthSettings& s) {
  LeafSplit best;
  double g_total = 0.0, h_total = 0.0;
  for (auto r : rows) {
    g_total += g[r];
    h_total += h[r];
  }
  const double parent = score_term(g_total, h_total, s.lambda);

  std::vector<double> hist_g, hist_h;
  std::vector<std::size_t> hist_n;
  for (std::size_t f : features) {
    const std::size_t nb = bm.bin_count(f);
    if (nb < 2) continue;
    hist_g.assign(nb, 0.0);
    hist_h.assign(nb, 0.0);
    hist_n.assign(nb, 0);
    for (auto r : rows) {
      const auto b = bm(r, f);
      hist_g[b] += g[r];
      hist_h[b] += h[r];
      ++hist_n[b];
    }
    double gl = 0.0, hl = 0.0;
    std::size_t nl = 0;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      gl += hist_g[b];
      hl += hist_h[b];
      nl += hist_n[b];
      const std::size_t nr = rows.size() - nl;
      if (nl < s.min_samples_leaf) continue;
      if (nr < s.min_samples_leaf) break;
      if (hist_n[b] == 0) continue;  // same partition as the previous bin
      const double gain =
          score_term(gl, hl, s.lambda) + score_term(g_total - gl, h_total - hl, s.lambda) - parent;
      if (gain > best.gain) best = {static_cast<int>(f), b, gain};
    }
  }
  return best;
}

RegressionTree grow_tree(const BinnedMatrix& bm, std::vector<std::size_t> rows,
                         std::span<const double> g, std::span<const double> h,
                         std::span<const std::size_t> features, const GrowthSettings& s) {
  struct Leaf {
    int node;
    std::size_t depth;
    std::vector<std::size_t> rows;
    LeafSplit split;
  };
  RegressionTree tree;
  auto leaf_value = [&](const std::vector<std::size_t>& leaf_rows) {
    double gs = 0.0, hs = 0.0;
    for (auto r : leaf_rows) {
      gs += g[r];
      hs += h[r];
    }
    return -gs / (hs + s.lambda);
  };
  auto evaluate_split = [&](Leaf& leaf) {
    if (s.max_depth > 0 && leaf.depth >= s.max_depth) {
      leaf.split = {};
      return;
    }
    leaf.split = find_leaf_split(bm, leaf.rows, g, h, features, s);
  };

  tree.nodes.emplace_back();
  tree.nodes[0].leaf = leaf_value(rows);
  std::vector<Leaf> leaves;
  leaves.push_back({0, 0, std::move(rows), {}});
  evaluate_split(leaves[0]);

  while (leaves.size() < s.max_leaves) {
    std::size_t pick = leaves.size();
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].split.feature < 0) continue;
      if (pick == leaves.size() || leaves[i].split.gain > leaves[pick].split.gain) pick = i;
    }
    if (pick == leaves.size()) break;

    Leaf parent = std::move(leaves[pick]);
    const auto f = static_cast<std::size_t>(parent.split.feature);
    Leaf left{static_cast<int>(tree.nodes.size()), parent.depth + 1, {}, {}};
    Leaf right{static_cast<int>(tree.nodes.size() + 1), parent.depth + 1, {}, {}};
    for (auto r : parent.rows) (bm(r, f) <= parent.split.bin ? left.rows : right.rows).push_back(r);

    auto& node = tree.nodes[static_cast<std::size_t>(parent.node)];
    node.feature = static_cast<int>(f);
    node.threshold = bm.thresholds[f][parent.split.bin];
    node.left = left.node;
    node.right = right.node;
    tree.nodes.emplace_back();
    tree.nodes.back().leaf = leaf_value(left.rows);
    tree.nodes.emplace_back();
    tree.nodes.back().leaf = leaf_value(right.rows);

    evaluate_split(left);
    evaluate_split(right);
    leaves[pick] = std::move(left);
    leaves.insert(leaves.begin() + static_cast<std::ptrdiff_t>(pick) + 1, std::move(right));
  }
  return tree;
}

void softmax_row(std::span<const double> scores, std::span<double> p) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    p[k] = std::exp(scores[k] - peak);
    z += p[k];
  }
  for (double& v : p) v /= z;
}

double mean_cross_entropy(const Matrix& scores, std::span<const Emotion> y) {
  std::array<double, kNumEmotions> p{};
  double loss = 0.0;
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    softmax_row(scores.row(r), p);
    loss -= std::log(std::max(p[index_of(y[r])], 1e-300));
  }
  return loss / static_cast<double>(scores.rows());
}

}  // namespace

HistogramSplit best_histogram_split(const Matrix& x, std::span<const double> gradients,
                                    std::span<const double> hessians, std::size_t n_bins,
                                    double lambda, std::size_t min_samples_leaf) {
  const BinnedMatrix bm = bin_matrix(x, n_bins);
  std::vector<std::size_t> rows(x.rows()), features(x.cols());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::iota(features.begin(), features.end(), std::size_t{0});
  GrowthSettings s;
  s.lambda = lambda;
  s.min_samples_leaf = min_samples_leaf;
  const LeafSplit best = find_leaf_split(bm, rows, gradients, hessians, features, s);
  HistogramSplit out;
  if (best.feature >= 0) {
    out.feature = best.feature;
    out.threshold = bm.thresholds[static_cast<std::size_t>(best.feature)][best.bin];
    out.gain = best.gain;
  }
  return out;
}

Matrix gbdt_raw_scores(const GbdtState& state, const Matrix& x, std::size_t rounds) {
  Matrix scores(x.rows(), kNumEmotions);
  const std::size_t used = std::min(rounds, state.rounds.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = scores.row(r);
    std::copy(state.base_scores.begin(), state.base_scores.end(), row.begin());
    for (std::size_t m = 0; m < used; ++m) {
      for (std::size_t c = 0; c < kNumEmotions; ++c) {
        row[c] += state.learning_rate * state.rounds[m][c].evaluate(x.row(r));
      }
    }
  }
  return scores;
}

Model train_gbdt(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::Gbdt, hp);
  model.n_features = x.cols();
  const auto& h = model.hyperparams;

  GrowthSettings settings;
  settings.max_leaves = static_cast<std::size_t>(h.get("max_leaves", 31));
  settings.max_depth = static_cast<std::size_t>(h.get("max_depth", 0));
  settings.min_samples_leaf = static_cast<std::size_t>(h.get("min_samples_leaf", 5));
  settings.lambda = h.get("lambda", 1.0);
  const auto n_rounds = static_cast<std::size_t>(h.get("n_rounds", 100));
  const auto n_bins = static_cast<std::size_t>(h.get("n_bins", 255));
  const double subsample = h.get("subsample", 1.0);
  const double colsample = h.get("colsample", 1.0);
  const auto seed = static_cast<std::uint64_t>(h.get("seed", 42));

  GbdtState state;
  state.learning_rate = h.get("learning_rate", 0.1);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  {
    ClassScores freq{};
    for (auto label : y) freq[index_of(label)] += 1.0;
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
      state.base_scores[k] = std::log(std::max(freq[k] / static_cast<double>(n), 1e-6));
    }
  }

  const BinnedMatrix bm = bin_matrix(x, n_bins);
  Matrix scores(n, kNumEmotions);
  for (std::size_t r = 0; r < n; ++r) {
    std::copy(state.base_scores.begin(), state.base_scores.end(), scores.row(r).begin());
  }
  state.train_loss.push_back(mean_cross_entropy(scores, y));

  Matrix prob(n, kNumEmotions);
  std::mt19937_64 rng(seed);
  for (std::size_t round = 0; round < n_rounds; ++round) {
    for (std::size_t r = 0; r < n; ++r) softmax_row(scores.row(r), prob.row(r));

    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (subsample < 1.0) {
      std::shuffle(rows.begin(), rows.end(), rng);
      rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(subsample * static_cast<double>(n)))));
      std::sort(rows.begin(), rows.end());
    }
    std::array<std::vector<std::size_t>, kNumEmotions> features;
    for (auto& fs : features) {
      fs.resize(p);
      std::iota(fs.begin(), fs.end(), std::size_t{0});
      if (colsample < 1.0) {
        std::shuffle(fs.begin(), fs.end(), rng);
        fs.resize(std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(colsample * static_cast<double>(p)))));
        std::sort(fs.begin(), fs.end());
      }
    }

    std::array<RegressionTree, kNumEmotions> trees;
    parallel_for(kNumEmotions, [&](std::size_t c) {
      std::vector<double> g(n), hs(n);
      for (std::size_t r = 0; r < n; ++r) {
        const double pc = prob(r, c);
        g[r] = pc - (index_of(y[r]) == c ? 1.0 : 0.0);
        hs[r] = pc * (1.0 - pc);
      }
      trees[c] = grow_tree(bm, rows, g, hs, features[c], settings);
    });

    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < kNumEmotions; ++c) {
        scores(r, c) += state.learning_rate * trees[c].evaluate(x.row(r));
        if (!std::isfinite(scores(r, c))) {
          throw Error(ErrorKind::NonFiniteGradient,
                      "raw scores diverged in round " + std::to_string(round) +
                          "; lower the learning rate or raise lambda");
        }
      }
    }
    state.rounds.push_back(std::move(trees));
    state.train_loss.push_back(mean_cross_entropy(scores, y));
  }
  model.state = std::move(state);
  return model;
}

}  // namespace emosens
