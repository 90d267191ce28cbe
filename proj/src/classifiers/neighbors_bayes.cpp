#include <cmath>

#include "classifier_common.hpp"
#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens {

namespace {
constexpr double kVarianceFloor = 1e-9;
}

Model train_knn(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::Knn, hp);
  model.n_features = x.cols();
  const auto k = static_cast<std::size_t>(model.hyperparams.get("k", 5));
  if (k > x.rows()) {
    throw Error(ErrorKind::InvalidK, "k = " + std::to_string(k) + " exceeds " +
                                         std::to_string(x.rows()) + " training rows");
  }
  model.state = KnnState{x, std::vector<Emotion>(y.begin(), y.end()), k};
  return model;
}

Model train_gaussian_nb(const Matrix& x, std::span<const Emotion> y, const HyperParams& hp) {
  detail::check_training_set(x, y);
  Model model;
  model.hyperparams = resolved_hyperparams(ModelKind::GaussianNb, hp);
  model.n_features = x.cols();
  const std::size_t p = x.cols();

  GaussianNbState state;
  std::array<double, kNumEmotions> count{};
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    state.means[k].assign(p, 0.0);
    state.variances[k].assign(p, 0.0);
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto k = index_of(y[r]);
    count[k] += 1.0;
    for (std::size_t j = 0; j < p; ++j) state.means[k][j] += x(r, j);
  }
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    if (count[k] == 0.0) continue;
    for (double& m : state.means[k]) m /= count[k];
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto k = index_of(y[r]);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x(r, j) - state.means[k][j];
      state.variances[k][j] += d * d;
    }
  }
  for (std::size_t k = 0; k < kNumEmotions; ++k) {
    state.priors[k] = count[k] / static_cast<double>(x.rows());
    for (double& v : state.variances[k]) {
      v = count[k] > 0.0 ? std::max(v / count[k], kVarianceFloor) : kVarianceFloor;
    }
  }
  model.state = std::move(state);
  return model;
}

}  // namespace emosens
