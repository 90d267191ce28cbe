#include <algorithm>
#include <limits>

#include "emosens/error.hpp"
#include "emosens/hrv_features.hpp"

namespace emosens {
namespace {

template <typename F>
auto run_stage(const char* stage, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + stage + ": " + e.what());
  }
}

}  // namespace

FeatureExtraction extract_features_detailed(const EcgRecording& rec, const ExtractionConfig& cfg) {
  FeatureExtraction out;
  auto det = run_stage("qrs_detect", [&] { return detect_r_peaks(rec, cfg.qrs); });
  out.peaks = std::move(det.peaks);
  out.trace = std::move(det.trace);
  out.rr = run_stage("rr_intervals", [&] { return compute_rr_intervals(out.peaks, cfg.cleaning); });
  out.features.merge(run_stage("time_domain", [&] { return time_domain_features(out.rr); }));
  out.features.merge(run_stage("frequency_domain", [&] { return frequency_domain_features(out.rr, cfg.spectral); }));
  out.features.merge(run_stage("poincare", [&] { return poincare_features(out.rr); }));
  if (!out.features.complete()) {
    throw Error(ErrorKind::InsufficientData, "stage time_domain: fewer than 10 RR intervals for geometric features");
  }
  return out;
}

HrvFeatureVector extract_feature_vector(const EcgRecording& rec, const ExtractionConfig& cfg) {
  return extract_features_detailed(rec, cfg).features;
}

HrvFeatureVector baseline_normalize(const HrvFeatureVector& stimulus, const HrvFeatureVector& baseline) {
  if (!stimulus.complete() || !baseline.complete()) {
    throw Error(ErrorKind::InsufficientData, "baseline normalization needs complete feature vectors");
  }
  HrvFeatureVector out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    out.set(static_cast<Feature>(i), stimulus.at(i) - baseline.at(i));
  }
  return out;
}

ScalerParams fit_minmax(const Matrix& train, std::string fitted_on) {
  if (train.rows() == 0) throw Error(ErrorKind::EmptyFit, "cannot fit a scaler on zero rows");
  ScalerParams p;
  p.fitted_on = std::move(fitted_on);
  p.min.assign(train.cols(), std::numeric_limits<double>::infinity());
  p.max.assign(train.cols(), -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    const auto row = train.row(r);
    for (std::size_t c = 0; c < train.cols(); ++c) {
      p.min[c] = std::min(p.min[c], row[c]);
      p.max[c] = std::max(p.max[c], row[c]);
    }
  }
  return p;
}

ScalerParams fit_minmax(const LabeledDataset& train, std::string fitted_on) {
  return fit_minmax(train.features, std::move(fitted_on));
}

Matrix apply_minmax(const ScalerParams& p, const Matrix& features) {
  if (features.cols() != p.min.size() && features.rows() > 0) {
    throw Error(ErrorKind::ShapeError, "scaler fitted on " + std::to_string(p.min.size()) +
                                           " features, got " + std::to_string(features.cols()));
  }
  Matrix out = features;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double range = p.max[c] - p.min[c];
      row[c] = range > 0.0 ? std::clamp((row[c] - p.min[c]) / range, 0.0, 1.0) : 0.0;
    }
  }
  return out;
}

LabeledDataset apply_minmax(const ScalerParams& p, const LabeledDataset& data) {
  LabeledDataset out = data;
  out.features = apply_minmax(p, data.features);
  return out;
}

}  // namespace emosens
