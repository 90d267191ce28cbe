#pragma once

#include <array>
#include <bitset>
#include <span>
#include <string>
#include <vector>

#include "emosens/feature_names.hpp"
#include "emosens/qrs_detect.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

// The 34 canonical HRV features. Entries are filled in groups by the
// individual feature operations; `complete()` holds once all are present.
class HrvFeatureVector {
 public:
  double operator[](Feature f) const { return values_[index_of(f)]; }
  double at(std::size_t i) const { return values_.at(i); }

  void set(Feature f, double value) {
    values_[index_of(f)] = value;
    present_.set(index_of(f));
  }
  bool has(Feature f) const { return present_.test(index_of(f)); }
  bool complete() const { return present_.all(); }
  std::size_t count() const { return present_.count(); }

  // Copies every entry present in `other`.
  void merge(const HrvFeatureVector& other);

  const std::array<double, kNumFeatures>& values() const { return values_; }

  friend bool operator==(const HrvFeatureVector&, const HrvFeatureVector&) = default;

 private:
  std::array<double, kNumFeatures> values_{};
  std::bitset<kNumFeatures> present_;
};

// Histogram bin width used by HRV triangular index and TINN (1/128 s).
inline constexpr double kHrvHistogramBinMs = 7.8125;

// 16 time-domain entries, plus HTI and TINN when at least 10 intervals are
// available. Throws InsufficientData below 2 intervals.
HrvFeatureVector time_domain_features(const RrSeries& rr);

struct SpectralConfig {
  double resample_hz = 4.0;
  double segment_s = 64.0;
  double overlap = 0.5;
  double min_span_s = 60.0;
  double vlf_lo = 0.0033, vlf_hi = 0.04;
  double lf_lo = 0.04, lf_hi = 0.15;
  double hf_lo = 0.15, hf_hi = 0.40;
};

struct PowerSpectrum {
  std::vector<double> frequency_hz;
  std::vector<double> density;  // one-sided, ms^2/Hz
  double resolution_hz = 0.0;
};

// Evenly resampled RR series (ms) by linear interpolation. Each interval is
// placed at the time of the beat that closes it.
std::vector<double> resample_rr(const RrSeries& rr, double rate_hz);

// Averaged periodogram with a periodic Hann window and fractional overlap.
// `segment_length` is clamped to the series length.
PowerSpectrum welch_psd(std::span<const double> series, double rate_hz, std::size_t segment_length,
                        double overlap);

// 10 spectral entries. Throws InsufficientSpan when the RR series covers less
// than `min_span_s`.
HrvFeatureVector frequency_domain_features(const RrSeries& rr, const SpectralConfig& config = {});

// 6 Poincare entries. Throws InsufficientData below 3 intervals.
HrvFeatureVector poincare_features(const RrSeries& rr);

struct ExtractionConfig {
  QrsConfig qrs;
  RrCleaningConfig cleaning;
  SpectralConfig spectral;
};

struct FeatureExtraction {
  HrvFeatureVector features;
  RPeakSeries peaks;
  RrSeries rr;
  DetectionTrace trace;
};

// detect_r_peaks -> compute_rr_intervals -> all feature groups. Errors are
// rethrown with the failing stage named in the message.
FeatureExtraction extract_features_detailed(const EcgRecording& rec,
                                            const ExtractionConfig& config = {});
HrvFeatureVector extract_feature_vector(const EcgRecording& rec, const ExtractionConfig& config = {});

// Elementwise stimulus - baseline.
HrvFeatureVector baseline_normalize(const HrvFeatureVector& stimulus, const HrvFeatureVector& baseline);

// ---------------------------------------------------------------------------
// Min-max scaling

struct ScalerParams {
  std::vector<double> min;
  std::vector<double> max;
  std::string fitted_on;

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

// Throws EmptyFit on an empty training set.
ScalerParams fit_minmax(const Matrix& train, std::string fitted_on = {});
ScalerParams fit_minmax(const LabeledDataset& train, std::string fitted_on = {});

// (x - min) / (max - min) clamped to [0, 1]; constant features map to 0.
Matrix apply_minmax(const ScalerParams& params, const Matrix& features);
LabeledDataset apply_minmax(const ScalerParams& params, const LabeledDataset& data);

}  // namespace emosens
