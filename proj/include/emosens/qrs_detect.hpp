#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "emosens/signal_io.hpp"

namespace emosens {

struct RPeakSeries {
  std::vector<std::size_t> peak_sample_indices;  // strictly increasing
  std::vector<double> peak_times_s;
  double sampling_rate_hz = 0.0;

  std::size_t size() const noexcept { return peak_sample_indices.size(); }
};

struct ThresholdEvent {
  std::size_t sample;
  double signal_threshold;
  double noise_threshold;
};

// Per-stage signals of the detector, all the same length as the input.
struct DetectionTrace {
  std::vector<double> filtered;
  std::vector<double> derivative;
  std::vector<double> squared;
  std::vector<double> integrated;
  std::vector<ThresholdEvent> threshold_history;
};

struct RrSeries {
  std::vector<double> intervals_ms;
  std::vector<double> onset_times_s;  // time of the beat that opens each interval
  std::size_t rejected_count = 0;

  std::size_t size() const noexcept { return intervals_ms.size(); }
  // Seconds from the first onset to the end of the last interval.
  double span_s() const noexcept;
};

// Pan-Tompkins parameters. Window lengths are in seconds and are converted to
// samples at the recording's rate.
struct QrsConfig {
  double lowpass_window_s = 0.030;   // moving sum, applied twice
  double highpass_window_s = 0.160;  // moving-average subtraction
  double integration_window_s = 0.150;
  double peak_neighborhood_s = 0.100;  // candidate must be the maximum within +/- this
  double learning_window_s = 8.0;      // threshold initialisation
  double threshold_fraction = 0.25;    // threshold = noise + f * (signal - noise)
  double searchback_fraction = 0.5;
  double searchback_rr_factor = 1.66;
  double refractory_s = 0.200;
  double refine_window_s = 0.040;
  double settle_s = 2.0;  // detections before this time are not reported
  double min_duration_s = 5.0;
  double min_rate_hz = 100.0;
};

struct Detection {
  RPeakSeries peaks;
  DetectionTrace trace;
};

// Throws InsufficientSignal, UnsupportedRate or NoBeatsDetected.
Detection detect_r_peaks(const EcgRecording& rec, const QrsConfig& config = {});

struct RrCleaningConfig {
  double min_interval_ms = 300.0;
  double max_interval_ms = 2000.0;
  double max_median_deviation = 0.30;
  std::size_t median_window = 5;
};

// Throws InsufficientData with fewer than 3 peaks or fewer than 2 surviving
// intervals.
RrSeries compute_rr_intervals(const RPeakSeries& peaks, const RrCleaningConfig& config = {});

// CSV with one column per detector stage.
std::string format_trace_csv(const EcgRecording& rec, const DetectionTrace& trace);
std::string format_threshold_csv(const DetectionTrace& trace);

}  // namespace emosens
