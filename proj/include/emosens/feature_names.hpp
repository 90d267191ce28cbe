#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace emosens {

inline constexpr std::size_t kNumFeatures = 34;

// Canonical feature order, version 1. This is the column order of every
// feature CSV written by the library. docs/features.md describes each entry.
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    // time domain
    "mean_rr", "median_rr", "min_rr", "max_rr", "range_rr", "sdnn", "rmssd", "sdsd", "cvnn",
    "cvsd", "pnn20", "pnn50", "mean_hr", "std_hr", "min_hr", "max_hr",
    // geometric
    "hti", "tinn",
    // frequency domain
    "vlf_power", "lf_power", "hf_power", "total_power", "lf_norm", "hf_norm", "lf_hf_ratio",
    "vlf_peak_hz", "lf_peak_hz", "hf_peak_hz",
    // Poincare
    "sd1", "sd2", "sd2_sd1_ratio", "ellipse_area", "csi", "cvi"};

inline constexpr int kFeatureSetVersion = 1;

enum class Feature : std::size_t {
  MeanRr = 0, MedianRr, MinRr, MaxRr, RangeRr, Sdnn, Rmssd, Sdsd, Cvnn, Cvsd, Pnn20, Pnn50,
  MeanHr, StdHr, MinHr, MaxHr,
  Hti, Tinn,
  VlfPower, LfPower, HfPower, TotalPower, LfNorm, HfNorm, LfHfRatio, VlfPeakHz, LfPeakHz,
  HfPeakHz,
  Sd1, Sd2, Sd2Sd1Ratio, EllipseArea, Csi, Cvi,
};

constexpr std::size_t index_of(Feature f) noexcept { return static_cast<std::size_t>(f); }

constexpr std::optional<std::size_t> feature_index(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureNames[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace emosens
