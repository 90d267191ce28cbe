#include <algorithm>
#include <cmath>
#include <numeric>

#include "emosens/error.hpp"
#include "emosens/hrv_features.hpp"

namespace emosens {
namespace {

struct Moments {
  double mean;
  double std;  // population
};

Moments moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

double median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

// Least-squares triangle fitted under the RR histogram. Returns the base
// width in bins. The apex sits on the (first) modal bin; the feet N < X < M
// range over all bin positions, including one bin beyond each end.
long tinn_bins(const std::vector<double>& counts) {
  const auto nbins = static_cast<long>(counts.size());
  const long apex = std::distance(counts.begin(), std::max_element(counts.begin(), counts.end()));
  const double height = counts[static_cast<std::size_t>(apex)];

  double best_err = 0.0;
  long best_width = 0;
  for (long lo = -1; lo < apex; ++lo) {
    for (long hi = apex + 1; hi <= nbins; ++hi) {
      double err = 0.0;
      for (long i = 0; i < nbins; ++i) {
        double q = 0.0;
        if (i > lo && i <= apex) q = height * static_cast<double>(i - lo) / static_cast<double>(apex - lo);
        else if (i > apex && i < hi) q = height * static_cast<double>(hi - i) / static_cast<double>(hi - apex);
        const double d = counts[static_cast<std::size_t>(i)] - q;
        err += d * d;
      }
      if (best_width == 0 || err < best_err - 1e-12 * (1.0 + best_err)) {
        best_err = err;
        best_width = hi - lo;
      }
    }
  }
  return best_width;
}

}  // namespace

void HrvFeatureVector::merge(const HrvFeatureVector& other) {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (other.present_.test(i)) {
      values_[i] = other.values_[i];
      present_.set(i);
    }
  }
}

HrvFeatureVector time_domain_features(const RrSeries& rr) {
  const auto& x = rr.intervals_ms;
  if (x.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "time-domain features need at least 2 intervals");
  }
  HrvFeatureVector f;

  const auto [mean_rr, sdnn] = moments(x);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  f.set(Feature::MeanRr, mean_rr);
  f.set(Feature::MedianRr, median(x));
  f.set(Feature::MinRr, *lo);
  f.set(Feature::MaxRr, *hi);
  f.set(Feature::RangeRr, *hi - *lo);
  f.set(Feature::Sdnn, sdnn);

  std::vector<double> diffs(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) diffs[i] = x[i + 1] - x[i];
  double sum_sq = 0.0;
  std::size_t over20 = 0, over50 = 0;
  for (double d : diffs) {
    sum_sq += d * d;
    over20 += std::abs(d) > 20.0;
    over50 += std::abs(d) > 50.0;
  }
  const double nd = static_cast<double>(diffs.size());
  const double rmssd = std::sqrt(sum_sq / nd);
  f.set(Feature::Rmssd, rmssd);
  f.set(Feature::Sdsd, moments(diffs).std);
  f.set(Feature::Cvnn, sdnn / mean_rr);
  f.set(Feature::Cvsd, rmssd / mean_rr);
  f.set(Feature::Pnn20, 100.0 * static_cast<double>(over20) / nd);
  f.set(Feature::Pnn50, 100.0 * static_cast<double>(over50) / nd);

  std::vector<double> hr(x.size());
  std::transform(x.begin(), x.end(), hr.begin(), [](double v) { return 60000.0 / v; });
  const auto [mean_hr, std_hr] = moments(hr);
  f.set(Feature::MeanHr, mean_hr);
  f.set(Feature::StdHr, std_hr);
  f.set(Feature::MinHr, 60000.0 / *hi);
  f.set(Feature::MaxHr, 60000.0 / *lo);

  if (x.size() >= 10) {
    const double origin = std::floor(*lo / kHrvHistogramBinMs) * kHrvHistogramBinMs;
    const auto nbins = static_cast<std::size_t>(std::floor((*hi - origin) / kHrvHistogramBinMs)) + 1;
    std::vector<double> counts(nbins, 0.0);
    for (double v : x) {
      auto b = static_cast<std::size_t>(std::floor((v - origin) / kHrvHistogramBinMs));
      counts[std::min(b, nbins - 1)] += 1.0;
    }
    const double peak = *std::max_element(counts.begin(), counts.end());
    f.set(Feature::Hti, static_cast<double>(x.size()) / peak);
    f.set(Feature::Tinn, static_cast<double>(tinn_bins(counts)) * kHrvHistogramBinMs);
  }
  return f;
}

HrvFeatureVector poincare_features(const RrSeries& rr) {
  const auto& x = rr.intervals_ms;
  if (x.size() < 3) throw Error(ErrorKind::InsufficientData, "Poincare features need at least 3 intervals");
  const std::size_t m = x.size() - 1;
  std::vector<double> minor(m), major(m);
  for (std::size_t i = 0; i < m; ++i) {
    minor[i] = (x[i] - x[i + 1]) / std::sqrt(2.0);
    major[i] = (x[i] + x[i + 1]) / std::sqrt(2.0);
  }
  const double sd1 = moments(minor).std;
  const double sd2 = moments(major).std;
  const double ratio = sd1 > 0.0 ? sd2 / sd1 : 0.0;
  const double product = sd1 * sd2;

  HrvFeatureVector f;
  f.set(Feature::Sd1, sd1);
  f.set(Feature::Sd2, sd2);
  f.set(Feature::Sd2Sd1Ratio, ratio);
  f.set(Feature::EllipseArea, M_PI * product);
  f.set(Feature::Csi, ratio);
  f.set(Feature::Cvi, product > 0.0 ? std::log10(16.0 * product) : 0.0);
  return f;
}

}  // namespace emosens
