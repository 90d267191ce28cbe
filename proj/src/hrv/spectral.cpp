#include <algorithm>
#include <cmath>
#include <numeric>

#include "emosens/error.hpp"
#include "emosens/hrv_features.hpp"

namespace emosens {
namespace {

struct Band {
  double power = 0.0;
  double peak_hz = 0.0;
};

Band integrate(const PowerSpectrum& psd, double lo, double hi, bool inclusive_hi) {
  Band band;
  double best = -1.0;
  for (std::size_t k = 0; k < psd.frequency_hz.size(); ++k) {
    const double f = psd.frequency_hz[k];
    if (f < lo || f > hi || (!inclusive_hi && f == hi)) continue;
    band.power += psd.density[k] * psd.resolution_hz;
    if (psd.density[k] > best) {
      best = psd.density[k];
      band.peak_hz = f;
    }
  }
  return band;
}

}  // namespace

std::vector<double> resample_rr(const RrSeries& rr, double rate_hz) {
  const std::size_t n = rr.size();
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = rr.onset_times_s[i] + rr.intervals_ms[i] / 1000.0;

  const double step = 1.0 / rate_hz;
  const auto count = static_cast<std::size_t>(std::floor((t.back() - t.front()) * rate_hz)) + 1;
  std::vector<double> out(count);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double tj = t.front() + static_cast<double>(j) * step;
    while (seg + 2 < n && t[seg + 1] < tj) ++seg;
    const double frac = (tj - t[seg]) / (t[seg + 1] - t[seg]);
    out[j] = rr.intervals_ms[seg] + std::clamp(frac, 0.0, 1.0) * (rr.intervals_ms[seg + 1] - rr.intervals_ms[seg]);
  }
  return out;
}

PowerSpectrum welch_psd(std::span<const double> series, double rate_hz, std::size_t segment_length,
                        double overlap) {
  const std::size_t n = series.size();
  const std::size_t len = std::min(segment_length, n);
  if (len < 2) throw Error(ErrorKind::InsufficientData, "spectrum needs at least 2 samples");
  const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(len) * (1.0 - overlap))));

  std::vector<double> window(len), cosines(len), sines(len);
  double window_energy = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    const double phase = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(len);
    window[j] = 0.5 - 0.5 * std::cos(phase);
    window_energy += window[j] * window[j];
    cosines[j] = std::cos(phase);
    sines[j] = std::sin(phase);
  }

  const std::size_t nfreq = len / 2 + 1;
  PowerSpectrum psd;
  psd.resolution_hz = rate_hz / static_cast<double>(len);
  psd.frequency_hz.resize(nfreq);
  psd.density.assign(nfreq, 0.0);
  for (std::size_t k = 0; k < nfreq; ++k) psd.frequency_hz[k] = static_cast<double>(k) * psd.resolution_hz;

  std::size_t segments = 0;
  std::vector<double> tapered(len);
  for (std::size_t start = 0; start + len <= n; start += hop) {
    for (std::size_t j = 0; j < len; ++j) tapered[j] = window[j] * series[start + j];
    for (std::size_t k = 0; k < nfreq; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const std::size_t m = (k * j) % len;
        re += tapered[j] * cosines[m];
        im -= tapered[j] * sines[m];
      }
      const bool edge = k == 0 || (len % 2 == 0 && k == len / 2);
      psd.density[k] += (edge ? 1.0 : 2.0) * (re * re + im * im) / (rate_hz * window_energy);
    }
    ++segments;
  }
  for (double& d : psd.density) d /= static_cast<double>(segments);
  return psd;
}

HrvFeatureVector frequency_domain_features(const RrSeries& rr, const SpectralConfig& cfg) {
  if (rr.size() < 2 || rr.span_s() < cfg.min_span_s) {
    throw Error(ErrorKind::InsufficientSpan, "RR series spans " + std::to_string(rr.span_s()) +
                                                 " s, need " + std::to_string(cfg.min_span_s) + " s");
  }
  auto series = resample_rr(rr, cfg.resample_hz);
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  for (double& v : series) v -= mean;

  const auto segment = static_cast<std::size_t>(std::lround(cfg.segment_s * cfg.resample_hz));
  const PowerSpectrum psd = welch_psd(series, cfg.resample_hz, segment, cfg.overlap);

  const Band vlf = integrate(psd, cfg.vlf_lo, cfg.vlf_hi, false);
  const Band lf = integrate(psd, cfg.lf_lo, cfg.lf_hi, false);
  const Band hf = integrate(psd, cfg.hf_lo, cfg.hf_hi, true);
  const double lf_hf = lf.power + hf.power;

  HrvFeatureVector f;
  f.set(Feature::VlfPower, vlf.power);
  f.set(Feature::LfPower, lf.power);
  f.set(Feature::HfPower, hf.power);
  f.set(Feature::TotalPower, vlf.power + lf.power + hf.power);
  f.set(Feature::LfNorm, lf_hf > 0.0 ? 100.0 * lf.power / lf_hf : 0.0);
  f.set(Feature::HfNorm, lf_hf > 0.0 ? 100.0 * hf.power / lf_hf : 0.0);
  f.set(Feature::LfHfRatio, hf.power > 0.0 ? lf.power / hf.power : 0.0);
  f.set(Feature::VlfPeakHz, vlf.peak_hz);
  f.set(Feature::LfPeakHz, lf.peak_hz);
  f.set(Feature::HfPeakHz, hf.peak_hz);
  return f;
}

}  // namespace emosens
