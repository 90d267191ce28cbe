#include "emosens/qrs_detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "emosens/error.hpp"

namespace emosens {
namespace {

std::size_t odd_window(double seconds, double rate) {
  auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  if (n < 1) n = 1;
  if (n % 2 == 0) ++n;
  return n;
}

// Centred moving average of odd length; samples outside the record are zero.
std::vector<double> centred_mean(const std::vector<double>& x, std::size_t window) {
  const std::size_t n = x.size();
  const std::size_t half = window / 2;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    y[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(window);
  }
  return y;
}

std::vector<double> five_point_derivative(const std::vector<double>& x, double rate) {
  const std::size_t n = x.size();
  auto at = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : x[static_cast<std::size_t>(i)];
  };
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<std::ptrdiff_t>(k);
    y[k] = rate / 8.0 * (2.0 * at(i + 1) + at(i + 2) - at(i - 2) - 2.0 * at(i - 1));
  }
  return y;
}

struct Candidate {
  std::size_t index;
  double value;
};

// Local maxima of the integrated signal that dominate their neighbourhood.
std::vector<Candidate> find_candidates(const std::vector<double>& mwi, std::size_t neighborhood) {
  std::vector<Candidate> out;
  const std::size_t n = mwi.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(mwi[i] > mwi[i - 1] && mwi[i] >= mwi[i + 1])) continue;
    const std::size_t lo = i >= neighborhood ? i - neighborhood : 0;
    const std::size_t hi = std::min(n - 1, i + neighborhood);
    bool dominant = true;
    for (std::size_t j = lo; j <= hi && dominant; ++j) {
      if (j < i ? mwi[j] >= mwi[i] : mwi[j] > mwi[i]) dominant = false;
    }
    if (dominant) out.push_back({i, mwi[i]});
  }
  return out;
}

}  // namespace

double RrSeries::span_s() const noexcept {
  if (intervals_ms.empty()) return 0.0;
  return onset_times_s.back() + intervals_ms.back() / 1000.0 - onset_times_s.front();
}

Detection detect_r_peaks(const EcgRecording& rec, const QrsConfig& cfg) {
  const double fs = rec.sampling_rate_hz;
  if (!(fs >= cfg.min_rate_hz)) {
    throw Error(ErrorKind::UnsupportedRate, "detection needs at least 100 Hz");
  }
  if (rec.duration_s() < cfg.min_duration_s) {
    throw Error(ErrorKind::InsufficientSignal,
                "recording is " + std::to_string(rec.duration_s()) + " s, need 5 s");
  }

  Detection det;
  DetectionTrace& tr = det.trace;
  const std::size_t n = rec.samples.size();

  // Band-pass: double moving sum low-pass, then moving-average subtraction.
  const std::size_t lp = odd_window(cfg.lowpass_window_s, fs);
  const std::size_t hp = odd_window(cfg.highpass_window_s, fs);
  auto low = centred_mean(centred_mean(rec.samples, lp), lp);
  auto baseline = centred_mean(low, hp);
  tr.filtered.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.filtered[i] = low[i] - baseline[i];

  tr.derivative = five_point_derivative(tr.filtered, fs);
  tr.squared.resize(n);
  std::transform(tr.derivative.begin(), tr.derivative.end(), tr.squared.begin(),
                 [](double d) { return d * d; });
  tr.integrated = centred_mean(tr.squared, odd_window(cfg.integration_window_s, fs));
  const auto& mwi = tr.integrated;

  const auto candidates =
      find_candidates(mwi, static_cast<std::size_t>(std::lround(cfg.peak_neighborhood_s * fs)));

  const auto learn_end =
      std::min(n, static_cast<std::size_t>(std::lround(cfg.learning_window_s * fs)));
  double spki = *std::max_element(mwi.begin(), mwi.begin() + static_cast<std::ptrdiff_t>(learn_end)) / 3.0;
  double npki = std::accumulate(mwi.begin(), mwi.begin() + static_cast<std::ptrdiff_t>(learn_end), 0.0) /
                static_cast<double>(learn_end) / 2.0;
  double thr1 = npki + cfg.threshold_fraction * (spki - npki);
  double thr2 = cfg.searchback_fraction * thr1;

  const auto refractory = static_cast<std::size_t>(std::lround(cfg.refractory_s * fs));
  const auto refine_half = static_cast<std::size_t>(std::lround(cfg.refine_window_s * fs));
  auto refine = [&](std::size_t fiducial) {
    const std::size_t lo = fiducial >= refine_half ? fiducial - refine_half : 0;
    const std::size_t hi = std::min(n - 1, fiducial + refine_half);
    std::size_t best = lo;
    for (std::size_t j = lo + 1; j <= hi; ++j) {
      if (rec.samples[j] > rec.samples[best]) best = j;
    }
    return best;
  };

  std::vector<std::size_t> beats;
  std::deque<double> recent_rr;
  std::vector<Candidate> noise_since_beat;

  auto update_thresholds = [&](std::size_t sample) {
    thr1 = npki + cfg.threshold_fraction * (spki - npki);
    thr2 = cfg.searchback_fraction * thr1;
    tr.threshold_history.push_back({sample, thr1, thr2});
  };
  auto accept = [&](std::size_t refined) {
    if (!beats.empty()) {
      recent_rr.push_back(static_cast<double>(refined - beats.back()));
      if (recent_rr.size() > 8) recent_rr.pop_front();
    }
    beats.push_back(refined);
  };
  auto rr_average = [&] {
    return recent_rr.empty()
               ? 0.0
               : std::accumulate(recent_rr.begin(), recent_rr.end(), 0.0) / static_cast<double>(recent_rr.size());
  };

  for (const Candidate& c : candidates) {
    // Search back for a missed beat among the sub-threshold peaks.
    while (!beats.empty() && rr_average() > 0.0 &&
           static_cast<double>(c.index - std::min(c.index, beats.back())) >
               cfg.searchback_rr_factor * rr_average()) {
      std::ptrdiff_t best = -1;
      std::size_t best_refined = 0;
      for (std::size_t q = 0; q < noise_since_beat.size(); ++q) {
        const Candidate& nc = noise_since_beat[q];
        if (nc.value <= thr2) continue;
        const std::size_t r = refine(nc.index);
        if (r < beats.back() + refractory) continue;
        if (best < 0 || nc.value > noise_since_beat[static_cast<std::size_t>(best)].value) {
          best = static_cast<std::ptrdiff_t>(q);
          best_refined = r;
        }
      }
      if (best < 0) break;
      spki = 0.25 * noise_since_beat[static_cast<std::size_t>(best)].value + 0.75 * spki;
      accept(best_refined);
      noise_since_beat.erase(noise_since_beat.begin(), noise_since_beat.begin() + best + 1);
      update_thresholds(c.index);
    }

    if (c.value > thr1) {
      const std::size_t r = refine(c.index);
      if (beats.empty() || r >= beats.back() + refractory) {
        spki = 0.125 * c.value + 0.875 * spki;
        accept(r);
        noise_since_beat.clear();
      }
    } else {
      npki = 0.125 * c.value + 0.875 * npki;
      noise_since_beat.push_back(c);
    }
    update_thresholds(c.index);
  }

  const double settle = cfg.settle_s * fs;
  det.peaks.sampling_rate_hz = fs;
  for (std::size_t b : beats) {
    if (static_cast<double>(b) < settle) continue;
    det.peaks.peak_sample_indices.push_back(b);
    det.peaks.peak_times_s.push_back(static_cast<double>(b) / fs);
  }
  if (det.peaks.size() == 0) throw Error(ErrorKind::NoBeatsDetected, "no R peaks detected");
  return det;
}

RrSeries compute_rr_intervals(const RPeakSeries& peaks, const RrCleaningConfig& cfg) {
  if (peaks.size() < 3) {
    throw Error(ErrorKind::InsufficientData, "need at least 3 peaks, got " + std::to_string(peaks.size()));
  }
  const std::size_t m = peaks.size() - 1;
  std::vector<double> raw(m);
  for (std::size_t i = 0; i < m; ++i) {
    raw[i] = (peaks.peak_times_s[i + 1] - peaks.peak_times_s[i]) * 1000.0;
  }

  const std::size_t half = cfg.median_window / 2;
  RrSeries rr;
  std::vector<double> window;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(m, i + half + 1);
    window.assign(raw.begin() + static_cast<std::ptrdiff_t>(lo), raw.begin() + static_cast<std::ptrdiff_t>(hi));
    std::sort(window.begin(), window.end());
    const std::size_t w = window.size();
    const double median = w % 2 ? window[w / 2] : 0.5 * (window[w / 2 - 1] + window[w / 2]);

    const bool in_range = raw[i] >= cfg.min_interval_ms && raw[i] <= cfg.max_interval_ms;
    const bool near_median = std::abs(raw[i] - median) <= cfg.max_median_deviation * median;
    if (in_range && near_median) {
      rr.intervals_ms.push_back(raw[i]);
      rr.onset_times_s.push_back(peaks.peak_times_s[i]);
    } else {
      ++rr.rejected_count;
    }
  }
  if (rr.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "only " + std::to_string(rr.size()) + " RR intervals survived cleaning");
  }
  return rr;
}

std::string format_trace_csv(const EcgRecording& rec, const DetectionTrace& trace) {
  std::string out = "sample_index,raw_mv,filtered,derivative,squared,integrated\n";
  for (std::size_t i = 0; i < trace.filtered.size(); ++i) {
    out += std::to_string(i);
    for (double v : {rec.samples[i], trace.filtered[i], trace.derivative[i], trace.squared[i],
                     trace.integrated[i]}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string format_threshold_csv(const DetectionTrace& trace) {
  std::string out = "sample_index,signal_threshold,noise_threshold\n";
  for (const auto& e : trace.threshold_history) {
    out += std::to_string(e.sample) + ',' + format_double(e.signal_threshold) + ',' +
           format_double(e.noise_threshold) + '\n';
  }
  return out;
}

}  // namespace emosens
