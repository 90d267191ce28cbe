#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "emosens/qrs_detect.hpp"

namespace testgen {

// RR series of 80..160 beats: random mean, LF and HF sinusoids, white jitter,
// every seventh interval snapped to the 256 Hz sample grid. Always spans more
// than 60 s.
inline emosens::RrSeries random_rr_series(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(80, 160);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = len(rng);
  const double mean = 750.0 + 250.0 * u(rng);
  const double a_lf = 60.0 * u(rng), a_hf = 40.0 * u(rng), jitter = 30.0 * u(rng);
  const double f_lf = 0.05 + 0.09 * u(rng), f_hf = 0.16 + 0.2 * u(rng);
  emosens::RrSeries s;
  double t = 3.0 * u(rng);
  for (int i = 0; i < n; ++i) {
    double v = mean + a_lf * std::sin(2 * M_PI * f_lf * t) + a_hf * std::sin(2 * M_PI * f_hf * t) + jitter * g(rng);
    if (i % 7 == 0) v = std::round(v * 0.256) / 0.256;
    s.intervals_ms.push_back(v);
    s.onset_times_s.push_back(t);
    t += v / 1000.0;
  }
  return s;
}

// Beat-by-beat sinusoidal modulation of the RR interval at f_hz.
inline emosens::RrSeries modulated_rr(double f_hz, double amplitude_ms, double seconds = 120.0,
                                      double mean_ms = 850.0) {
  emosens::RrSeries s;
  double t = 0.0;
  while (t < seconds) {
    const double v = mean_ms + amplitude_ms * std::sin(2.0 * M_PI * f_hz * t);
    s.intervals_ms.push_back(v);
    s.onset_times_s.push_back(t);
    t += v / 1000.0;
  }
  return s;
}

}  // namespace testgen
