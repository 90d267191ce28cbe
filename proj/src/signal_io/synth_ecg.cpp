#include <cmath>
#include <numeric>
#include <random>

#include "emosens/error.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {
namespace {

// PQRST morphology as five Gaussian bumps relative to the R wave.
// offset (s), width sigma (s), amplitude (mV). P and T offsets are scaled by
// sqrt(RR / 1 s) so that short cycles do not overlap the next complex.
struct Wave {
  double offset_s;
  double sigma_s;
  double amplitude_mv;
  bool rate_scaled;
};

constexpr Wave kPqrst[] = {
    {-0.200, 0.025, 0.15, true},   // P
    {-0.035, 0.010, -0.12, false},  // Q
    {0.000, 0.010, 1.00, false},   // R
    {0.035, 0.010, -0.25, false},  // S
    {0.250, 0.040, 0.30, true},    // T
};

constexpr double kMinRrMs = 250.0;
constexpr double kMinRateHz = 100.0;
constexpr double kSupportSigmas = 6.0;

}  // namespace

EcgRecording generate_synthetic_ecg(std::span<const double> rr_schedule_ms,
                                    double sampling_rate_hz, double noise_std_mv,
                                    std::uint64_t seed, const SynthEcgOptions& options) {
  if (!(sampling_rate_hz >= kMinRateHz)) {
    throw Error(ErrorKind::UnsupportedRate,
                "sampling rate " + std::to_string(sampling_rate_hz) + " Hz is below 100 Hz");
  }
  if (rr_schedule_ms.empty()) throw Error(ErrorKind::InvalidSchedule, "empty RR schedule");
  for (double rr : rr_schedule_ms) {
    if (!(rr >= kMinRrMs) || !std::isfinite(rr)) {
      throw Error(ErrorKind::InvalidSchedule,
                  "RR interval " + std::to_string(rr) + " ms is below 250 ms");
    }
  }
  if (noise_std_mv < 0.0) throw Error(ErrorKind::InvalidArgument, "negative noise std");

  const double total_s =
      options.lead_in_s + std::accumulate(rr_schedule_ms.begin(), rr_schedule_ms.end(), 0.0) / 1000.0;
  const auto n = static_cast<std::size_t>(std::ceil(total_s * sampling_rate_hz));

  EcgRecording rec;
  rec.sampling_rate_hz = sampling_rate_hz;
  rec.samples.assign(n, 0.0);
  std::vector<double> beats;
  beats.reserve(rr_schedule_ms.size());

  double t_beat = options.lead_in_s;
  for (double rr_ms : rr_schedule_ms) {
    beats.push_back(t_beat);
    const double scale = std::sqrt(rr_ms / 1000.0);
    for (const Wave& w : kPqrst) {
      const double centre = t_beat + w.offset_s * (w.rate_scaled ? scale : 1.0);
      const double lo = std::max(0.0, std::floor((centre - kSupportSigmas * w.sigma_s) * sampling_rate_hz));
      const double hi = std::min(static_cast<double>(n) - 1.0,
                                 std::ceil((centre + kSupportSigmas * w.sigma_s) * sampling_rate_hz));
      for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) <= hi; ++i) {
        const double dt = static_cast<double>(i) / sampling_rate_hz - centre;
        rec.samples[i] += w.amplitude_mv * std::exp(-0.5 * (dt * dt) / (w.sigma_s * w.sigma_s));
      }
    }
    t_beat += rr_ms / 1000.0;
  }

  if (noise_std_mv > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std_mv);
    for (double& s : rec.samples) s += noise(rng);
  }
  rec.ground_truth_beats = std::move(beats);
  return rec;
}

}  // namespace emosens
