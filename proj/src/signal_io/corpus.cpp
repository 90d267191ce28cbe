#include "emosens/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "emosens/error.hpp"
#include "emosens/parallel.hpp"

namespace emosens {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Self-reported (valence, arousal) on the 1..5 scale, indexed by emotion.
constexpr std::array<std::array<int, 2>, kNumEmotions> kRatings = {{
    {4, 2},  // calmness
    {3, 4},  // surprise
    {4, 3},  // amusement
    {2, 4},  // fear
    {4, 4},  // excitement
    {2, 3},  // disgust
    {5, 3},  // happiness
    {2, 4},  // anger
    {2, 2},  // sadness
}};

constexpr double kHeartRateStepBpm = 10.0;
constexpr double kBreathingShiftHz = 0.06;
// (LF gain, HF gain) for the three autonomic balance levels.
constexpr std::array<std::array<double, 2>, 3> kBalance = {{{1.8, 0.55}, {1.0, 1.0}, {0.55, 1.8}}};

struct SubjectProfile {
  double rest_hr_bpm;
  double lf_amplitude_ms;
  double lf_frequency_hz;
  double hf_amplitude_ms;
  double hf_frequency_hz;
};

SubjectProfile subject_profile(const CorpusOptions& o, std::size_t subject) {
  std::mt19937_64 rng(splitmix(o.seed, subject));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SubjectProfile p;
  p.rest_hr_bpm = 58.0 + 27.0 * u(rng);
  p.lf_amplitude_ms = 20.0 + 15.0 * u(rng);
  p.lf_frequency_hz = 0.08 + 0.04 * u(rng);
  p.hf_amplitude_ms = 15.0 + 15.0 * u(rng);
  p.hf_frequency_hz = 0.24 + 0.04 * u(rng);
  return p;
}

std::uint64_t recording_seed(const CorpusOptions& o, std::size_t subject, std::size_t trial, Segment segment) {
  const std::uint64_t key = (static_cast<std::uint64_t>(subject) << 32) ^
                            (static_cast<std::uint64_t>(trial) << 1) ^
                            static_cast<std::uint64_t>(segment == Segment::Stimulus);
  return splitmix(o.seed ^ 0xC0FFEEULL, key);
}

std::size_t parse_index(const std::string& id, char prefix) {
  if (id.size() < 2 || id.front() != prefix) {
    throw Error(ErrorKind::InvalidArgument, "not a synthetic corpus id: " + id);
  }
  return static_cast<std::size_t>(std::stoul(id.substr(1))) - 1;
}

std::string padded(char prefix, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%c%02zu", prefix, index + 1);
  return buf;
}

void check_options(const CorpusOptions& o) {
  if (o.subjects == 0 || o.trials == 0) throw Error(ErrorKind::InvalidArgument, "corpus needs subjects and trials");
  if (!(o.duration_s > 0.0)) throw Error(ErrorKind::InvalidArgument, "corpus duration must be positive");
}

}  // namespace

std::string corpus_subject_id(std::size_t subject) { return padded('s', subject); }
std::string corpus_trial_id(std::size_t trial) { return padded('t', trial); }
Emotion corpus_emotion(std::size_t trial) { return emotion_from_index(trial % kNumEmotions); }

std::vector<TrialManifest> corpus_manifest(const CorpusOptions& options) {
  check_options(options);
  std::vector<TrialManifest> out;
  out.reserve(options.subjects * options.trials * 2);
  for (std::size_t s = 0; s < options.subjects; ++s) {
    for (std::size_t t = 0; t < options.trials; ++t) {
      for (Segment seg : {Segment::Baseline, Segment::Stimulus}) {
        TrialManifest m;
        m.subject_id = corpus_subject_id(s);
        m.trial_id = corpus_trial_id(t);
        m.segment = seg;
        m.sampling_rate_hz = options.sampling_rate_hz;
        if (seg == Segment::Stimulus) {
          const Emotion e = corpus_emotion(t);
          m.emotion = e;
          m.valence = kRatings[index_of(e)][0];
          m.arousal = kRatings[index_of(e)][1];
        }
        m.file = "ecg/" + m.subject_id + "_" + m.trial_id + "_" + std::string(to_string(seg)) + ".csv";
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

RrModel corpus_rr_model(const CorpusOptions& options, std::size_t subject, std::size_t trial, Segment segment) {
  const SubjectProfile p = subject_profile(options, subject);
  std::mt19937_64 rng(recording_seed(options, subject, trial, segment) ^ 0x5EEDULL);
  std::normal_distribution<double> wobble(0.0, 1.0);

  // Day-to-day drift of the resting state between clips.
  double hr = p.rest_hr_bpm + 1.5 * wobble(rng);
  RrModel m;
  m.lf_amplitude_ms = p.lf_amplitude_ms * std::exp(0.08 * wobble(rng));
  m.hf_amplitude_ms = p.hf_amplitude_ms * std::exp(0.08 * wobble(rng));
  m.lf_frequency_hz = p.lf_frequency_hz;
  m.hf_frequency_hz = p.hf_frequency_hz;
  m.jitter_ms = 5.0;

  if (segment == Segment::Stimulus) {
    const std::size_t c = trial % kNumEmotions;
    const bool second_clip = (trial / kNumEmotions) % 2 == 1;
    std::size_t level = c / 3, balance = c % 3;
    if (second_clip) {
      level = 2 - level;
      balance = 2 - balance;
    }
    hr += (static_cast<double>(level) - 1.0) * kHeartRateStepBpm + 1.0 * wobble(rng);
    m.lf_amplitude_ms *= kBalance[balance][0];
    m.hf_amplitude_ms *= kBalance[balance][1];
    m.hf_frequency_hz += (second_clip ? kBreathingShiftHz : -kBreathingShiftHz) + 0.005 * wobble(rng);
  }
  m.mean_rr_ms = 60000.0 / hr;
  return m;
}

EcgRecording corpus_recording(const CorpusOptions& options, std::size_t subject, std::size_t trial,
                              Segment segment) {
  check_options(options);
  const RrModel m = corpus_rr_model(options, subject, trial, segment);
  const std::uint64_t seed = recording_seed(options, subject, trial, segment);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::normal_distribution<double> jitter(0.0, m.jitter_ms);
  const double lf_phase = phase(rng);
  const double hf_phase = phase(rng);

  std::vector<double> rr;
  double t = 0.0;
  while (t < options.duration_s) {
    double v = m.mean_rr_ms + m.lf_amplitude_ms * std::sin(2.0 * M_PI * m.lf_frequency_hz * t + lf_phase) +
               m.hf_amplitude_ms * std::sin(2.0 * M_PI * m.hf_frequency_hz * t + hf_phase) + jitter(rng);
    v = std::max(v, 320.0);
    rr.push_back(v);
    t += v / 1000.0;
  }

  EcgRecording rec = generate_synthetic_ecg(rr, options.sampling_rate_hz, options.noise_std_mv, splitmix(seed, 1));
  rec.subject_id = corpus_subject_id(subject);
  rec.trial_id = corpus_trial_id(trial);
  rec.segment = segment;
  if (segment == Segment::Stimulus) {
    const Emotion e = corpus_emotion(trial);
    rec.emotion = e;
    rec.valence = kRatings[index_of(e)][0];
    rec.arousal = kRatings[index_of(e)][1];
  }
  return rec;
}

EcgRecording corpus_recording(const CorpusOptions& options, const TrialManifest& entry) {
  return corpus_recording(options, parse_index(entry.subject_id, 's'), parse_index(entry.trial_id, 't'),
                          entry.segment);
}

std::vector<TrialManifest> write_corpus(const fs::path& dir, const CorpusOptions& options) {
  const auto manifest = corpus_manifest(options);
  std::error_code ec;
  fs::create_directories(dir / "ecg", ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + (dir / "ecg").string() + ": " + ec.message());
  parallel_for(manifest.size(), [&](std::size_t i) {
    const EcgRecording rec = corpus_recording(options, manifest[i]);
    write_ecg_csv(dir / manifest[i].file, rec.samples);
  });
  write_manifest(dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace emosens
