#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "emosens/emotion.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

// Synthetic stand-in for a DREAMER-shaped study: every subject watches
// `trials` clips, each preceded by a resting baseline. Clip t targets emotion
// t mod 9, so the default 18 clips cover each emotion twice.
//
// RR dynamics per recording: mean interval plus a low-frequency and a
// respiratory sinusoid plus white jitter. Subjects draw their own resting
// heart rate, rhythm amplitudes and frequencies. A stimulus shifts heart rate,
// LF/HF balance and breathing rate from the subject's baseline by amounts that
// depend on the emotion and on which of its two clips is playing. The two
// clips of an emotion produce mirrored responses, so the classes only
// separate through feature interactions.
struct CorpusOptions {
  std::size_t subjects = 23;
  std::size_t trials = 18;
  double duration_s = 66.0;  // beats per recording cover at least this much
  double sampling_rate_hz = 256.0;
  double noise_std_mv = 0.05;
  std::uint64_t seed = 42;
};

struct RrModel {
  double mean_rr_ms = 0.0;
  double lf_amplitude_ms = 0.0;
  double lf_frequency_hz = 0.0;
  double hf_amplitude_ms = 0.0;
  double hf_frequency_hz = 0.0;
  double jitter_ms = 0.0;
};

std::string corpus_subject_id(std::size_t subject);
std::string corpus_trial_id(std::size_t trial);
Emotion corpus_emotion(std::size_t trial);

// Manifest entries in generation order: subject-major, then trial, baseline
// before stimulus. `file` is ecg/<subject>_<trial>_<segment>.csv.
std::vector<TrialManifest> corpus_manifest(const CorpusOptions& options);

RrModel corpus_rr_model(const CorpusOptions& options, std::size_t subject, std::size_t trial, Segment segment);

// Deterministic in (options, subject, trial, segment); the recording carries
// its manifest metadata and ground-truth beat times.
EcgRecording corpus_recording(const CorpusOptions& options, std::size_t subject, std::size_t trial,
                              Segment segment);

// Same recording, looked up by a manifest entry produced by corpus_manifest.
EcgRecording corpus_recording(const CorpusOptions& options, const TrialManifest& entry);

// Writes manifest.json and the ECG CSVs under `dir`. Returns the manifest.
std::vector<TrialManifest> write_corpus(const std::filesystem::path& dir, const CorpusOptions& options);

}  // namespace emosens
