#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emosens/emotion.hpp"
#include "emosens/matrix.hpp"

namespace emosens {

enum class Segment : std::uint8_t { Baseline, Stimulus };

std::string_view to_string(Segment s) noexcept;
Segment parse_segment(std::string_view text);

struct EcgRecording {
  std::vector<double> samples;  // mV
  double sampling_rate_hz = 0.0;
  std::string subject_id;
  std::string trial_id;
  Segment segment = Segment::Stimulus;
  std::optional<Emotion> emotion;
  std::optional<int> valence;
  std::optional<int> arousal;
  // Exact R-wave times in seconds; only known for synthetic recordings.
  std::optional<std::vector<double>> ground_truth_beats;

  double duration_s() const noexcept {
    return sampling_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sampling_rate_hz : 0.0;
  }
};

struct TrialManifest {
  std::string subject_id;
  std::string trial_id;
  Segment segment = Segment::Stimulus;
  double sampling_rate_hz = 0.0;
  std::optional<Emotion> emotion;
  std::optional<int> valence;
  std::optional<int> arousal;
  std::string file;  // relative to the manifest's directory
};

// Feature matrix plus labels and grouping keys. Rows of `features` follow
// `feature_names` column order.
struct LabeledDataset {
  std::vector<std::string> feature_names;
  Matrix features;
  std::vector<Emotion> labels;
  std::vector<std::string> groups;  // subject_id by default
  std::vector<std::string> trial_ids;
  std::vector<std::optional<int>> valence;
  std::vector<std::optional<int>> arousal;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return features.cols(); }
  std::size_t num_groups() const;

  LabeledDataset subset(std::span<const std::size_t> rows) const;
  void append(std::span<const double> row, Emotion label, std::string group,
              std::string trial_id = {}, std::optional<int> valence = std::nullopt,
              std::optional<int> arousal = std::nullopt);
};

// ---------------------------------------------------------------------------
// Synthetic ECG

struct SynthEcgOptions {
  // Silence before the first beat. Longer than the detector's settling window
  // so that every scheduled beat is reportable.
  double lead_in_s = 2.5;
};

// One PQRST complex per entry of `rr_schedule_ms`. Beat k sits at
// lead_in + sum(rr[0..k)) seconds; the final entry is the trailing interval
// after the last beat. Throws InvalidSchedule (RR < 250 ms) or
// UnsupportedRate (rate < 100 Hz).
EcgRecording generate_synthetic_ecg(std::span<const double> rr_schedule_ms,
                                    double sampling_rate_hz, double noise_std_mv,
                                    std::uint64_t seed, const SynthEcgOptions& options = {});

// ---------------------------------------------------------------------------
// On-disk formats

std::vector<TrialManifest> read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::filesystem::path& manifest_path,
                    std::span<const TrialManifest> entries);

// Reads one manifest entry's ECG CSV (`sample_index,value_mv`).
EcgRecording load_ecg_entry(const std::filesystem::path& manifest_dir, const TrialManifest& entry);

// All recordings referenced by a manifest, in manifest order.
std::vector<EcgRecording> load_ecg_csv(const std::filesystem::path& manifest_path);

std::string format_ecg_csv(std::span<const double> samples);
void write_ecg_csv(const std::filesystem::path& path, std::span<const double> samples);

LabeledDataset load_feature_csv(const std::filesystem::path& path);
LabeledDataset parse_feature_csv(std::string_view text);
std::string format_feature_csv(const LabeledDataset& data);
void write_feature_csv(const std::filesystem::path& path, const LabeledDataset& data);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace emosens
