#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "emosens/corpus.hpp"
#include "emosens/error.hpp"
#include "emosens/hrv_features.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

struct TrialFailure {
  std::string subject_id;
  std::string trial_id;
  ErrorKind kind = ErrorKind::InvalidArgument;
  std::string message;
};

struct DatasetExtraction {
  LabeledDataset dataset;
  std::vector<TrialFailure> failures;
};

using RecordingLoader = std::function<EcgRecording(const TrialManifest&)>;

struct DatasetExtractionOptions {
  ExtractionConfig extraction;
  // Off: rows hold raw stimulus features and baselines are not required.
  bool baseline_normalize = true;
  // When set, per-recording detector traces and threshold logs land here.
  std::optional<std::filesystem::path> trace_dir;
};

// One row per stimulus entry, in manifest order: features of the stimulus
// recording minus those of the baseline with the same subject and trial.
// Baseline recordings are not loaded when normalization is off.
// A trial whose recordings fail to load or extract, or that has no baseline,
// is recorded in `failures` and skipped. Trials run in parallel.
DatasetExtraction extract_dataset(const std::vector<TrialManifest>& manifest, const RecordingLoader& load,
                                  const DatasetExtractionOptions& options = {});

DatasetExtraction extract_dataset(const std::filesystem::path& manifest_path,
                                  const DatasetExtractionOptions& options = {});

// Generates and extracts a synthetic corpus without touching the disk.
DatasetExtraction extract_synthetic_dataset(const CorpusOptions& corpus,
                                            const DatasetExtractionOptions& options = {});

nlohmann::json failures_to_json(const std::vector<TrialFailure>& failures);

}  // namespace emosens
