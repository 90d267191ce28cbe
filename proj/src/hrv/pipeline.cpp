#include "emosens/pipeline.hpp"

#include <map>
#include <tuple>
#include <variant>

#include "emosens/parallel.hpp"

namespace emosens {

namespace fs = std::filesystem;

namespace {

struct TrialRow {
  HrvFeatureVector features;
  Emotion label;
  std::optional<int> valence, arousal;
};

std::string trace_stem(const TrialManifest& m) {
  return m.subject_id + "_" + m.trial_id + "_" + std::string(to_string(m.segment));
}

HrvFeatureVector extract_one(const TrialManifest& entry, const RecordingLoader& load,
                             const DatasetExtractionOptions& options) {
  const EcgRecording rec = load(entry);
  FeatureExtraction ex = extract_features_detailed(rec, options.extraction);
  if (options.trace_dir) {
    write_file_atomic(*options.trace_dir / (trace_stem(entry) + "_trace.csv"), format_trace_csv(rec, ex.trace));
    write_file_atomic(*options.trace_dir / (trace_stem(entry) + "_thresholds.csv"), format_threshold_csv(ex.trace));
  }
  return ex.features;
}

}  // namespace

DatasetExtraction extract_dataset(const std::vector<TrialManifest>& manifest, const RecordingLoader& load,
                                  const DatasetExtractionOptions& options) {
  if (options.trace_dir) {
    std::error_code ec;
    fs::create_directories(*options.trace_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + options.trace_dir->string() + ": " + ec.message());
  }

  std::map<std::pair<std::string, std::string>, std::size_t> baseline_of;
  std::vector<std::size_t> stimuli;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (manifest[i].segment == Segment::Baseline) {
      baseline_of.emplace(std::pair{manifest[i].subject_id, manifest[i].trial_id}, i);
    } else {
      stimuli.push_back(i);
    }
  }

  std::vector<std::variant<TrialRow, TrialFailure>> results(stimuli.size());
  parallel_for(stimuli.size(), [&](std::size_t s) {
    const TrialManifest& stim = manifest[stimuli[s]];
    TrialFailure failure{stim.subject_id, stim.trial_id, ErrorKind::InvalidArgument, {}};
    try {
      if (!stim.emotion) throw Error(ErrorKind::LabelError, "stimulus entry has no emotion label");
      const auto base = baseline_of.find({stim.subject_id, stim.trial_id});
      if (options.baseline_normalize && base == baseline_of.end()) {
        throw Error(ErrorKind::FormatError, "no baseline recording for this trial");
      }
      HrvFeatureVector features = extract_one(stim, load, options);
      if (options.baseline_normalize) {
        features = baseline_normalize(features, extract_one(manifest[base->second], load, options));
      }
      results[s] = TrialRow{features, *stim.emotion, stim.valence, stim.arousal};
    } catch (const Error& e) {
      failure.kind = e.kind();
      failure.message = e.what();
      results[s] = std::move(failure);
    } catch (const std::exception& e) {
      failure.message = e.what();
      results[s] = std::move(failure);
    }
  });

  DatasetExtraction out;
  out.dataset.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  out.dataset.features = Matrix(0, kNumFeatures);
  for (std::size_t s = 0; s < stimuli.size(); ++s) {
    const TrialManifest& stim = manifest[stimuli[s]];
    if (auto* row = std::get_if<TrialRow>(&results[s])) {
      out.dataset.append(row->features.values(), row->label, stim.subject_id, stim.trial_id, row->valence,
                         row->arousal);
    } else {
      out.failures.push_back(std::get<TrialFailure>(results[s]));
    }
  }
  return out;
}

DatasetExtraction extract_dataset(const fs::path& manifest_path, const DatasetExtractionOptions& options) {
  const auto manifest = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  return extract_dataset(manifest, [&](const TrialManifest& m) { return load_ecg_entry(dir, m); }, options);
}

DatasetExtraction extract_synthetic_dataset(const CorpusOptions& corpus, const DatasetExtractionOptions& options) {
  return extract_dataset(corpus_manifest(corpus),
                         [&](const TrialManifest& m) { return corpus_recording(corpus, m); }, options);
}

nlohmann::json failures_to_json(const std::vector<TrialFailure>& failures) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : failures) {
    out.push_back({{"subject_id", f.subject_id},
                   {"trial_id", f.trial_id},
                   {"error", to_string(f.kind)},
                   {"message", f.message}});
  }
  return out;
}

}  // namespace emosens
