#include "emosens/emosens.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <random>
#include <string>

#include "json.hpp"

#include "emosens/corpus.hpp"
#include "emosens/error.hpp"
#include "emosens/eval_harness.hpp"
#include "emosens/pipeline.hpp"

struct emosens_dataset {
  emosens::LabeledDataset data;
};

struct emosens_report {
  emosens::CvReport report;
  std::optional<emosens::GridSearchResult> grid;
};

struct emosens_model {
  emosens::Model model;
};

namespace {

using emosens::Error;
using emosens::ErrorKind;

thread_local std::string g_last_error;
thread_local std::string g_last_kind;

emosens_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError: return EMOSENS_ERR_IO;
    case ErrorKind::InvalidArgument: return EMOSENS_ERR_INVALID_ARGUMENT;
    case ErrorKind::EmptyGrid: return EMOSENS_ERR_INPUT;
    default: return emosens::is_input_error(kind) ? EMOSENS_ERR_INPUT : EMOSENS_ERR_COMPUTE;
  }
}

emosens_status fail(emosens_status status, std::string kind, std::string message) {
  g_last_kind = std::move(kind);
  g_last_error = std::move(message);
  return status;
}

template <typename F>
emosens_status guarded(F&& fn) {
  g_last_error.clear();
  g_last_kind.clear();
  try {
    fn();
    return EMOSENS_OK;
  } catch (const Error& e) {
    return fail(status_of(e.kind()), std::string(emosens::to_string(e.kind())), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(EMOSENS_ERR_INPUT, "ParseError", std::string("ParseError: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(EMOSENS_ERR_INTERNAL, "Internal", "out of memory");
  } catch (const std::exception& e) {
    return fail(EMOSENS_ERR_INTERNAL, "Internal", e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorKind::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

emosens::HyperParams parse_hp(const char* text) {
  if (text == nullptr || *text == '\0') return {};
  return emosens::hyperparams_from_json(nlohmann::json::parse(text));
}

emosens::CorpusOptions corpus_options(const emosens_corpus_options* o) {
  emosens::CorpusOptions c;
  if (o != nullptr) {
    c.subjects = o->subjects;
    c.trials = o->trials;
    c.duration_s = o->duration_s;
    c.sampling_rate_hz = o->sampling_rate_hz;
    c.noise_std_mv = o->noise_std_mv;
    c.seed = o->seed;
  }
  return c;
}

nlohmann::json report_document(const emosens_report& r) {
  nlohmann::json doc = emosens::to_json(r.report);
  if (r.grid) {
    nlohmann::json grid;
    grid["best_index"] = r.grid->best_index;
    grid["best"] = emosens::to_json(r.grid->best);
    grid["mean_accuracy"] = r.grid->mean_accuracy;
    doc["grid_search"] = grid;
  }
  return doc;
}

}  // namespace

extern "C" {

const char* emosens_version(void) { return "1.0.0"; }
const char* emosens_last_error(void) { return g_last_error.c_str(); }
const char* emosens_last_error_kind(void) { return g_last_kind.c_str(); }
void emosens_string_free(char* s) { std::free(s); }

void emosens_corpus_options_default(emosens_corpus_options* options) {
  if (options == nullptr) return;
  const emosens::CorpusOptions d;
  *options = {d.subjects, d.trials, d.duration_s, d.sampling_rate_hz, d.noise_std_mv, d.seed};
}

emosens_status emosens_synth_corpus(const char* out_dir, const emosens_corpus_options* options) {
  return guarded([&] {
    require(out_dir, "out_dir");
    emosens::write_corpus(out_dir, corpus_options(options));
  });
}

emosens_status emosens_extract_features(const char* manifest_path, const char* trace_dir, emosens_dataset** out,
                                        char** failures_json) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out, "out");
    emosens::DatasetExtractionOptions opts;
    if (trace_dir != nullptr) opts.trace_dir = trace_dir;
    auto result = emosens::extract_dataset(std::filesystem::path(manifest_path), opts);
    std::string failures = emosens::failures_to_json(result.failures).dump(2);
    *out = new emosens_dataset{std::move(result.dataset)};
    if (failures_json != nullptr) *failures_json = dup_string(failures);
  });
}

emosens_status emosens_extract_synthetic(const emosens_corpus_options* options, emosens_dataset** out) {
  return guarded([&] {
    require(out, "out");
    auto result = emosens::extract_synthetic_dataset(corpus_options(options));
    *out = new emosens_dataset{std::move(result.dataset)};
  });
}

emosens_status emosens_dataset_load_csv(const char* path, emosens_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new emosens_dataset{emosens::load_feature_csv(path)};
  });
}

emosens_status emosens_dataset_save_csv(const emosens_dataset* data, const char* path) {
  return guarded([&] {
    require(data, "dataset");
    require(path, "path");
    emosens::write_feature_csv(path, data->data);
  });
}

void emosens_dataset_free(emosens_dataset* data) { delete data; }
size_t emosens_dataset_rows(const emosens_dataset* data) { return data ? data->data.size() : 0; }
size_t emosens_dataset_features(const emosens_dataset* data) { return data ? data->data.num_features() : 0; }
size_t emosens_dataset_groups(const emosens_dataset* data) { return data ? data->data.num_groups() : 0; }

emosens_status emosens_dataset_set_grouping(emosens_dataset* data, const char* key) {
  return guarded([&] {
    require(data, "dataset");
    require(key, "key");
    auto& d = data->data;
    const std::string k = key;
    if (k == "trial") {
      // Subject and trial together identify one recording session.
      for (std::size_t r = 0; r < d.size(); ++r) {
        const auto sep = d.groups[r].find('/');
        const std::string subject = sep == std::string::npos ? d.groups[r] : d.groups[r].substr(0, sep);
        d.groups[r] = subject + "/" + d.trial_ids[r];
      }
    } else if (k == "subject") {
      for (auto& g : d.groups) g = g.substr(0, g.find('/'));
    } else {
      throw Error(ErrorKind::InvalidArgument, "grouping must be 'subject' or 'trial', got '" + k + "'");
    }
  });
}

emosens_status emosens_dataset_shuffle_labels(emosens_dataset* data, uint64_t seed) {
  return guarded([&] {
    require(data, "dataset");
    std::mt19937_64 rng(seed);
    std::shuffle(data->data.labels.begin(), data->data.labels.end(), rng);
  });
}

emosens_status emosens_cross_validate(const emosens_dataset* data, const char* model_tag,
                                      const char* hyperparams_json, size_t k, emosens_report** out) {
  return guarded([&] {
    require(data, "dataset");
    require(model_tag, "model_tag");
    require(out, "out");
    const auto kind = emosens::parse_model_tag(model_tag);
    const auto hp = parse_hp(hyperparams_json);
    hp.validate(kind);
    *out = new emosens_report{emosens::cross_validate(data->data, kind, hp, k), std::nullopt};
  });
}

emosens_status emosens_grid_search(const emosens_dataset* data, const char* model_tag, const char* grid_json,
                                   size_t k, emosens_report** out) {
  return guarded([&] {
    require(data, "dataset");
    require(model_tag, "model_tag");
    require(grid_json, "grid_json");
    require(out, "out");
    const auto kind = emosens::parse_model_tag(model_tag);
    const auto grid = emosens::grid_from_json(nlohmann::json::parse(grid_json));
    auto result = emosens::grid_search(data->data, kind, grid, k);
    auto* r = new emosens_report{result.report, std::nullopt};
    r->grid = std::move(result);
    *out = r;
  });
}

emosens_status emosens_learning_curve(const emosens_dataset* data, const char* model_tag,
                                      const char* hyperparams_json, const double* fractions, size_t n_fractions,
                                      size_t k, uint64_t seed, emosens_report** out) {
  return guarded([&] {
    require(data, "dataset");
    require(model_tag, "model_tag");
    require(out, "out");
    if (n_fractions > 0) require(fractions, "fractions");
    const auto kind = emosens::parse_model_tag(model_tag);
    const auto hp = parse_hp(hyperparams_json);
    hp.validate(kind);
    const std::vector<double> f(fractions, fractions + n_fractions);
    auto points = emosens::learning_curve(data->data, kind, hp, f, k, seed);
    auto report = emosens::cross_validate(data->data, kind, hp, k);
    report.curve_points = std::move(points);
    *out = new emosens_report{std::move(report), std::nullopt};
  });
}

emosens_status emosens_default_grid(const char* model_tag, char** grid_json) {
  return guarded([&] {
    require(model_tag, "model_tag");
    require(grid_json, "grid_json");
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& hp : emosens::default_grid(emosens::parse_model_tag(model_tag))) {
      grid.push_back(emosens::to_json(hp));
    }
    *grid_json = dup_string(grid.dump());
  });
}

void emosens_report_free(emosens_report* report) { delete report; }

emosens_status emosens_report_mean(const emosens_report* report, const char* metric, double* value) {
  return guarded([&] {
    require(report, "report");
    require(metric, "metric");
    require(value, "value");
    for (std::size_t i = 0; i < emosens::kNumMetricValues; ++i) {
      if (emosens::kMetricNames[i] == metric) {
        *value = report->report.mean[i];
        return;
      }
    }
    throw Error(ErrorKind::InvalidArgument, std::string("unknown metric ") + metric);
  });
}

emosens_status emosens_report_json(const emosens_report* report, char** json) {
  return guarded([&] {
    require(report, "report");
    require(json, "json");
    *json = dup_string(report_document(*report).dump(2));
  });
}

emosens_status emosens_report_curve_csv(const emosens_report* report, char** csv) {
  return guarded([&] {
    require(report, "report");
    require(csv, "csv");
    if (!report->report.curve_points) throw Error(ErrorKind::InvalidArgument, "report has no learning curve");
    *csv = dup_string(emosens::format_curve_csv(*report->report.curve_points));
  });
}

emosens_status emosens_model_train(const emosens_dataset* data, const char* model_tag,
                                   const char* hyperparams_json, emosens_model** out) {
  return guarded([&] {
    require(data, "dataset");
    require(model_tag, "model_tag");
    require(out, "out");
    const auto kind = emosens::parse_model_tag(model_tag);
    *out = new emosens_model{emosens::train_model(kind, data->data, parse_hp(hyperparams_json))};
  });
}

emosens_status emosens_model_save(const emosens_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    emosens::write_file_atomic(path, emosens::model_to_json(model->model) + "\n");
  });
}

emosens_status emosens_model_load(const char* path, emosens_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new emosens_model{emosens::model_from_json(emosens::read_file(path))};
  });
}

void emosens_model_free(emosens_model* model) { delete model; }

emosens_status emosens_model_predict(const emosens_model* model, const emosens_dataset* data, int* labels_out,
                                     size_t n_rows) {
  return guarded([&] {
    require(model, "model");
    require(data, "dataset");
    if (n_rows < data->data.size()) {
      throw Error(ErrorKind::InvalidArgument, "output buffer holds " + std::to_string(n_rows) + " labels, need " +
                                             std::to_string(data->data.size()));
    }
    if (data->data.size() > 0) require(labels_out, "labels_out");
    const auto labels = emosens::predict(model->model, data->data.features);
    for (std::size_t i = 0; i < labels.size(); ++i) labels_out[i] = static_cast<int>(emosens::index_of(labels[i]));
  });
}

emosens_status emosens_write_file(const char* path, const char* content) {
  return guarded([&] {
    require(path, "path");
    require(content, "content");
    emosens::write_file_atomic(path, content);
  });
}

size_t emosens_num_emotions(void) { return emosens::kNumEmotions; }

const char* emosens_emotion_name(size_t index) {
  return index < emosens::kNumEmotions ? emosens::kEmotionNames[index].data() : nullptr;
}

}  // extern "C"
