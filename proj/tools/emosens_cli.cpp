// emosens command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "emosens/emosens.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 usage or I/O, 2 bad input (schema, format, config),
// 3 computation failure.
int exit_code(emosens_status s) {
  switch (s) {
    case EMOSENS_OK: return 0;
    case EMOSENS_ERR_IO: return 1;
    case EMOSENS_ERR_INVALID_ARGUMENT:
    case EMOSENS_ERR_INPUT: return 2;
    default: return 3;
  }
}

struct Failure {
  int code;
};

void check(emosens_status s, const std::string& context) {
  if (s == EMOSENS_OK) return;
  std::cerr << "emosens: " << context << ": " << emosens_last_error() << "\n";
  throw Failure{exit_code(s)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "emosens: " << message << "\n";
  throw Failure{2};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  emosens_string_free(s);
  return out;
}

struct DatasetDeleter {
  void operator()(emosens_dataset* d) const { emosens_dataset_free(d); }
};
struct ReportDeleter {
  void operator()(emosens_report* r) const { emosens_report_free(r); }
};
using DatasetPtr = std::unique_ptr<emosens_dataset, DatasetDeleter>;
using ReportPtr = std::unique_ptr<emosens_report, ReportDeleter>;

void write_output(const std::string& path, const std::string& content) {
  check(emosens_write_file(path.c_str(), content.c_str()), "writing " + path);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Inline JSON or a path to a JSON file.
json read_json_arg(const std::string& arg, const std::string& what) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
    std::ifstream in(arg);
    if (!in) {
      std::cerr << "emosens: cannot read " << what << " file " << arg << "\n";
      throw Failure{1};
    }
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    usage_error(what + " is not valid JSON: " + e.what());
  }
}

struct EvalOptions {
  std::string input;
  std::string out;
  std::string models = "gbdt";
  std::string hp;
  std::string grid;
  std::string fractions = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::string group_by = "subject";
  std::size_t k = 10;
  std::uint64_t seed = 42;
};

DatasetPtr load_dataset(const EvalOptions& o) {
  if (!fs::exists(o.input)) {
    std::cerr << "emosens: input " << o.input << " does not exist\n";
    throw Failure{1};
  }
  emosens_dataset* raw = nullptr;
  check(emosens_dataset_load_csv(o.input.c_str(), &raw), "loading " + o.input);
  DatasetPtr data(raw);
  check(emosens_dataset_set_grouping(data.get(), o.group_by.c_str()), "--group-by");
  return data;
}

// Per-model hyperparameters: --hp is either one object applied to every model
// or an object keyed by model tag. --seed fills in `seed` for seeded models.
json model_hyperparams(const EvalOptions& o, const std::string& tag) {
  json hp = json::object();
  if (!o.hp.empty()) {
    const json given = read_json_arg(o.hp, "--hp");
    if (!given.is_object()) usage_error("--hp must be a JSON object");
    bool keyed = !given.empty();
    for (const auto& [key, value] : given.items()) keyed = keyed && value.is_object();
    if (keyed) {
      if (given.contains(tag)) hp = given.at(tag);
    } else {
      hp = given;
    }
  }
  if ((tag == "rf" || tag == "gbdt" || tag == "lightgbm" || tag == "xgboost" || tag == "adaboost") &&
      !hp.contains("seed")) {
    hp["seed"] = o.seed;
  }
  return hp;
}

json table_row(const json& report) {
  double runtime = 0.0;
  for (const auto& fold : report.at("per_fold")) runtime += fold.at("runtime_s").get<double>();
  const json& mean = report.at("mean");
  return {{"model", report.at("model")},
          {"accuracy", mean.at("accuracy")},
          {"precision", mean.at("precision_weighted")},
          {"recall", mean.at("recall_weighted")},
          {"f_score", mean.at("f1_weighted")},
          {"runtime_s", runtime}};
}

json report_envelope(const std::string& command, const EvalOptions& o, const emosens_dataset* data) {
  return {{"format", "emosens-report"},
          {"format_version", "1.0"},
          {"command", command},
          {"input", o.input},
          {"k", o.k},
          {"seed", o.seed},
          {"grouping", o.group_by},
          {"n_rows", emosens_dataset_rows(data)},
          {"n_groups", emosens_dataset_groups(data)},
          {"models", json::array()},
          {"table", json::array()}};
}

std::string render_table(const json& doc) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %12s %10s %10s %10s %11s\n", "model", "accuracy(%)", "precision",
                "recall", "f_score", "runtime_s");
  out << line;
  for (const auto& row : doc.at("table")) {
    std::snprintf(line, sizeof line, "%-10s %12.1f %10.3f %10.3f %10.3f %11.2f\n",
                  row.at("model").get<std::string>().c_str(), 100.0 * row.at("accuracy").get<double>(),
                  row.at("precision").get<double>(), row.at("recall").get<double>(),
                  row.at("f_score").get<double>(), row.at("runtime_s").get<double>());
    out << line;
  }
  return out.str();
}

void finish_report(const json& doc, const std::string& out) {
  std::cout << render_table(doc);
  if (!out.empty()) write_output(out, doc.dump(2) + "\n");
}

void add_report(json& doc, emosens_report* report) {
  const json r = json::parse(take([&] {
    char* text = nullptr;
    check(emosens_report_json(report, &text), "serializing report");
    return text;
  }()));
  doc["table"].push_back(table_row(r));
  doc["models"].push_back(r);
}

std::vector<std::string> model_list(const EvalOptions& o) {
  auto models = split_list(o.models);
  if (models.empty()) usage_error("--models is empty");
  return models;
}

void run_cv(const EvalOptions& o) {
  DatasetPtr data = load_dataset(o);
  json doc = report_envelope("cv", o, data.get());
  for (const auto& tag : model_list(o)) {
    emosens_report* raw = nullptr;
    const std::string hp = model_hyperparams(o, tag).dump();
    check(emosens_cross_validate(data.get(), tag.c_str(), hp.c_str(), o.k, &raw), "cv " + tag);
    ReportPtr report(raw);
    add_report(doc, report.get());
  }
  finish_report(doc, o.out);
}

void run_tune(const EvalOptions& o) {
  DatasetPtr data = load_dataset(o);
  json doc = report_envelope("tune", o, data.get());
  const json grid_arg = o.grid.empty() ? json() : read_json_arg(o.grid, "--grid");
  for (const auto& tag : model_list(o)) {
    json grid;
    if (grid_arg.is_array()) {
      grid = grid_arg;
    } else if (grid_arg.is_object() && grid_arg.contains(tag)) {
      grid = grid_arg.at(tag);
    } else if (!grid_arg.is_null() && !grid_arg.is_object()) {
      usage_error("--grid must be a JSON array or an object keyed by model tag");
    } else {
      char* text = nullptr;
      check(emosens_default_grid(tag.c_str(), &text), "default grid for " + tag);
      grid = json::parse(take(text));
    }
    if (grid.is_array()) {
      const json base = model_hyperparams(o, tag);
      for (auto& point : grid) {
        if (!point.is_object()) continue;
        for (const auto& [key, value] : base.items()) {
          if (!point.contains(key)) point[key] = value;
        }
      }
    }
    emosens_report* raw = nullptr;
    check(emosens_grid_search(data.get(), tag.c_str(), grid.dump().c_str(), o.k, &raw), "tune " + tag);
    ReportPtr report(raw);
    add_report(doc, report.get());
  }
  finish_report(doc, o.out);
}

void run_curve(const EvalOptions& o) {
  DatasetPtr data = load_dataset(o);
  std::vector<double> fractions;
  for (const auto& item : split_list(o.fractions)) {
    try {
      std::size_t used = 0;
      fractions.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage_error("--fractions: '" + item + "' is not a number");
    }
  }
  json doc = report_envelope("curve", o, data.get());
  const auto models = model_list(o);
  for (const auto& tag : models) {
    emosens_report* raw = nullptr;
    const std::string hp = model_hyperparams(o, tag).dump();
    check(emosens_learning_curve(data.get(), tag.c_str(), hp.c_str(), fractions.data(), fractions.size(), o.k,
                                 o.seed, &raw),
          "curve " + tag);
    ReportPtr report(raw);
    add_report(doc, report.get());
    if (!o.out.empty()) {
      char* csv = nullptr;
      check(emosens_report_curve_csv(report.get(), &csv), "curve csv");
      fs::path path(o.out);
      const std::string suffix = models.size() > 1 ? "." + tag : "";
      path.replace_extension();
      write_output(path.string() + suffix + ".curve.csv", take(csv));
    }
  }
  finish_report(doc, o.out);
}

void run_report(const EvalOptions& o) {
  const json doc = read_json_arg(o.input, "report");
  if (!doc.is_object() || doc.value("format", "") != "emosens-report" || !doc.contains("table")) {
    usage_error(o.input + " is not an emosens report");
  }
  const std::string text = render_table(doc);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_output(o.out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion recognition from ECG-derived heart rate variability"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(emosens_version()));

  emosens_corpus_options corpus;
  emosens_corpus_options_default(&corpus);
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic ECG corpus with manifest");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--subjects", corpus.subjects, "Number of subjects")->capture_default_str();
  synth->add_option("--trials", corpus.trials, "Clips per subject")->capture_default_str();
  synth->add_option("--duration", corpus.duration_s, "Seconds of beats per recording")->capture_default_str();
  synth->add_option("--rate", corpus.sampling_rate_hz, "Sampling rate in Hz")->capture_default_str();
  synth->add_option("--noise", corpus.noise_std_mv, "Noise std in mV")->capture_default_str();
  synth->add_option("--seed", corpus.seed, "Random seed")->capture_default_str();

  std::string extract_in, extract_out, trace_dir;
  auto* extract = app.add_subcommand("extract", "Extract baseline-normalized HRV features from a manifest");
  extract->add_option("--input", extract_in, "manifest.json")->required();
  extract->add_option("--out", extract_out, "Feature CSV to write")->required();
  extract->add_option("--dump-trace", trace_dir, "Directory for detector traces");

  EvalOptions eval;
  auto add_eval = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--input", eval.input, "Feature CSV")->required();
    cmd->add_option("--out", eval.out, "Report JSON to write");
    cmd->add_option("--models", eval.models, "Comma-separated model tags")->capture_default_str();
    cmd->add_option("--k", eval.k, "Number of folds")->capture_default_str();
    cmd->add_option("--seed", eval.seed, "Seed for seeded models and subsampling")->capture_default_str();
    cmd->add_option("--hp", eval.hp, "Hyperparameters: JSON object or file");
    cmd->add_option("--group-by", eval.group_by, "Fold grouping: subject or trial")->capture_default_str();
    return cmd;
  };
  auto* cv = add_eval("cv", "Grouped k-fold cross-validation");
  auto* tune = add_eval("tune", "Grid search over hyperparameters");
  tune->add_option("--grid", eval.grid, "Grid: JSON array, object keyed by model, or file");
  auto* curve = add_eval("curve", "Learning curve over training fractions");
  curve->add_option("--fractions", eval.fractions, "Comma-separated fractions in (0, 1]")->capture_default_str();

  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "Render the results table of a report JSON");
  report->add_option("--input", report_in, "Report JSON")->required();
  report->add_option("--out", report_out, "Text file to write (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      check(emosens_synth_corpus(synth_out.c_str(), &corpus), "synth");
      std::cout << "wrote " << corpus.subjects * corpus.trials * 2 << " recordings to " << synth_out << "\n";
    } else if (extract->parsed()) {
      emosens_dataset* raw = nullptr;
      char* failures = nullptr;
      check(emosens_extract_features(extract_in.c_str(), trace_dir.empty() ? nullptr : trace_dir.c_str(), &raw,
                                     &failures),
            "extract");
      DatasetPtr data(raw);
      const std::string failure_text = take(failures);
      check(emosens_dataset_save_csv(data.get(), extract_out.c_str()), "writing " + extract_out);
      write_output(extract_out + ".errors.json", failure_text + "\n");
      const std::size_t n_failed = json::parse(failure_text).size();
      std::cout << "extracted " << emosens_dataset_rows(data.get()) << " trials";
      if (n_failed > 0) std::cout << ", " << n_failed << " failed (see " << extract_out << ".errors.json)";
      std::cout << "\n";
    } else if (cv->parsed()) {
      run_cv(eval);
    } else if (tune->parsed()) {
      run_tune(eval);
    } else if (curve->parsed()) {
      run_curve(eval);
    } else if (report->parsed()) {
      eval.input = report_in;
      eval.out = report_out;
      run_report(eval);
    }
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "emosens: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
