// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. Usage: acceptance [path/to/emosens_cli]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "emosens/corpus.hpp"
#include "emosens/eval_harness.hpp"
#include "emosens/hrv_features.hpp"
#include "emosens/pipeline.hpp"
#include "emosens/qrs_detect.hpp"
#include "json.hpp"
#include "naive_hrv.hpp"
#include "random_rr.hpp"
#include "split_oracle.hpp"
#include "test_util.hpp"

using namespace emosens;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// The benchmark dataset is shared by criteria 2, 6 and 7.
const LabeledDataset& benchmark() {
  static const LabeledDataset data = [] {
    auto result = extract_synthetic_dataset(CorpusOptions{});
    if (!result.failures.empty()) {
      std::cerr << "benchmark extraction: " << result.failures.size() << " trials failed\n";
    }
    return result.dataset;
  }();
  return data;
}

LabeledDataset shuffled_labels(LabeledDataset d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::shuffle(d.labels.begin(), d.labels.end(), rng);
  return d;
}

// ---------------------------------------------------------------------------

Outcome criterion1(const std::string& cli) {
  Outcome o;
  TempDir dir;
  // A DREAMER-shaped feature file: the 34 features plus metadata and a
  // video_name column, columns in scrambled order.
  const LabeledDataset& src = benchmark();
  std::vector<std::string> columns = {"subject_id", "trial_id", "emotion", "valence", "arousal", "video_name"};
  for (auto n : kFeatureNames) columns.emplace_back(n);
  std::mt19937_64 rng(1);
  std::shuffle(columns.begin(), columns.end(), rng);
  std::ostringstream csv;
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << "\n";
  for (std::size_t r = 0; r < src.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& name = columns[c];
      csv << (c ? "," : "");
      if (name == "subject_id") csv << src.groups[r];
      else if (name == "trial_id") csv << src.trial_ids[r];
      else if (name == "emotion") csv << to_string(src.labels[r]);
      else if (name == "valence") csv << (src.valence[r] ? std::to_string(*src.valence[r]) : "");
      else if (name == "arousal") csv << (src.arousal[r] ? std::to_string(*src.arousal[r]) : "");
      else if (name == "video_name") csv << "clip_" << src.trial_ids[r] << ".avi";
      else csv << format_double(src.features(r, *feature_index(name)));
    }
    csv << "\n";
  }
  const fs::path input = dir / "dreamer_features.csv";
  write_file_atomic(input, csv.str());

  json table_row;
  std::size_t folds = 0;
  if (!cli.empty()) {
    const fs::path out = dir / "report.json";
    const std::string cmd = "'" + cli + "' cv --models gbdt --input '" + input.string() + "' --out '" +
                            out.string() + "' > '" + (dir / "stdout.txt").string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    o.require(status == 0, "cli exit status " + std::to_string(status));
    if (status != 0 || !fs::exists(out)) return o;
    const json doc = json::parse(read_file(out));
    o.require(doc.at("table").size() == 1, "one table row");
    table_row = doc.at("table").at(0);
    folds = doc.at("models").at(0).at("per_fold").size();
    o.require(doc.at("n_rows") == 414 && doc.at("n_groups") == 23, "414 rows in 23 groups");
    const std::string printed = read_file(dir / "stdout.txt");
    o.require(printed.find("accuracy(%)") != std::string::npos && printed.find("gbdt") != std::string::npos,
              "printed table");
    o.detail << " via CLI;";
  } else {
    const auto data = load_feature_csv(input);
    const auto r = cross_validate(data, ModelKind::Gbdt, {}, 10);
    double runtime = 0;
    for (const auto& m : r.per_fold) runtime += m.runtime_s;
    table_row = {{"model", "gbdt"},
                 {"accuracy", r.mean[0]},
                 {"precision", r.mean[4]},
                 {"recall", r.mean[5]},
                 {"f_score", r.mean[6]},
                 {"runtime_s", runtime}};
    folds = r.per_fold.size();
    o.detail << " in-process;";
  }
  o.require(folds == 10, "10 folds");
  o.require(table_row.at("model") == "gbdt", "model column");
  for (const char* key : {"accuracy", "precision", "recall", "f_score"}) {
    const double v = table_row.at(key).get<double>();
    o.require(std::isfinite(v) && v >= 0.0 && v <= 1.0, std::string(key) + " in [0,1]");
  }
  o.require(table_row.at("runtime_s").get<double>() > 0.0, "runtime column");
  o.detail << " gbdt accuracy " << fixed(100 * table_row.at("accuracy").get<double>(), 1)
           << "%, weighted P/R/F " << fixed(table_row.at("precision").get<double>(), 3) << "/"
           << fixed(table_row.at("recall").get<double>(), 3) << "/" << fixed(table_row.at("f_score").get<double>(), 3)
           << ", runtime " << fixed(table_row.at("runtime_s").get<double>(), 2) << " s";
  return o;
}

struct BenchmarkNumbers {
  double dt_default = 0, dt_tuned = 0;
  CvReport gbdt;
};

Outcome criterion2(BenchmarkNumbers& out) {
  Outcome o;
  const auto start = Clock::now();
  const LabeledDataset& data = benchmark();
  o.require(data.size() == 414 && data.num_groups() == 23, "414 trials from 23 subjects");

  out.gbdt = cross_validate(data, ModelKind::Gbdt, {}, 10);
  const auto dt_grid = default_grid(ModelKind::DecisionTree);
  const auto tuned = grid_search(data, ModelKind::DecisionTree, dt_grid, 10);
  out.dt_tuned = tuned.report.mean[0];
  out.dt_default = cross_validate(data, ModelKind::DecisionTree, {}, 10).mean[0];
  const double ada = cross_validate(data, ModelKind::AdaBoost, {}, 10).mean[0];
  const double gnb = cross_validate(data, ModelKind::GaussianNb, {}, 10).mean[0];
  const double gbdt = out.gbdt.mean[0];

  o.require(gbdt >= 0.85, "gbdt >= 0.85");
  o.require(out.dt_tuned >= 0.85, "tuned dt >= 0.85");
  const double floor = std::min(gbdt, out.dt_tuned);
  o.require(ada < floor, "adaboost below both");
  o.require(gnb < floor, "naive bayes below both");

  const LabeledDataset shuffled = shuffled_labels(data, 42);
  std::ostringstream shuffled_detail;
  for (auto kind : {ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::Gbdt, ModelKind::AdaBoost,
                    ModelKind::Knn, ModelKind::GaussianNb}) {
    const double acc = cross_validate(shuffled, kind, {}, 10).mean[0];
    shuffled_detail << " " << model_tag(kind) << " " << fixed(acc, 3);
    o.require(std::abs(acc - 1.0 / 9.0) <= 0.05, "shuffled " + std::string(model_tag(kind)) + " within 1/9 +- 0.05");
  }
  const double elapsed = seconds_since(start);
  o.require(elapsed < 180.0, "runtime < 180 s");

  o.detail << " gbdt " << fixed(gbdt) << ", tuned dt " << fixed(out.dt_tuned) << " (grid point "
           << tuned.best_index << " of " << dt_grid.size() << "), adaboost " << fixed(ada) << ", naive bayes "
           << fixed(gnb) << "; shuffled:" << shuffled_detail.str() << "; " << fixed(elapsed, 1) << " s";
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t tp = 0, detected = 0, truth = 0;
  const double tol = 0.05;
  for (int r = 0; r < 100; ++r) {
    // 60 s at a random heart rate with respiratory modulation and jitter.
    const double mean = 500.0 + 600.0 * u(rng);
    const double noise = 0.1 * (r + 1) / 100.0;
    std::vector<double> rr;
    double t = 0;
    while (t < 60.0) {
      const double v = std::clamp(mean + 40.0 * std::sin(2 * M_PI * 0.25 * t) + 20.0 * g(rng), 300.0, 1800.0);
      rr.push_back(v);
      t += v / 1000.0;
    }
    const auto rec = generate_synthetic_ecg(rr, r % 4 == 0 ? 360.0 : 256.0, noise, 1000 + r);
    const auto peaks = detect_r_peaks(rec).peaks;
    const auto& beats = *rec.ground_truth_beats;
    std::size_t j = 0;
    for (double b : beats) {
      while (j < peaks.size() && peaks.peak_times_s[j] < b - tol) ++j;
      if (j < peaks.size() && std::abs(peaks.peak_times_s[j] - b) <= tol) {
        ++tp;
        ++j;
      }
    }
    detected += peaks.size();
    truth += beats.size();
  }
  const double elapsed = seconds_since(start);
  const double se = double(tp) / truth, ppv = double(tp) / detected;
  o.require(se >= 0.99, "sensitivity >= 0.99");
  o.require(ppv >= 0.99, "PPV >= 0.99");
  o.require(elapsed < 10.0, "< 10 s");
  o.detail << " Se " << fixed(se) << ", PPV " << fixed(ppv) << " over " << truth << " beats, " << fixed(elapsed, 2)
           << " s";
  return o;
}

Outcome criterion4() {
  Outcome o;
  std::mt19937_64 rng(4);
  double worst = 0.0;
  std::string worst_name;
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto rr = testgen::random_rr_series(rng);
    HrvFeatureVector f = time_domain_features(rr);
    f.merge(frequency_domain_features(rr));
    f.merge(poincare_features(rr));
    const auto ref = naive::features(rr.intervals_ms, rr.onset_times_s);
    for (std::size_t k = 0; k < kNumFeatures; ++k) {
      const double a = f.at(k), b = ref.at(std::string(kFeatureNames[k]));
      const double scale = std::max(std::abs(a), std::abs(b));
      const double rel = a == b ? 0.0 : std::abs(a - b) / scale;
      if (rel > worst) {
        worst = rel;
        worst_name = kFeatureNames[k];
      }
      mismatches += rel > 1e-9;
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " feature values off by more than 1e-9 relative");

  const auto lf = frequency_domain_features(testgen::modulated_rr(0.10, 40.0));
  const auto hf = frequency_domain_features(testgen::modulated_rr(0.25, 40.0));
  o.require(std::abs(lf[Feature::LfPeakHz] - 0.10) <= 0.01, "0.10 Hz peak");
  o.require(std::abs(hf[Feature::HfPeakHz] - 0.25) <= 0.01, "0.25 Hz peak");
  o.detail << " 34000 values, worst relative error " << worst << (worst_name.empty() ? "" : " (" + worst_name + ")")
           << "; peaks " << fixed(lf[Feature::LfPeakHz], 4) << " Hz and " << fixed(hf[Feature::HfPeakHz], 4) << " Hz";
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> rows(1, 8), cols(1, 2), cls(1, 3), val(0, 5);
  std::size_t cases = 0, split_cases = 0, wrong = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    const auto n = static_cast<std::size_t>(rows(rng));
    const auto p = static_cast<std::size_t>(cols(rng));
    std::uniform_int_distribution<std::size_t> lab(0, static_cast<std::size_t>(cls(rng)) - 1);
    Matrix x(n, p);
    std::vector<Emotion> y;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < p; ++c) x(r, c) = val(rng) * 0.5;
      y.push_back(emotion_from_index(lab(rng)));
    }
    const auto model = train_decision_tree(x, y, {{"max_depth", 1}});
    const auto& tree = std::get<DecisionTreeState>(model.state).tree;
    const auto best = oracle::best_root_split(x, y);
    const bool pure = std::set<Emotion>(y.begin(), y.end()).size() == 1;
    ++cases;
    if (pure || best.feature < 0) {
      wrong += tree.nodes.size() != 1;
      continue;
    }
    ++split_cases;
    wrong += tree.nodes.size() != 3 || tree.nodes[0].feature != best.feature || tree.nodes[0].threshold != best.threshold;
  }
  o.require(split_cases >= 500, ">= 500 cases with a split");
  o.require(wrong == 0, std::to_string(wrong) + " root splits differ from exhaustive search");

  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 15), nrows(4, 64);
  double worst = 0.0;
  std::size_t gain_cases = 0;
  for (int trial = 0; trial < 500; ++trial) {
    Matrix x(static_cast<std::size_t>(nrows(rng)), 3);
    std::vector<double> grad(x.rows()), hess(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < 3; ++c) x(r, c) = level(rng);
      grad[r] = g(rng);
      hess[r] = 0.05 + 0.2 * std::abs(g(rng));
    }
    const double binned = best_histogram_split(x, grad, hess, 255, 1.0).gain;
    const double exact = oracle::exact_best_gain(x, grad, hess, 1.0);
    const double rel = std::abs(binned - exact) / std::max(1e-300, std::max(std::abs(binned), std::abs(exact)));
    worst = std::max(worst, binned == exact ? 0.0 : rel);
    ++gain_cases;
  }
  o.require(worst <= 1e-9, "binned gain equals exact gain");
  o.detail << " " << split_cases << " of " << cases << " generated datasets split, " << wrong << " mismatches; "
           << gain_cases << " gain cases, worst relative difference " << worst;
  return o;
}

Outcome criterion6(const BenchmarkNumbers& bench) {
  Outcome o;
  std::mt19937_64 rng(6);
  std::size_t leaks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n_groups = std::uniform_int_distribution<int>(2, 40)(rng);
    const int n_rows = std::uniform_int_distribution<int>(n_groups, 300)(rng);
    std::vector<std::string> groups;
    for (int gi = 0; gi < n_groups; ++gi) groups.push_back("g" + std::to_string(gi));
    std::uniform_int_distribution<int> pick(0, n_groups - 1);
    for (int r = n_groups; r < n_rows; ++r) groups.push_back("g" + std::to_string(pick(rng)));
    std::shuffle(groups.begin(), groups.end(), rng);
    const auto k = static_cast<std::size_t>(std::uniform_int_distribution<int>(2, std::min(n_groups, 12))(rng));
    for (const auto& split : fold_splits(group_k_fold(groups, k), groups)) {
      std::set<std::string> train;
      for (auto r : split.train) train.insert(groups[r]);
      for (auto r : split.test) leaks += train.count(groups[r]);
    }
  }
  o.require(leaks == 0, std::to_string(leaks) + " leaked rows");

  // Scaler isolation on the benchmark folds.
  const LabeledDataset& data = benchmark();
  std::normal_distribution<double> g(0.0, 1e4);
  std::size_t changed = 0;
  for (const auto& split : fold_splits(group_k_fold(data.groups, 10), data.groups)) {
    const auto before = fit_minmax(data.subset(split.train).features);
    LabeledDataset mutated = data;
    for (auto r : split.test) {
      for (std::size_t c = 0; c < mutated.num_features(); ++c) mutated.features(r, c) = g(rng);
    }
    const auto after = fit_minmax(mutated.subset(split.train).features);
    changed += !(after.min == before.min && after.max == before.max);
  }
  o.require(changed == 0, "scaler changed under test-fold perturbation");

  // Mean of the 10-fold GBDT report against a hand average.
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumMetricValues; ++i) {
    double s = 0.0;
    for (const auto& m : bench.gbdt.per_fold) s += metric_values(m)[i];
    worst = std::max(worst, std::abs(s / bench.gbdt.per_fold.size() - bench.gbdt.mean[i]));
  }
  o.require(bench.gbdt.per_fold.size() == 10, "10 folds");
  o.require(worst <= 1e-12, "mean equals hand average");
  o.detail << " 1000 fold trials, " << leaks << " leaks; scaler unchanged over 10 perturbed folds; max |mean - hand| "
           << worst;
  return o;
}

Outcome criterion7(const BenchmarkNumbers& bench) {
  Outcome o;
  o.require(bench.dt_tuned >= bench.dt_default, "tuned >= default");
  o.detail << " tuned dt " << fixed(bench.dt_tuned) << " vs default dt " << fixed(bench.dt_default) << " ("
           << (bench.dt_tuned >= bench.dt_default ? "+" : "") << fixed(100 * (bench.dt_tuned - bench.dt_default), 1)
           << " points)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  BenchmarkNumbers bench;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dataset-gated GBDT cross-validation pathway", [&] { return criterion1(cli); }},
      {"synthetic benchmark ordering", [&] { return criterion2(bench); }},
      {"QRS detection sensitivity and PPV", [] { return criterion3(); }},
      {"feature oracles", [] { return criterion4(); }},
      {"split-search oracles", [] { return criterion5(); }},
      {"protocol invariants", [&] { return criterion6(bench); }},
      {"tuned decision tree not worse than default", [&] { return criterion7(bench); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " --"
              << o.detail.str() << std::endl;
  }
  return failures;
}
