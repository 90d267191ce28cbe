#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "emosens/feature_names.hpp"
#include "emosens/signal_io.hpp"
#include "test_util.hpp"

using namespace emosens;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string feature_header(bool with_video = false, std::size_t drop = kNumFeatures) {
  std::string h = "subject_id,trial_id,emotion,valence,arousal";
  if (with_video) h += ",video_name";
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (i == drop) continue;
    h += ",";
    h += kFeatureNames[i];
  }
  return h + "\n";
}

std::string feature_row(const std::string& subject, const std::string& trial, const std::string& emotion,
                        double base, bool with_video = false, std::size_t drop = kNumFeatures) {
  std::string r = subject + "," + trial + "," + emotion + ",3,4";
  if (with_video) r += ",clip.mp4";
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (i == drop) continue;
    r += "," + format_double(base + 0.25 * static_cast<double>(i));
  }
  return r + "\n";
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Table of column name -> cells, for order-insensitive comparison.
std::map<std::string, std::vector<std::string>> columns(const std::string& csv) {
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  const auto names = cells(line);
  std::map<std::string, std::vector<std::string>> out;
  while (std::getline(ss, line)) {
    const auto row = cells(line);
    for (std::size_t c = 0; c < names.size(); ++c) out[names[c]].push_back(row[c]);
  }
  return out;
}

}  // namespace

TEST_CASE("emotion labels form a closed set of nine") {
  CHECK(kNumEmotions == 9);
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    CHECK(index_of(parse_emotion(kEmotionNames[i])) == i);
  }
  CHECK_ERROR_KIND(parse_emotion("joy"), ErrorKind::LabelError);
  CHECK_ERROR_KIND(parse_emotion("Fear"), ErrorKind::LabelError);
}

TEST_CASE("synthetic ECG: 60 beats at 1000 ms") {
  const std::vector<double> rr(60, 1000.0);
  const auto rec = generate_synthetic_ecg(rr, 256.0, 0.0, 1);
  CHECK(rec.samples.size() >= 15360);
  REQUIRE(rec.ground_truth_beats);
  const auto& beats = *rec.ground_truth_beats;
  REQUIRE(beats.size() == 60);
  CHECK(rec.duration_s() - beats.front() == doctest::Approx(60.0).epsilon(1e-3));
  for (std::size_t i = 1; i < beats.size(); ++i) CHECK(beats[i] - beats[i - 1] == doctest::Approx(1.0));
  for (double t : beats) {
    const auto idx = static_cast<std::size_t>(std::lround(t * 256.0));
    CHECK(rec.samples[idx] == doctest::Approx(1.0).epsilon(0.01));
  }
  CHECK(*std::max_element(rec.samples.begin(), rec.samples.end()) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("synthetic ECG is seeded and deterministic") {
  const std::vector<double> rr(20, 800.0);
  const auto a = generate_synthetic_ecg(rr, 256.0, 0.05, 7);
  const auto b = generate_synthetic_ecg(rr, 256.0, 0.05, 7);
  const auto c = generate_synthetic_ecg(rr, 256.0, 0.05, 8);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
  CHECK(format_ecg_csv(a.samples) == format_ecg_csv(b.samples));
}

TEST_CASE("synthetic ECG preconditions") {
  const std::vector<double> short_rr = {1000.0, 249.0, 1000.0};
  CHECK_ERROR_KIND(generate_synthetic_ecg(short_rr, 256.0, 0.0, 1), ErrorKind::InvalidSchedule);
  const std::vector<double> rr(5, 1000.0);
  CHECK_ERROR_KIND(generate_synthetic_ecg(rr, 99.0, 0.0, 1), ErrorKind::UnsupportedRate);
  CHECK_NOTHROW(generate_synthetic_ecg(std::vector<double>{250.0, 250.0}, 100.0, 0.0, 1));
}

TEST_CASE("ground-truth beats are strictly increasing for irregular schedules") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(250.0, 1800.0);
  std::vector<double> rr(100);
  for (double& v : rr) v = u(rng);
  const auto rec = generate_synthetic_ecg(rr, 128.0, 0.0, 1);
  const auto& b = *rec.ground_truth_beats;
  CHECK(std::adjacent_find(b.begin(), b.end(), std::greater_equal<>()) == b.end());
}

TEST_CASE("manifest and ECG CSV loading") {
  TempDir dir;
  write_text(dir / "a.csv", "sample_index,value_mv\n0,0.1\n1,0.5\n2,-0.25\n");
  write_text(dir / "manifest.json",
             R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,
                  "emotion":"fear","valence":2,"arousal":4,"file":"a.csv"}])");
  const auto recs = load_ecg_csv(dir / "manifest.json");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].samples == std::vector<double>{0.1, 0.5, -0.25});
  CHECK(recs[0].sampling_rate_hz == 256.0);
  CHECK(recs[0].emotion == Emotion::Fear);
  CHECK(recs[0].valence == 2);
  CHECK(recs[0].segment == Segment::Stimulus);

  SUBCASE("valence outside 1..5") {
    write_text(dir / "manifest.json",
               R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,
                    "valence":6,"file":"a.csv"}])");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::FormatError);
  }
  SUBCASE("missing ECG file") {
    write_text(dir / "manifest.json",
               R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,
                    "file":"missing.csv"}])");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::IoError);
  }
  SUBCASE("missing manifest") { CHECK_ERROR_KIND(load_ecg_csv(dir / "nope.json"), ErrorKind::IoError); }
  SUBCASE("non-monotonic sample_index") {
    write_text(dir / "a.csv", "sample_index,value_mv\n0,0.1\n2,0.5\n1,-0.25\n");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::FormatError);
  }
  SUBCASE("wrong header") {
    write_text(dir / "a.csv", "index,mv\n0,0.1\n");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::FormatError);
  }
  SUBCASE("unknown emotion") {
    write_text(dir / "manifest.json",
               R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,
                    "emotion":"joy","file":"a.csv"}])");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::LabelError);
  }
  SUBCASE("duplicate subject/trial/segment") {
    write_text(dir / "manifest.json",
               R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,"file":"a.csv"},
                   {"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,"file":"a.csv"}])");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::FormatError);
  }
  SUBCASE("unknown manifest field") {
    write_text(dir / "manifest.json",
               R"([{"subject_id":"s01","trial_id":"t01","segment":"stimulus","sampling_rate_hz":256,
                    "file":"a.csv","colour":"red"}])");
    CHECK_ERROR_KIND(load_ecg_csv(dir / "manifest.json"), ErrorKind::FormatError);
  }
}

TEST_CASE("manifest round trip keeps 23 distinct subjects") {
  TempDir dir;
  std::vector<TrialManifest> entries;
  for (int s = 0; s < 23; ++s) {
    TrialManifest m;
    m.subject_id = "s" + std::to_string(s);
    m.trial_id = "t1";
    m.segment = Segment::Baseline;
    m.sampling_rate_hz = 256;
    m.file = "x.csv";
    entries.push_back(m);
  }
  write_manifest(dir / "manifest.json", entries);
  const auto back = read_manifest(dir / "manifest.json");
  REQUIRE(back.size() == 23);
  std::set<std::string> subjects;
  for (const auto& m : back) subjects.insert(m.subject_id);
  CHECK(subjects.size() == 23);
  CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));
}

TEST_CASE("feature CSV: video_name is dropped") {
  const std::string csv = feature_header(true) + feature_row("s1", "t1", "fear", 1.0, true);
  const auto data = parse_feature_csv(csv);
  REQUIRE(data.size() == 1);
  CHECK(data.num_features() == kNumFeatures);
  CHECK(data.features(0, 0) == 1.0);
  CHECK(data.features(0, 33) == 1.0 + 0.25 * 33);
  CHECK(data.labels[0] == Emotion::Fear);
  CHECK(data.groups[0] == "s1");
  CHECK(format_feature_csv(data).find("video_name") == std::string::npos);
}

TEST_CASE("feature CSV schema and parse errors") {
  CHECK_ERROR_KIND(parse_feature_csv(feature_header(false, 7) + feature_row("s1", "t1", "fear", 1.0, false, 7)),
                   ErrorKind::SchemaError);
  std::string bad = feature_row("s1", "t1", "fear", 1.0);
  bad.replace(bad.find(",1.25,"), 6, ",abc,");
  CHECK_ERROR_KIND(parse_feature_csv(feature_header() + bad), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_feature_csv(feature_header() + feature_row("s1", "t1", "joy", 1.0)), ErrorKind::LabelError);
  std::string extra = feature_header();
  extra.insert(extra.size() - 1, ",mystery");
  CHECK_ERROR_KIND(parse_feature_csv(extra), ErrorKind::SchemaError);
  CHECK_ERROR_KIND(parse_feature_csv(""), ErrorKind::SchemaError);
}

TEST_CASE("feature CSV with 414 rows has 23 groups") {
  std::string csv = feature_header();
  for (int s = 0; s < 23; ++s) {
    for (int t = 0; t < 18; ++t) {
      csv += feature_row("s" + std::to_string(s), "t" + std::to_string(t),
                         std::string(kEmotionNames[static_cast<std::size_t>(t % 9)]), s + t);
    }
  }
  const auto data = parse_feature_csv(csv);
  CHECK(data.size() == 414);
  CHECK(data.num_groups() == 23);
}

TEST_CASE("feature CSV round trip is cell-for-cell modulo column order") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 100.0);
  std::vector<std::string> header = {"subject_id", "trial_id", "emotion", "valence", "arousal"};
  for (auto n : kFeatureNames) header.emplace_back(n);
  std::shuffle(header.begin(), header.end(), rng);

  std::string csv;
  for (std::size_t c = 0; c < header.size(); ++c) csv += (c ? "," : "") + header[c];
  csv += "\n";
  for (int r = 0; r < 25; ++r) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string cell;
      if (header[c] == "subject_id") cell = "s" + std::to_string(r % 4);
      else if (header[c] == "trial_id") cell = "t" + std::to_string(r);
      else if (header[c] == "emotion") cell = std::string(kEmotionNames[static_cast<std::size_t>(r % 9)]);
      else if (header[c] == "valence") cell = r % 5 == 0 ? "" : std::to_string(1 + r % 5);
      else if (header[c] == "arousal") cell = std::to_string(1 + (r * 3) % 5);
      else cell = format_double(g(rng));
      csv += (c ? "," : "") + cell;
    }
    csv += "\n";
  }
  const std::string written = format_feature_csv(parse_feature_csv(csv));
  CHECK(columns(written) == columns(csv));
  CHECK(format_feature_csv(parse_feature_csv(written)) == written);
}

TEST_CASE("atomic writes leave no temporary behind") {
  TempDir dir;
  write_file_atomic(dir / "out.txt", "hello");
  CHECK(read_file(dir / "out.txt") == "hello");
  write_file_atomic(dir / "out.txt", "again");
  CHECK(read_file(dir / "out.txt") == "again");
  CHECK_FALSE(fs::exists(dir / "out.txt.tmp"));
  CHECK_ERROR_KIND(write_file_atomic(dir / "no_such_dir" / "x.txt", "x"), ErrorKind::IoError);
}
