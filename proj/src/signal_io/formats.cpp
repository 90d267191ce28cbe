#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "emosens/error.hpp"
#include "emosens/feature_names.hpp"
#include "emosens/signal_io.hpp"

namespace emosens {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    if (end == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
  return value;
}

std::optional<int> parse_rating(std::string_view cell, std::string_view what, std::size_t line_no,
                                ErrorKind kind) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  auto v = parse_number(cell);
  if (!v || *v != std::floor(*v)) {
    throw Error(ErrorKind::ParseError, std::string(what) + " on line " +
                                           std::to_string(line_no) + " is not an integer");
  }
  if (*v < 1.0 || *v > 5.0) {
    throw Error(kind, std::string(what) + " on line " + std::to_string(line_no) +
                          " outside [1, 5]");
  }
  return static_cast<int>(*v);
}

std::optional<int> json_rating(const json& entry, const char* key) {
  if (!entry.contains(key) || entry[key].is_null()) return std::nullopt;
  if (!entry[key].is_number_integer()) {
    throw Error(ErrorKind::FormatError, std::string(key) + " must be an integer");
  }
  const int v = entry[key].get<int>();
  if (v < 1 || v > 5) {
    throw Error(ErrorKind::FormatError, std::string(key) + " " + std::to_string(v) +
                                            " outside [1, 5]");
  }
  return v;
}

}  // namespace

std::string_view to_string(Segment s) noexcept {
  return s == Segment::Baseline ? "baseline" : "stimulus";
}

Segment parse_segment(std::string_view text) {
  if (text == "baseline") return Segment::Baseline;
  if (text == "stimulus") return Segment::Stimulus;
  throw Error(ErrorKind::FormatError, "unknown segment '" + std::string(text) + "'");
}

Emotion parse_emotion(std::string_view text) {
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    if (kEmotionNames[i] == text) return emotion_from_index(i);
  }
  throw Error(ErrorKind::LabelError, "unknown emotion '" + std::string(text) + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot rename onto " + path.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Manifest

std::vector<TrialManifest> read_manifest(const fs::path& manifest_path) {
  const std::string text = read_file(manifest_path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::FormatError, "manifest is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_array()) throw Error(ErrorKind::FormatError, "manifest must be a JSON array");

  static const std::set<std::string> kKnownKeys = {"subject_id", "trial_id", "segment",
                                                   "sampling_rate_hz", "emotion", "valence",
                                                   "arousal", "file"};
  std::vector<TrialManifest> entries;
  std::set<std::tuple<std::string, std::string, Segment>> seen;
  for (const json& e : doc) {
    if (!e.is_object()) throw Error(ErrorKind::FormatError, "manifest entry must be an object");
    for (const auto& [key, _] : e.items()) {
      if (!kKnownKeys.contains(key)) throw Error(ErrorKind::FormatError, "unknown manifest field " + key);
    }
    try {
      TrialManifest m;
      m.subject_id = e.at("subject_id").get<std::string>();
      m.trial_id = e.at("trial_id").get<std::string>();
      m.segment = parse_segment(e.at("segment").get<std::string>());
      m.sampling_rate_hz = e.at("sampling_rate_hz").get<double>();
      m.file = e.at("file").get<std::string>();
      if (e.contains("emotion") && !e["emotion"].is_null()) {
        m.emotion = parse_emotion(e["emotion"].get<std::string>());
      }
      m.valence = json_rating(e, "valence");
      m.arousal = json_rating(e, "arousal");
      if (!(m.sampling_rate_hz > 0.0)) throw Error(ErrorKind::FormatError, "sampling_rate_hz must be > 0");
      if (!seen.emplace(m.subject_id, m.trial_id, m.segment).second) {
        throw Error(ErrorKind::FormatError, "duplicate manifest entry " + m.subject_id + "/" +
                                                m.trial_id + "/" + std::string(to_string(m.segment)));
      }
      entries.push_back(std::move(m));
    } catch (const json::exception& ex) {
      throw Error(ErrorKind::FormatError, "bad manifest entry: " + std::string(ex.what()));
    }
  }
  return entries;
}

void write_manifest(const fs::path& manifest_path, std::span<const TrialManifest> entries) {
  json doc = json::array();
  for (const auto& m : entries) {
    json e;
    e["subject_id"] = m.subject_id;
    e["trial_id"] = m.trial_id;
    e["segment"] = to_string(m.segment);
    e["sampling_rate_hz"] = m.sampling_rate_hz;
    if (m.emotion) e["emotion"] = to_string(*m.emotion);
    if (m.valence) e["valence"] = *m.valence;
    if (m.arousal) e["arousal"] = *m.arousal;
    e["file"] = m.file;
    doc.push_back(std::move(e));
  }
  write_file_atomic(manifest_path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// ECG CSV

EcgRecording load_ecg_entry(const fs::path& manifest_dir, const TrialManifest& entry) {
  const fs::path path = manifest_dir / entry.file;
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty() || lines.front() != "sample_index,value_mv") {
    throw Error(ErrorKind::FormatError, path.string() + ": expected header sample_index,value_mv");
  }
  EcgRecording rec;
  rec.subject_id = entry.subject_id;
  rec.trial_id = entry.trial_id;
  rec.segment = entry.segment;
  rec.sampling_rate_hz = entry.sampling_rate_hz;
  rec.emotion = entry.emotion;
  rec.valence = entry.valence;
  rec.arousal = entry.arousal;
  rec.samples.reserve(lines.size() - 1);

  std::optional<double> previous_index;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_cells(lines[i]);
    if (cells.size() != 2) {
      throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(i + 1) + ": expected 2 cells");
    }
    const auto index = parse_number(cells[0]);
    const auto value = parse_number(cells[1]);
    if (!index || !value) {
      throw Error(ErrorKind::FormatError, path.string() + ":" + std::to_string(i + 1) + ": non-numeric cell");
    }
    if (previous_index && !(*index > *previous_index)) {
      throw Error(ErrorKind::FormatError,
                  path.string() + ":" + std::to_string(i + 1) + ": sample_index is not increasing");
    }
    previous_index = index;
    rec.samples.push_back(*value);
  }
  return rec;
}

std::vector<EcgRecording> load_ecg_csv(const fs::path& manifest_path) {
  const auto entries = read_manifest(manifest_path);
  const fs::path dir = manifest_path.parent_path();
  std::vector<EcgRecording> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(load_ecg_entry(dir, e));
  return out;
}

std::string format_ecg_csv(std::span<const double> samples) {
  std::string out = "sample_index,value_mv\n";
  out.reserve(samples.size() * 16);
  char buf[64];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), samples[i], std::chars_format::fixed, 6);
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

void write_ecg_csv(const fs::path& path, std::span<const double> samples) {
  write_file_atomic(path, format_ecg_csv(samples));
}

// ---------------------------------------------------------------------------
// Feature CSV

LabeledDataset parse_feature_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorKind::SchemaError, "feature CSV is empty");
  const auto header = split_cells(lines.front());

  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::size_t col_subject = kAbsent, col_trial = kAbsent, col_emotion = kAbsent,
              col_valence = kAbsent, col_arousal = kAbsent;
  std::array<std::size_t, kNumFeatures> feature_col;
  feature_col.fill(kAbsent);
  std::set<std::string_view> seen;

  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string_view name = trim(header[c]);
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::SchemaError, "duplicate column " + std::string(name));
    }
    if (name == "subject_id") col_subject = c;
    else if (name == "trial_id") col_trial = c;
    else if (name == "emotion") col_emotion = c;
    else if (name == "valence") col_valence = c;
    else if (name == "arousal") col_arousal = c;
    else if (name == "video_name") continue;
    else if (auto f = feature_index(name)) feature_col[*f] = c;
    else throw Error(ErrorKind::SchemaError, "unexpected column " + std::string(name));
  }
  for (auto [col, name] : {std::pair{col_subject, "subject_id"}, {col_trial, "trial_id"},
                           {col_emotion, "emotion"}, {col_valence, "valence"},
                           {col_arousal, "arousal"}}) {
    if (col == kAbsent) throw Error(ErrorKind::SchemaError, std::string("missing column ") + name);
  }
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    if (feature_col[f] == kAbsent) {
      throw Error(ErrorKind::SchemaError, "missing feature column " + std::string(kFeatureNames[f]));
    }
  }

  LabeledDataset data;
  data.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  data.features = Matrix(0, kNumFeatures);
  std::array<double, kNumFeatures> row{};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split_cells(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(i + 1) + " has " +
                                             std::to_string(cells.size()) + " cells, expected " +
                                             std::to_string(header.size()));
    }
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      auto v = parse_number(cells[feature_col[f]]);
      if (!v) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(i + 1) + ": non-numeric " +
                                               std::string(kFeatureNames[f]));
      }
      row[f] = *v;
    }
    const Emotion label = parse_emotion(trim(cells[col_emotion]));
    data.append(row, label, std::string(trim(cells[col_subject])),
                std::string(trim(cells[col_trial])),
                parse_rating(cells[col_valence], "valence", i + 1, ErrorKind::ParseError),
                parse_rating(cells[col_arousal], "arousal", i + 1, ErrorKind::ParseError));
  }
  return data;
}

LabeledDataset load_feature_csv(const fs::path& path) { return parse_feature_csv(read_file(path)); }

std::string format_feature_csv(const LabeledDataset& data) {
  if (data.num_features() != kNumFeatures && !data.features.empty()) {
    throw Error(ErrorKind::ShapeError, "feature CSV requires the 34 canonical features");
  }
  std::string out = "subject_id,trial_id,emotion,valence,arousal";
  for (auto name : kFeatureNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t r = 0; r < data.size(); ++r) {
    out += data.groups[r];
    out += ',';
    out += data.trial_ids[r];
    out += ',';
    out += to_string(data.labels[r]);
    out += ',';
    if (data.valence[r]) out += std::to_string(*data.valence[r]);
    out += ',';
    if (data.arousal[r]) out += std::to_string(*data.arousal[r]);
    for (double v : data.features.row(r)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void write_feature_csv(const fs::path& path, const LabeledDataset& data) {
  write_file_atomic(path, format_feature_csv(data));
}

// ---------------------------------------------------------------------------
// LabeledDataset

std::size_t LabeledDataset::num_groups() const {
  return std::set<std::string>(groups.begin(), groups.end()).size();
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.feature_names = feature_names;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    out.labels.push_back(labels[r]);
    out.groups.push_back(groups[r]);
    out.trial_ids.push_back(trial_ids[r]);
    out.valence.push_back(valence[r]);
    out.arousal.push_back(arousal[r]);
  }
  return out;
}

void LabeledDataset::append(std::span<const double> row, Emotion label, std::string group,
                            std::string trial_id, std::optional<int> val, std::optional<int> aro) {
  features.append_row(row);
  labels.push_back(label);
  groups.push_back(std::move(group));
  trial_ids.push_back(std::move(trial_id));
  valence.push_back(val);
  arousal.push_back(aro);
}

}  // namespace emosens
