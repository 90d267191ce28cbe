// Drives the library through the exported C functions only.

#include <cstring>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "emosens/emosens.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Scratch {
  fs::path path = fs::temp_directory_path() / ("emosens_capi_" + std::to_string(::getpid()));
  Scratch() { fs::create_directories(path); }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  emosens_string_free(s);
  return out;
}

emosens_corpus_options small_options() {
  emosens_corpus_options o;
  emosens_corpus_options_default(&o);
  o.subjects = 4;
  o.trials = 9;
  return o;
}

}  // namespace

TEST_CASE("library basics") {
  CHECK(std::strlen(emosens_version()) > 0);
  REQUIRE(emosens_num_emotions() == 9);
  CHECK(std::string(emosens_emotion_name(0)) == "calmness");
  CHECK(emosens_emotion_name(9) == nullptr);

  emosens_corpus_options o;
  emosens_corpus_options_default(&o);
  CHECK(o.subjects == 23);
  CHECK(o.trials == 18);
  CHECK(o.seed == 42);
}

TEST_CASE("null handles and bad arguments are reported, not crashed on") {
  CHECK(emosens_cross_validate(nullptr, "dt", nullptr, 2, nullptr) == EMOSENS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(emosens_last_error()) > 0);
  CHECK(emosens_dataset_rows(nullptr) == 0);
  emosens_dataset_free(nullptr);
  emosens_report_free(nullptr);
  emosens_model_free(nullptr);
  emosens_string_free(nullptr);

  emosens_dataset* d = nullptr;
  CHECK(emosens_dataset_load_csv("/nonexistent/features.csv", &d) == EMOSENS_ERR_IO);
  CHECK(d == nullptr);
  CHECK(std::string(emosens_last_error_kind()) == "IoError");
}

TEST_CASE("extract, evaluate and serialize through the C API") {
  const auto o = small_options();
  emosens_dataset* data = nullptr;
  REQUIRE(emosens_extract_synthetic(&o, &data) == EMOSENS_OK);
  CHECK(emosens_dataset_rows(data) == 36);
  CHECK(emosens_dataset_features(data) == 34);
  CHECK(emosens_dataset_groups(data) == 4);

  emosens_report* report = nullptr;
  REQUIRE(emosens_cross_validate(data, "dt", R"({"max_depth": 4})", 4, &report) == EMOSENS_OK);
  double acc = -1;
  CHECK(emosens_report_mean(report, "accuracy", &acc) == EMOSENS_OK);
  CHECK(acc >= 0.0);
  CHECK(acc <= 1.0);
  CHECK(emosens_report_mean(report, "bogus", &acc) == EMOSENS_ERR_INVALID_ARGUMENT);
  char* text = nullptr;
  REQUIRE(emosens_report_json(report, &text) == EMOSENS_OK);
  const json j = json::parse(take(text));
  CHECK(j.at("model") == "dt");
  CHECK(j.at("per_fold").size() == 4);
  CHECK(j.at("mean").at("accuracy").get<double>() == acc);
  char* csv = nullptr;
  CHECK(emosens_report_curve_csv(report, &csv) == EMOSENS_ERR_INVALID_ARGUMENT);
  emosens_report_free(report);

  SUBCASE("error mapping") {
    emosens_report* r = nullptr;
    CHECK(emosens_cross_validate(data, "dt", nullptr, 5, &r) == EMOSENS_ERR_COMPUTE);
    CHECK(std::string(emosens_last_error_kind()) == "TooManyFolds");
    CHECK(emosens_cross_validate(data, "svm", nullptr, 2, &r) == EMOSENS_ERR_INVALID_ARGUMENT);
    CHECK(emosens_cross_validate(data, "dt", R"({"n_trees": 3})", 2, &r) == EMOSENS_ERR_INPUT);
    CHECK(emosens_cross_validate(data, "dt", "{not json", 2, &r) == EMOSENS_ERR_INPUT);
    CHECK(emosens_grid_search(data, "dt", "[]", 2, &r) == EMOSENS_ERR_INPUT);
    CHECK(emosens_dataset_set_grouping(data, "video") == EMOSENS_ERR_INVALID_ARGUMENT);
    CHECK(r == nullptr);
  }

  SUBCASE("grid search and learning curve") {
    emosens_report* r = nullptr;
    REQUIRE(emosens_grid_search(data, "dt", R"([{"max_depth": 1}, {"max_depth": 4}])", 2, &r) == EMOSENS_OK);
    char* t = nullptr;
    REQUIRE(emosens_report_json(r, &t) == EMOSENS_OK);
    const json g = json::parse(take(t));
    CHECK(g.at("grid_search").at("mean_accuracy").size() == 2);
    CHECK(g.at("grid_search").at("best_index") == 1);
    emosens_report_free(r);

    char* grid = nullptr;
    REQUIRE(emosens_default_grid("knn", &grid) == EMOSENS_OK);
    CHECK(json::parse(take(grid)).is_array());

    const double fractions[] = {0.5, 1.0};
    REQUIRE(emosens_learning_curve(data, "knn", R"({"k": 1})", fractions, 2, 2, 7, &r) == EMOSENS_OK);
    char* c = nullptr;
    REQUIRE(emosens_report_curve_csv(r, &c) == EMOSENS_OK);
    const std::string curve = take(c);
    CHECK(curve.rfind("fraction,train_acc,val_acc\n", 0) == 0);
    emosens_report_free(r);
  }

  SUBCASE("trial grouping and label shuffling") {
    REQUIRE(emosens_dataset_set_grouping(data, "trial") == EMOSENS_OK);
    CHECK(emosens_dataset_groups(data) == 36);
    REQUIRE(emosens_dataset_set_grouping(data, "subject") == EMOSENS_OK);
    CHECK(emosens_dataset_groups(data) == 4);
    CHECK(emosens_dataset_shuffle_labels(data, 3) == EMOSENS_OK);
    CHECK(emosens_dataset_rows(data) == 36);
  }

  SUBCASE("model round trip") {
    Scratch dir;
    emosens_model* model = nullptr;
    REQUIRE(emosens_model_train(data, "gbdt", R"({"n_rounds": 5})", &model) == EMOSENS_OK);
    const std::string path = (dir.path / "model.json").string();
    REQUIRE(emosens_model_save(model, path.c_str()) == EMOSENS_OK);
    emosens_model* loaded = nullptr;
    REQUIRE(emosens_model_load(path.c_str(), &loaded) == EMOSENS_OK);
    std::vector<int> a(36), b(36);
    REQUIRE(emosens_model_predict(model, data, a.data(), a.size()) == EMOSENS_OK);
    REQUIRE(emosens_model_predict(loaded, data, b.data(), b.size()) == EMOSENS_OK);
    CHECK(a == b);
    for (int v : a) {
      CHECK(v >= 0);
      CHECK(v < 9);
    }
    CHECK(emosens_model_predict(model, data, a.data(), 3) == EMOSENS_ERR_INVALID_ARGUMENT);
    emosens_model_free(model);
    emosens_model_free(loaded);
  }

  emosens_dataset_free(data);
}

TEST_CASE("synthesize, extract from disk and round-trip the feature CSV") {
  Scratch dir;
  emosens_corpus_options o = small_options();
  o.subjects = 2;
  REQUIRE(emosens_synth_corpus(dir.path.string().c_str(), &o) == EMOSENS_OK);
  const std::string manifest = (dir.path / "manifest.json").string();
  emosens_dataset* data = nullptr;
  char* failures = nullptr;
  REQUIRE(emosens_extract_features(manifest.c_str(), nullptr, &data, &failures) == EMOSENS_OK);
  CHECK(json::parse(take(failures)).empty());
  CHECK(emosens_dataset_rows(data) == 18);

  const std::string csv = (dir.path / "features.csv").string();
  REQUIRE(emosens_dataset_save_csv(data, csv.c_str()) == EMOSENS_OK);
  emosens_dataset* back = nullptr;
  REQUIRE(emosens_dataset_load_csv(csv.c_str(), &back) == EMOSENS_OK);
  CHECK(emosens_dataset_rows(back) == 18);
  const std::string again = (dir.path / "again.csv").string();
  REQUIRE(emosens_dataset_save_csv(back, again.c_str()) == EMOSENS_OK);
  std::ifstream f1(csv), f2(again);
  CHECK(std::string(std::istreambuf_iterator<char>(f1), {}) == std::string(std::istreambuf_iterator<char>(f2), {}));

  {
    std::ofstream bad(csv, std::ios::trunc);
    bad << "subject_id,trial_id\ns1,t1\n";
  }
  emosens_dataset* broken = nullptr;
  CHECK(emosens_dataset_load_csv(csv.c_str(), &broken) == EMOSENS_ERR_INPUT);
  CHECK(std::string(emosens_last_error_kind()) == "SchemaError");

  CHECK(emosens_write_file((dir.path / "note.txt").string().c_str(), "hi") == EMOSENS_OK);
  CHECK(emosens_write_file((dir.path / "missing" / "note.txt").string().c_str(), "hi") == EMOSENS_ERR_IO);

  emosens_dataset_free(data);
  emosens_dataset_free(back);
}
