#include "json.hpp"

#include "emosens/classifiers.hpp"
#include "emosens/error.hpp"

namespace emosens {

using nlohmann::json;

namespace {

json leaf_json(const ClassScores& s) { return {{"class_scores", s}}; }
json leaf_json(double v) { return {{"value", v}}; }

void leaf_from(const json& j, ClassScores& s) { s = j.at("class_scores").get<ClassScores>(); }
void leaf_from(const json& j, double& v) { v = j.at("value").get<double>(); }

template <typename Leaf>
json tree_json(const Tree<Leaf>& tree, std::size_t i = 0) {
  const auto& n = tree.nodes[i];
  if (n.feature < 0) return leaf_json(n.leaf);
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", tree_json(tree, static_cast<std::size_t>(n.left))},
          {"right", tree_json(tree, static_cast<std::size_t>(n.right))}};
}

template <typename Leaf>
int tree_from(const json& j, Tree<Leaf>& tree) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  if (j.contains("feature")) {
    const int feature = j.at("feature").get<int>();
    const double threshold = j.at("threshold").get<double>();
    const int l = tree_from(j.at("left"), tree);
    const int r = tree_from(j.at("right"), tree);
    auto& n = tree.nodes[static_cast<std::size_t>(id)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = l;
    n.right = r;
  } else {
    leaf_from(j, tree.nodes[static_cast<std::size_t>(id)].leaf);
  }
  return id;
}

template <typename Leaf>
Tree<Leaf> tree_from(const json& j) {
  Tree<Leaf> t;
  tree_from(j, t);
  return t;
}

std::vector<std::string> label_names(std::span<const Emotion> labels) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (auto e : labels) out.emplace_back(to_string(e));
  return out;
}

struct StateWriter {
  json operator()(const DecisionTreeState& s) const { return {{"tree", tree_json(s.tree)}}; }

  json operator()(const RandomForestState& s) const {
    json trees = json::array();
    for (const auto& t : s.trees) trees.push_back(tree_json(t));
    return {{"trees", trees}, {"seeds", s.seeds}};
  }

  json operator()(const GbdtState& s) const {
    json rounds = json::array();
    for (const auto& round : s.rounds) {
      json per_class = json::array();
      for (const auto& t : round) per_class.push_back(tree_json(t));
      rounds.push_back(std::move(per_class));
    }
    return {{"learning_rate", s.learning_rate},
            {"base_scores", s.base_scores},
            {"rounds", rounds},
            {"train_loss", s.train_loss}};
  }

  json operator()(const AdaBoostState& s) const {
    json stumps = json::array();
    for (const auto& st : s.stumps) {
      stumps.push_back({{"feature", st.feature},
                        {"threshold", st.threshold},
                        {"left_class", to_string(st.left_class)},
                        {"right_class", to_string(st.right_class)}});
    }
    return {{"stumps", stumps}, {"stump_weights", s.stump_weights}};
  }

  json operator()(const KnnState& s) const {
    json rows = json::array();
    for (std::size_t r = 0; r < s.train.rows(); ++r) {
      rows.push_back(std::vector<double>(s.train.row(r).begin(), s.train.row(r).end()));
    }
    return {{"k", s.k}, {"train", rows}, {"labels", label_names(s.labels)}};
  }

  json operator()(const GaussianNbState& s) const {
    return {{"priors", s.priors}, {"means", s.means}, {"variances", s.variances}};
  }
};

ModelState read_state(ModelKind kind, const json& j, std::size_t n_features) {
  switch (kind) {
    case ModelKind::DecisionTree:
      return DecisionTreeState{tree_from<ClassScores>(j.at("tree"))};
    case ModelKind::RandomForest: {
      RandomForestState s;
      for (const auto& t : j.at("trees")) s.trees.push_back(tree_from<ClassScores>(t));
      s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
      return s;
    }
    case ModelKind::Gbdt: {
      GbdtState s;
      s.learning_rate = j.at("learning_rate").get<double>();
      s.base_scores = j.at("base_scores").get<ClassScores>();
      for (const auto& round : j.at("rounds")) {
        if (round.size() != kNumEmotions) throw Error(ErrorKind::FormatError, "GBDT round must hold 9 trees");
        std::array<RegressionTree, kNumEmotions> trees;
        for (std::size_t c = 0; c < kNumEmotions; ++c) trees[c] = tree_from<double>(round[c]);
        s.rounds.push_back(std::move(trees));
      }
      if (j.contains("train_loss")) s.train_loss = j["train_loss"].get<std::vector<double>>();
      return s;
    }
    case ModelKind::AdaBoost: {
      AdaBoostState s;
      for (const auto& st : j.at("stumps")) {
        s.stumps.push_back({st.at("feature").get<int>(), st.at("threshold").get<double>(),
                            parse_emotion(st.at("left_class").get<std::string>()),
                            parse_emotion(st.at("right_class").get<std::string>())});
      }
      s.stump_weights = j.at("stump_weights").get<std::vector<double>>();
      return s;
    }
    case ModelKind::Knn: {
      KnnState s;
      s.k = j.at("k").get<std::size_t>();
      s.train = Matrix(0, n_features);
      for (const auto& row : j.at("train")) s.train.append_row(row.get<std::vector<double>>());
      for (const auto& name : j.at("labels")) s.labels.push_back(parse_emotion(name.get<std::string>()));
      return s;
    }
    case ModelKind::GaussianNb: {
      GaussianNbState s;
      s.priors = j.at("priors").get<ClassScores>();
      s.means = j.at("means").get<std::array<std::vector<double>, kNumEmotions>>();
      s.variances = j.at("variances").get<std::array<std::vector<double>, kNumEmotions>>();
      return s;
    }
  }
  throw Error(ErrorKind::FormatError, "unknown model kind");
}

}  // namespace

std::string model_to_json(const Model& model) {
  json params = json::object();
  for (const auto& [k, v] : model.hyperparams.values()) params[k] = v;
  json doc = {{"format", "emosens-model"},
              {"format_version", kModelFormatVersion},
              {"tag", model_tag(model.kind())},
              {"n_features", model.n_features},
              {"classes", kEmotionNames},
              {"hyperparams", params},
              {"state", std::visit(StateWriter{}, model.state)}};
  return doc.dump();
}

Model model_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const auto version = doc.at("format_version").get<std::string>();
    if (doc.value("format", "") != "emosens-model" || version.substr(0, 2) != "1.") {
      throw Error(ErrorKind::FormatError, "unsupported model document version " + version);
    }
    Model model;
    const ModelKind kind = parse_model_tag(doc.at("tag").get<std::string>());
    model.n_features = doc.at("n_features").get<std::size_t>();
    for (const auto& [k, v] : doc.at("hyperparams").items()) model.hyperparams.set(k, v.get<double>());
    model.hyperparams.validate(kind);
    model.state = read_state(kind, doc.at("state"), model.n_features);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::FormatError, std::string("bad model document: ") + e.what());
  }
}

}  // namespace emosens
