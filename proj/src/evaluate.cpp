#include "depsel/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "depsel/error.hpp"
#include "depsel/random.hpp"

namespace depsel {

std::string_view to_string(Featurizer f) {
  switch (f) {
    case Featurizer::BOW: return "BOW";
    case Featurizer::TFIDF: return "TFIDF";
    case Featurizer::W2V: return "W2V";
  }
  return "?";
}

std::string_view to_string(Reducer r) {
  switch (r) {
    case Reducer::None: return "None";
    case Reducer::PCA: return "PCA";
    case Reducer::GreedyRDC: return "GreedyRDC";
    case Reducer::GreedyMMD: return "GreedyMMD";
  }
  return "?";
}

std::string_view display_name(Reducer r) {
  switch (r) {
    case Reducer::None: return "";
    case Reducer::PCA: return "PCA";
    case Reducer::GreedyRDC: return "RDC";
    case Reducer::GreedyMMD: return "MMD";
  }
  return "?";
}

Featurizer featurizer_from_string(std::string_view name) {
  for (Featurizer f : {Featurizer::BOW, Featurizer::TFIDF, Featurizer::W2V})
    if (name == to_string(f)) return f;
  if (name == "bow") return Featurizer::BOW;
  if (name == "tfidf" || name == "TF-IDF") return Featurizer::TFIDF;
  if (name == "w2v") return Featurizer::W2V;
  throw ConfigError("unknown featurizer '" + std::string(name) + "'");
}

Reducer reducer_from_string(std::string_view name) {
  for (Reducer r : {Reducer::None, Reducer::PCA, Reducer::GreedyRDC, Reducer::GreedyMMD})
    if (name == to_string(r)) return r;
  if (name == "none") return Reducer::None;
  if (name == "pca") return Reducer::PCA;
  if (name == "rdc" || name == "RDC") return Reducer::GreedyRDC;
  if (name == "mmd" || name == "MMD") return Reducer::GreedyMMD;
  throw ConfigError("unknown reducer '" + std::string(name) + "'");
}

void ExperimentPlan::validate() const {
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (featurizers.empty()) throw ConfigError("plan has no featurizers");
  if (classifiers.empty() && reduced_classifiers.empty()) throw ConfigError("plan has no classifiers");
  if (target_dim < 1) throw ConfigError("target_dim must be at least 1");
  hyper.validate();
  rdc.validate();
  mmd.validate();
}

nlohmann::json to_json(const ExperimentPlan& plan) {
  auto names = [](const auto& items) {
    std::vector<std::string> out;
    for (const auto& i : items) out.emplace_back(to_string(i));
    return out;
  };
  return {{"featurizers", names(plan.featurizers)},
          {"reducers", names(plan.reducers)},
          {"classifiers", names(plan.classifiers)},
          {"reduced_classifiers", names(plan.reduced_classifiers)},
          {"folds", plan.folds},
          {"seed", plan.seed},
          {"target_dim", plan.target_dim},
          {"hyperparameters", to_json(plan.hyper)},
          {"rdc", {{"k", plan.rdc.k}, {"s", plan.rdc.s}, {"ridge", plan.rdc.ridge}}},
          {"mmd_sigma", plan.mmd.policy == MmdConfig::Sigma::Fixed ? nlohmann::json(plan.mmd.sigma)
                                                                  : nlohmann::json("median")}};
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
  ExperimentPlan plan;
  auto parse_list = [&](const char* key, auto& out, auto parse) {
    if (!j.contains(key)) return;
    out.clear();
    for (const auto& v : j.at(key)) out.push_back(parse(v.template get<std::string>()));
  };
  parse_list("featurizers", plan.featurizers, featurizer_from_string);
  parse_list("reducers", plan.reducers, reducer_from_string);
  parse_list("classifiers", plan.classifiers, classifier_kind_from_string);
  parse_list("reduced_classifiers", plan.reduced_classifiers, classifier_kind_from_string);
  plan.folds = j.value("folds", plan.folds);
  plan.seed = j.value("seed", plan.seed);
  plan.target_dim = j.value("target_dim", plan.target_dim);
  if (j.contains("hyperparameters")) plan.hyper = hyper_params_from_json(j.at("hyperparameters"));
  if (j.contains("rdc")) {
    const auto& r = j.at("rdc");
    plan.rdc.k = r.value("k", plan.rdc.k);
    plan.rdc.s = r.value("s", plan.rdc.s);
    plan.rdc.ridge = r.value("ridge", plan.rdc.ridge);
  }
  if (j.contains("mmd_sigma") && j.at("mmd_sigma").is_number())
    plan.mmd = MmdConfig::fixed(j.at("mmd_sigma").get<double>());
  return plan;
}

std::vector<Fold> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("stratified folds need folds >= 2");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members)
    if (idx.size() < folds)
      throw InputError("class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                       " items, fewer than the " + std::to_string(folds) + " folds");

  std::vector<std::vector<std::size_t>> test(folds);
  std::size_t next = 0;
  for (auto& [label, idx] : members) {
    Engine rng = make_engine(derive_seed(seed, "fold-class", {static_cast<std::uint64_t>(label)}));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i : idx) {
      test[next].push_back(i);
      next = (next + 1) % folds;
    }
  }
  std::vector<Fold> out(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::sort(test[f].begin(), test[f].end());
    out[f].test = test[f];
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) out[f].train.insert(out[f].train.end(), test[g].begin(), test[g].end());
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

namespace {

Matrix take_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

std::vector<int> take(std::span<const int> v, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Matrix ReducerState::transform(const Matrix& x) const {
  switch (kind) {
    case Reducer::None: return x;
    case Reducer::PCA: return pca_transform(*pca, x);
    default: return apply_selection(x, *selection);
  }
}

nlohmann::json ReducerState::to_json() const {
  nlohmann::json j{{"kind", std::string(to_string(kind))}};
  if (selection) j["selection"] = depsel::to_json(*selection);
  if (pca) j["pca"] = depsel::to_json(*pca);
  return j;
}

ReducerState ReducerState::from_json(const nlohmann::json& j) {
  ReducerState s;
  s.kind = reducer_from_string(j.at("kind").get<std::string>());
  if (j.contains("selection")) s.selection = selection_from_json(j.at("selection"));
  if (j.contains("pca")) s.pca = pca_from_json(j.at("pca"));
  return s;
}

ReducerState fit_reducer(Reducer kind, const Matrix& x, std::span<const int> labels,
                         std::span<const std::size_t> train_rows, const ExperimentPlan& plan,
                         std::uint64_t seed) {
  ReducerState state;
  state.kind = kind;
  if (kind == Reducer::None) return state;
  const Matrix xt = take_rows(x, train_rows);
  const std::vector<int> yt = take(labels, train_rows);
  switch (kind) {
    case Reducer::PCA:
      state.pca = pca_fit(xt, std::min<std::size_t>(plan.target_dim,
                                                     static_cast<std::size_t>(std::min(xt.rows(), xt.cols()))));
      break;
    case Reducer::GreedyRDC: {
      RdcConfig cfg = plan.rdc;
      cfg.seed = seed;
      state.selection = greedy_select(xt, yt, cfg, plan.target_dim);
      break;
    }
    case Reducer::GreedyMMD:
      state.selection = greedy_select(xt, yt, plan.mmd, plan.target_dim);
      state.selection->seed = seed;
      break;
    case Reducer::None: break;
  }
  return state;
}

std::string EvalRow::method_label() const {
  std::string label(to_string(featurizer) == std::string_view("TFIDF") ? "TF-IDF" : to_string(featurizer));
  if (reducer != Reducer::None) label += " + " + std::string(display_name(reducer));
  return label + " + " + std::string(display_name(classifier));
}

FeatureSet featurize_corpus(const LabeledCorpus& corpus, Featurizer featurizer,
                            const EmbeddingStore* store) {
  FeatureSet fs;
  switch (featurizer) {
    case Featurizer::BOW:
    case Featurizer::TFIDF:
      fs.vocabulary = build_vocabulary(corpus);
      fs.features = featurizer == Featurizer::BOW ? bow_matrix(corpus, *fs.vocabulary)
                                                  : tfidf_matrix(corpus, *fs.vocabulary);
      break;
    case Featurizer::W2V: {
      if (!store) throw ConfigError("W2V features requested but no embeddings were provided (--embeddings)");
      auto e = embedding_matrix(corpus, *store);
      fs.features = std::move(e.matrix);
      fs.dropped = std::move(e.dropped);
      break;
    }
  }
  std::map<DocId, Category> by_id;
  for (const auto& d : corpus.documents) by_id.emplace(d.id, d.category);
  for (DocId id : fs.features.doc_ids) fs.labels.push_back(class_code(by_id.at(id)));
  return fs;
}

QualitativeReport qualitative_report(const LabeledCorpus& corpus, const MethodPredictions& predictions) {
  QualitativeReport report;
  if (predictions.empty()) return report;
  const auto& reference = predictions.front().second;
  for (const auto& [name, preds] : predictions) {
    report.methods.push_back(name);
    if (preds.size() != reference.size() ||
        !std::equal(preds.begin(), preds.end(), reference.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; }))
      throw InputError("qualitative report: method '" + name + "' predicted a different document set");
  }
  for (const auto& doc : corpus.documents) {
    if (!reference.contains(doc.id)) continue;
    QualitativeRow row;
    row.id = doc.id;
    row.raw_text = doc.raw_text;
    row.truth = doc.category;
    for (const auto& [name, preds] : predictions) {
      const Category p = preds.at(doc.id);
      row.predicted.push_back(p);
      row.correct.push_back(p == doc.category);
    }
    report.rows.push_back(std::move(row));
  }
  if (report.rows.size() != reference.size())
    throw InputError("qualitative report: predictions reference documents missing from the corpus");
  return report;
}

EvalReport run_experiment(const LabeledCorpus& corpus, const EmbeddingStore* store,
                          const ExperimentPlan& plan) {
  plan.validate();
  if (corpus.documents.empty()) throw InputError("cannot run an experiment on an empty corpus");
  const bool wants_w2v = std::find(plan.featurizers.begin(), plan.featurizers.end(), Featurizer::W2V) !=
                         plan.featurizers.end();
  if (wants_w2v && !store)
    throw ConfigError("W2V features requested but no embeddings were provided (--embeddings)");

  EvalReport report;
  report.plan = plan;
  for (Featurizer featurizer : plan.featurizers) {
    FeatureSet fs = featurize_corpus(corpus, featurizer, store);
    if (!fs.dropped.empty()) report.dropped[std::string(to_string(featurizer))] = fs.dropped;
    const Matrix& x = fs.features.values;
    const auto folds = stratified_folds(fs.labels, plan.folds, derive_seed(plan.seed, "folds"));

    // (reducer, classifiers) groups in plan order
    std::vector<std::pair<Reducer, std::vector<ClassifierKind>>> groups;
    if (featurizer != Featurizer::W2V) {
      groups.emplace_back(Reducer::None, plan.classifiers);
    } else {
      for (Reducer r : plan.reducers)
        groups.emplace_back(r, r == Reducer::None ? plan.classifiers : plan.reduced_classifiers);
    }

    for (const auto& [reducer, classifiers] : groups) {
      const std::size_t first_row = report.rows.size();
      for (ClassifierKind kind : classifiers) {
        EvalRow row;
        row.featurizer = featurizer;
        row.reducer = reducer;
        row.classifier = kind;
        report.rows.push_back(std::move(row));
      }
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const auto& fold = folds[f];
        auto start = std::chrono::steady_clock::now();
        const ReducerState state =
            fit_reducer(reducer, x, fs.labels, fold.train, plan,
                        derive_seed(plan.seed, "reducer", {static_cast<std::uint64_t>(reducer), f}));
        const Matrix x_train = state.transform(take_rows(x, fold.train));
        const Matrix x_test = state.transform(take_rows(x, fold.test));
        const double reducer_time = seconds_since(start);
        const std::vector<int> y_train = take(fs.labels, fold.train);
        const std::vector<int> y_test = take(fs.labels, fold.test);

        for (std::size_t c = 0; c < classifiers.size(); ++c) {
          EvalRow& row = report.rows[first_row + c];
          row.reducer_seconds += reducer_time;
          start = std::chrono::steady_clock::now();
          const TrainedModel model =
              fit(classifiers[c], x_train, y_train, plan.hyper,
                  derive_seed(plan.seed, "classifier", {static_cast<std::uint64_t>(classifiers[c]), f}));
          row.fit_seconds += seconds_since(start);
          start = std::chrono::steady_clock::now();
          const std::vector<int> predicted = predict(model, x_test);
          row.predict_seconds += seconds_since(start);

          std::size_t hits = 0;
          for (std::size_t i = 0; i < y_test.size(); ++i) {
            hits += predicted[i] == y_test[i];
            row.confusion[static_cast<std::size_t>(y_test[i] - 1)][static_cast<std::size_t>(predicted[i] - 1)]++;
            row.predictions[fs.features.doc_ids[fold.test[i]]] = category_from_code(predicted[i]);
          }
          row.fold_accuracies.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(y_test.size()));
        }
      }
      for (std::size_t c = 0; c < classifiers.size(); ++c) {
        EvalRow& row = report.rows[first_row + c];
        row.mean_accuracy = std::accumulate(row.fold_accuracies.begin(), row.fold_accuracies.end(), 0.0) /
                            static_cast<double>(row.fold_accuracies.size());
      }
    }
  }

  // Qualitative comparison across the W2V G-SVM family, as in the per-comment tables.
  MethodPredictions family;
  for (const auto& row : report.rows)
    if (row.featurizer == Featurizer::W2V && row.classifier == ClassifierKind::GSVM)
      family.emplace_back(row.reducer == Reducer::None ? std::string("Gaussian SVM")
                                                       : std::string(display_name(row.reducer)),
                          row.predictions);
  report.qualitative = qualitative_report(corpus, family);
  return report;
}

nlohmann::json to_json(const QualitativeReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    std::vector<std::string> predicted;
    for (Category c : r.predicted) predicted.emplace_back(to_string(c));
    rows.push_back({{"doc_id", r.id},
                    {"text", r.raw_text},
                    {"true", std::string(to_string(r.truth))},
                    {"predicted", predicted},
                    {"correct", r.correct}});
  }
  return {{"methods", report.methods}, {"rows", rows}};
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json preds = nlohmann::json::array();
    for (const auto& [id, c] : r.predictions) preds.push_back({id, std::string(to_string(c))});
    rows.push_back({{"featurizer", std::string(to_string(r.featurizer))},
                    {"reducer", std::string(to_string(r.reducer))},
                    {"classifier", std::string(to_string(r.classifier))},
                    {"method", r.method_label()},
                    {"fold_accuracies", r.fold_accuracies},
                    {"mean_accuracy", r.mean_accuracy},
                    {"confusion", r.confusion},
                    {"reducer_seconds", r.reducer_seconds},
                    {"fit_seconds", r.fit_seconds},
                    {"predict_seconds", r.predict_seconds},
                    {"predictions", preds}});
  }
  nlohmann::json dropped = nlohmann::json::object();
  for (const auto& [feat, docs] : report.dropped) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [id, why] : docs) entries.push_back({{"doc_id", id}, {"reason", why}});
    dropped[feat] = entries;
  }
  return {{"plan", to_json(report.plan)},
          {"rows", rows},
          {"qualitative", to_json(report.qualitative)},
          {"dropped", dropped}};
}

namespace {

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string one_line(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(c == '\n' || c == '\r' ? ' ' : (c == '|' ? '/' : c));
  return out;
}

}  // namespace

std::string report_markdown(const EvalReport& report) {
  std::ostringstream md;
  std::vector<ClassifierKind> term_classifiers;
  std::map<std::pair<Featurizer, ClassifierKind>, double> term_acc;
  for (const auto& r : report.rows)
    if (r.featurizer != Featurizer::W2V) {
      if (std::find(term_classifiers.begin(), term_classifiers.end(), r.classifier) == term_classifiers.end())
        term_classifiers.push_back(r.classifier);
      term_acc[{r.featurizer, r.classifier}] = r.mean_accuracy;
    }
  if (!term_classifiers.empty()) {
    md << "### Bag of Words and TF-IDF Results\n\n"
       << "| Machine Learning Method | BOW Accuracy (%) | TF-IDF Accuracy (%) |\n"
       << "|---|---|---|\n";
    for (ClassifierKind k : term_classifiers) {
      auto cell = [&](Featurizer f) {
        auto it = term_acc.find({f, k});
        return it == term_acc.end() ? std::string("-") : percent(it->second);
      };
      md << "| " << display_name(k) << " | " << cell(Featurizer::BOW) << " | " << cell(Featurizer::TFIDF) << " |\n";
    }
    md << "\n";
  }
  bool any_w2v = false;
  for (const auto& r : report.rows) any_w2v = any_w2v || r.featurizer == Featurizer::W2V;
  if (any_w2v) {
    md << "### Word2Vec Model Results\n\n| Machine Learning Method | Accuracy (%) |\n|---|---|\n";
    for (const auto& r : report.rows)
      if (r.featurizer == Featurizer::W2V) md << "| " << r.method_label() << " | " << percent(r.mean_accuracy) << " |\n";
    md << "\n";
  }
  return md.str();
}

std::string qualitative_markdown(const QualitativeReport& report, std::size_t limit) {
  std::ostringstream md;
  const std::size_t n = limit ? std::min(limit, report.rows.size()) : report.rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = report.rows[i];
    const auto wrong = static_cast<std::size_t>(std::count(r.correct.begin(), r.correct.end(), false));
    const char* verdict = wrong == 0 ? "All Correct" : (wrong == r.correct.size() ? "All Incorrect" : "Mixed");
    md << "#### Document " << r.id << " - " << to_string(r.truth) << " - " << verdict << "\n\n|";
    for (const auto& m : report.methods) md << " " << m << " |";
    md << "\n|";
    for (std::size_t m = 0; m < report.methods.size(); ++m) md << "---|";
    md << "\n|";
    for (bool ok : r.correct) md << (ok ? " ✓ |" : " ✗ |");
    md << "\n|";
    for (Category c : r.predicted) md << " " << short_name(c) << " |";
    md << "\n\nResponse: *" << one_line(r.raw_text) << "*\n\n";
  }
  return md.str();
}

}  // namespace depsel
