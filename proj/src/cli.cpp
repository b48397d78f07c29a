#include "depsel/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depsel/classify.hpp"
#include "depsel/corpus.hpp"
#include "depsel/depmeasure.hpp"
#include "depsel/embeddings.hpp"
#include "depsel/error.hpp"
#include "depsel/evaluate.hpp"
#include "depsel/featsel.hpp"
#include "depsel/featurize.hpp"
#include "depsel/random.hpp"
#include "depsel/synthetic.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace depsel {
namespace {

struct Settings {
  std::string config;
  std::string input;
  std::string text_col = "text";
  std::string score_col = "score";
  std::string stopwords;
  bool strip_digits = false;
  std::string embeddings;
  std::string format = "text";
  std::size_t limit = 0;
  std::uint64_t seed = 0;
  std::size_t target_dim = 20;
  std::size_t folds = 5;
  std::string out;

  std::string featurizer = "W2V";
  std::vector<std::string> featurizers{"BOW", "TFIDF", "W2V"};
  std::vector<std::string> reducers{"None", "PCA", "GreedyRDC", "GreedyMMD"};
  std::vector<std::string> classifiers{"KNN", "GNB", "LOGREG", "LSVM", "GSVM", "LDA"};
  std::vector<std::string> reduced_classifiers{"GSVM"};
  int knn_k = 5;
  double c = 1.0;
  int max_iter = 1000;
  int rdc_k = 20;
  double rdc_s = 1.0 / 6.0;
  std::string mmd_sigma = "median";
  std::string svm_sigma = "median";
  std::size_t qualitative_limit = 0;

  std::string label_col = "label";
  std::string method = "rdc";

  std::vector<std::string> models;
  std::vector<DocId> ids;

  std::string stat = "rdc";
  std::string x;
  std::string y;

  std::size_t n = 2000;
  int repeats = 5;
};

// ---- small helpers --------------------------------------------------------

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write '" + tmp.string() + "'");
    os << content;
    if (!os.flush()) throw InputError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required");
  if (!fs::is_regular_file(path))
    throw ConfigError(std::string(flag) + ": file '" + path + "' does not exist");
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

MmdConfig sigma_policy(const std::string& text, const char* flag) {
  if (text == "median") return MmdConfig::median();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0) return MmdConfig::fixed(v);
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(flag) + " must be 'median' or a positive number, got '" + text + "'");
}

std::string slug(std::string s) {
  std::string out;
  for (char ch : s) {
    if (std::isalnum(static_cast<unsigned char>(ch)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    else if (!out.empty() && out.back() != '-')
      out.push_back('-');
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.out.empty())
    out << text;
  else
    write_atomic(s.out, text);
}

// ---- corpus artifacts -----------------------------------------------------

json corpus_to_json(const LabeledCorpus& corpus) {
  json docs = json::array();
  for (const auto& d : corpus.documents)
    docs.push_back({{"id", d.id},
                    {"text", d.raw_text},
                    {"score", d.raw_score},
                    {"category", std::string(to_string(d.category))},
                    {"tokens", d.tokens}});
  json dropped = json::array();
  for (const auto& [id, why] : corpus.dropped) dropped.push_back({{"doc_id", id}, {"reason", why}});
  return {{"format_version", 1}, {"balanced", corpus.balanced}, {"documents", docs}, {"dropped", dropped}};
}

LabeledCorpus corpus_from_json(const json& j) {
  if (j.value("format_version", 0) != 1) throw InputError("unsupported corpus artifact version");
  LabeledCorpus c;
  c.balanced = j.value("balanced", false);
  for (const auto& d : j.at("documents")) {
    Document doc;
    doc.id = d.at("id").get<DocId>();
    doc.raw_text = d.at("text").get<std::string>();
    doc.raw_score = d.at("score").get<int>();
    doc.category = category_from_string(d.at("category").get<std::string>());
    doc.tokens = d.at("tokens").get<std::vector<std::string>>();
    c.documents.push_back(std::move(doc));
  }
  for (const auto& d : j.at("dropped")) c.dropped[d.at("doc_id").get<DocId>()] = d.at("reason").get<std::string>();
  return c;
}

json counts_json(const LabeledCorpus& c) {
  const auto k = c.class_counts();
  return {{"documents", c.documents.size()},
          {"Disagree", k[0]},
          {"Neutral", k[1]},
          {"Agree", k[2]}};
}

/// Runs load, preprocess, collapse and rebalance on a raw CSV.
LabeledCorpus ingest(const Settings& s, json* summary) {
  require_file(s.input, "--input");
  StopwordSet stop = default_stopwords();
  if (!s.stopwords.empty()) {
    require_file(s.stopwords, "--stopwords");
    stop = load_stopwords(s.stopwords);
  }
  LabeledCorpus raw = load_csv(s.input, s.text_col, s.score_col);
  PreprocessOptions opts;
  opts.strip_digits = s.strip_digits;
  LabeledCorpus pre = preprocess(raw, stop, opts);
  LabeledCorpus collapsed = collapse_scores(pre);
  LabeledCorpus balanced = rebalance(collapsed, derive_seed(s.seed, "ingest"));
  if (summary)
    *summary = {{"loaded", counts_json(collapse_scores(raw))},
                {"preprocessed", counts_json(pre)},
                {"collapsed", counts_json(collapsed)},
                {"rebalanced", counts_json(balanced)},
                {"dropped", balanced.dropped.size()},
                {"seed", s.seed}};
  return balanced;
}

LabeledCorpus obtain_corpus(const Settings& s) {
  require_file(s.input, "--input");
  if (ends_with(s.input, ".json")) {
    std::ifstream in(s.input, std::ios::binary);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError("--input: '" + s.input + "' is not a valid corpus artifact: " + e.what());
    }
    return corpus_from_json(j);
  }
  return ingest(s, nullptr);
}

std::optional<EmbeddingStore> obtain_store(const Settings& s) {
  if (s.embeddings.empty()) return std::nullopt;
  require_file(s.embeddings, "--embeddings");
  return load_embeddings(s.embeddings, embedding_format_from_string(s.format), s.limit);
}

json vocabulary_to_json(const Vocabulary& v) {
  return {{"terms", v.terms()}, {"doc_freq", v.doc_freq}, {"n_docs", v.n_docs}};
}

Vocabulary vocabulary_from_json(const json& j) {
  Vocabulary v;
  const auto terms = j.at("terms").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < terms.size(); ++i) v.term_index[terms[i]] = i;
  v.doc_freq = j.at("doc_freq").get<std::vector<std::size_t>>();
  v.n_docs = j.at("n_docs").get<std::size_t>();
  if (v.doc_freq.size() != terms.size()) throw InputError("vocabulary artifact: length mismatch");
  return v;
}

ExperimentPlan plan_from_settings(const Settings& s) {
  ExperimentPlan plan;
  plan.featurizers.clear();
  for (const auto& f : s.featurizers) plan.featurizers.push_back(featurizer_from_string(f));
  plan.reducers.clear();
  for (const auto& r : s.reducers) plan.reducers.push_back(reducer_from_string(r));
  plan.classifiers.clear();
  for (const auto& c : s.classifiers) plan.classifiers.push_back(classifier_kind_from_string(c));
  plan.reduced_classifiers.clear();
  for (const auto& c : s.reduced_classifiers) plan.reduced_classifiers.push_back(classifier_kind_from_string(c));
  plan.folds = s.folds;
  plan.seed = s.seed;
  plan.target_dim = s.target_dim;
  plan.hyper.knn_k = s.knn_k;
  plan.hyper.c = s.c;
  plan.hyper.max_iter = s.max_iter;
  plan.hyper.svm_sigma = sigma_policy(s.svm_sigma, "--svm-sigma");
  plan.rdc.k = s.rdc_k;
  plan.rdc.s = s.rdc_s;
  plan.mmd = sigma_policy(s.mmd_sigma, "--mmd-sigma");
  plan.validate();
  return plan;
}

// ---- pipeline artifacts ---------------------------------------------------

struct Pipeline {
  std::string method;
  Featurizer featurizer = Featurizer::W2V;
  std::optional<Vocabulary> vocabulary;
  ReducerState reducer;
  TrainedModel model;
};

json pipeline_to_json(const Pipeline& p) {
  json j{{"format_version", 1},
         {"method", p.method},
         {"featurizer", std::string(to_string(p.featurizer))},
         {"reducer", p.reducer.to_json()},
         {"model", to_json(p.model)}};
  if (p.vocabulary) j["vocabulary"] = vocabulary_to_json(*p.vocabulary);
  return j;
}

Pipeline pipeline_from_json(const json& j) {
  if (j.value("format_version", 0) != 1) throw InputError("unsupported model artifact version");
  Pipeline p;
  p.method = j.at("method").get<std::string>();
  p.featurizer = featurizer_from_string(j.at("featurizer").get<std::string>());
  if (j.contains("vocabulary")) p.vocabulary = vocabulary_from_json(j.at("vocabulary"));
  p.reducer = ReducerState::from_json(j.at("reducer"));
  p.model = model_from_json(j.at("model"));
  return p;
}

FeatureMatrix pipeline_features(const Pipeline& p, const LabeledCorpus& corpus, const EmbeddingStore* store,
                                std::map<DocId, std::string>* dropped) {
  switch (p.featurizer) {
    case Featurizer::BOW: return bow_matrix(corpus, *p.vocabulary);
    case Featurizer::TFIDF: return tfidf_matrix(corpus, *p.vocabulary);
    case Featurizer::W2V: {
      if (!store) throw ConfigError("model '" + p.method + "' needs word vectors (--embeddings)");
      auto e = embedding_matrix(corpus, *store);
      if (dropped) *dropped = e.dropped;
      return std::move(e.matrix);
    }
  }
  throw ConfigError("unknown featurizer");
}

// ---- subcommands ----------------------------------------------------------

int cmd_ingest(const Settings& s, std::ostream& out) {
  if (s.out.empty()) throw ConfigError("--out is required");
  json summary;
  const LabeledCorpus corpus = ingest(s, &summary);
  const fs::path dir = s.out;
  write_atomic(dir / "corpus.json", corpus_to_json(corpus).dump(1) + "\n");
  write_atomic(dir / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return 0;
}

int cmd_featurize(const Settings& s, std::ostream& out) {
  if (s.out.empty()) throw ConfigError("--out is required");
  const LabeledCorpus corpus = obtain_corpus(s);
  const Featurizer f = featurizer_from_string(s.featurizer);
  std::optional<EmbeddingStore> store;
  if (f == Featurizer::W2V) store = obtain_store(s);
  const FeatureSet set = featurize_corpus(corpus, f, store ? &*store : nullptr);

  const fs::path dir = s.out;
  fs::create_directories(dir);
  const fs::path csv = dir / "features.csv";
  fs::path tmp = csv;
  tmp += ".tmp";
  write_feature_csv(tmp, set.features, &set.labels);
  fs::rename(tmp, csv);
  if (set.vocabulary) write_atomic(dir / "vocabulary.json", vocabulary_to_json(*set.vocabulary).dump() + "\n");

  json dropped = json::array();
  for (const auto& [id, why] : set.dropped) dropped.push_back({{"doc_id", id}, {"reason", why}});
  json summary{{"featurizer", std::string(to_string(f))},
               {"rows", set.features.rows()},
               {"columns", set.features.cols()},
               {"dropped", dropped}};
  if (store && !store->warnings().empty()) summary["embedding_warnings"] = store->warnings().size();
  write_atomic(dir / "featurize.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return 0;
}

int cmd_select(const Settings& s, std::ostream& out) {
  require_file(s.input, "--input");
  const LabeledFeatures lf = read_feature_csv(s.input, s.label_col);
  if (!lf.labels) throw ConfigError("--label-col: column '" + s.label_col + "' not found in '" + s.input + "'");
  const SelectionMethod m = selection_method_from_string(s.method);
  SelectionResult result;
  if (m == SelectionMethod::GreedyRDC) {
    RdcConfig cfg;
    cfg.k = s.rdc_k;
    cfg.s = s.rdc_s;
    cfg.seed = s.seed;
    result = greedy_select(lf.features.values, *lf.labels, cfg, s.target_dim);
  } else if (m == SelectionMethod::GreedyMMD) {
    result = greedy_select(lf.features.values, *lf.labels, sigma_policy(s.mmd_sigma, "--mmd-sigma"), s.target_dim);
    result.seed = s.seed;
  } else {
    throw ConfigError("--method: select supports rdc and mmd; PCA is a transform, not a selection");
  }
  json j = to_json(result);
  json names = json::array();
  for (std::size_t c : result.selected) names.push_back(lf.features.columns[c].to_string());
  j["selected_columns"] = names;
  emit(s, j.dump(2) + "\n", out);
  return 0;
}

int cmd_run(const Settings& s, std::ostream& out) {
  if (s.out.empty()) throw ConfigError("--out is required");
  const ExperimentPlan plan = plan_from_settings(s);
  const LabeledCorpus corpus = obtain_corpus(s);
  const bool wants_w2v = std::find(plan.featurizers.begin(), plan.featurizers.end(), Featurizer::W2V) !=
                         plan.featurizers.end();
  std::optional<EmbeddingStore> store;
  if (wants_w2v) {
    if (s.embeddings.empty())
      throw ConfigError("W2V features requested but no embeddings were provided (--embeddings)");
    store = obtain_store(s);
  }
  const EmbeddingStore* sp = store ? &*store : nullptr;
  const EvalReport report = run_experiment(corpus, sp, plan);

  const fs::path dir = s.out;
  write_atomic(dir / "report.json", to_json(report).dump(2) + "\n");
  write_atomic(dir / "report.md", report_markdown(report));
  write_atomic(dir / "qualitative.md", qualitative_markdown(report.qualitative, s.qualitative_limit));

  // Final pipelines are refitted on every document for later inspection.
  json index = json::array();
  for (Featurizer f : plan.featurizers) {
    const FeatureSet set = featurize_corpus(corpus, f, sp);
    std::vector<std::size_t> all(static_cast<std::size_t>(set.features.rows()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::map<Reducer, ReducerState> reducers;
    for (const auto& row : report.rows) {
      if (row.featurizer != f) continue;
      auto it = reducers.find(row.reducer);
      if (it == reducers.end()) {
        it = reducers
                 .emplace(row.reducer,
                          fit_reducer(row.reducer, set.features.values, set.labels, all, plan,
                                      derive_seed(plan.seed, "final-reducer",
                                                  {static_cast<std::uint64_t>(f),
                                                   static_cast<std::uint64_t>(row.reducer)})))
                 .first;
        if (it->second.selection)
          write_atomic(dir / "selections" / (slug(std::string(to_string(f)) + "-" +
                                                  std::string(to_string(row.reducer))) + ".json"),
                       to_json(*it->second.selection).dump(2) + "\n");
      }
      Pipeline p;
      p.method = row.method_label();
      p.featurizer = f;
      p.vocabulary = set.vocabulary;
      p.reducer = it->second;
      p.model = fit(row.classifier, p.reducer.transform(set.features.values), set.labels, plan.hyper,
                    derive_seed(plan.seed, "final-classifier", {static_cast<std::uint64_t>(row.classifier)}));
      const std::string file = "models/" + slug(p.method) + ".json";
      write_atomic(dir / file, pipeline_to_json(p).dump() + "\n");
      index.push_back({{"method", p.method}, {"path", file}});
    }
  }
  write_atomic(dir / "models.json", index.dump(2) + "\n");

  out << report_markdown(report);
  return 0;
}

int cmd_inspect(const Settings& s, std::ostream& out) {
  if (s.models.empty()) throw ConfigError("--models is required");
  const LabeledCorpus corpus = obtain_corpus(s);
  std::vector<Pipeline> pipelines;
  bool wants_w2v = false;
  for (const auto& path : s.models) {
    require_file(path, "--models");
    std::ifstream in(path, std::ios::binary);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw InputError("--models: '" + path + "' is not a model artifact: " + e.what());
    }
    pipelines.push_back(pipeline_from_json(j));
    wants_w2v = wants_w2v || pipelines.back().featurizer == Featurizer::W2V;
  }
  std::optional<EmbeddingStore> store;
  if (wants_w2v) store = obtain_store(s);

  LabeledCorpus subset;
  for (DocId id : s.ids) {
    const Document* d = corpus.find(id);
    if (!d) {
      if (auto it = corpus.dropped.find(id); it != corpus.dropped.end())
        throw InputError("document " + std::to_string(id) + " was dropped: " + it->second);
      DocId lo = 0, hi = -1;
      if (!corpus.documents.empty()) {
        lo = hi = corpus.documents.front().id;
        for (const auto& doc : corpus.documents) {
          lo = std::min(lo, doc.id);
          hi = std::max(hi, doc.id);
        }
      }
      throw InputError("unknown document id " + std::to_string(id) + "; valid ids lie in [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "] (" + std::to_string(corpus.documents.size()) +
                       " documents)");
    }
    if (!subset.find(id)) subset.documents.push_back(*d);
  }

  MethodPredictions predictions;
  for (const auto& p : pipelines) {
    std::map<DocId, Category> preds;
    if (!subset.documents.empty()) {
      std::map<DocId, std::string> dropped;
      const FeatureMatrix fm = pipeline_features(p, subset, store ? &*store : nullptr, &dropped);
      if (!dropped.empty())
        throw InputError("document " + std::to_string(dropped.begin()->first) + " has no features for '" +
                         p.method + "': " + dropped.begin()->second);
      const std::vector<int> y = predict(p.model, p.reducer.transform(fm.values));
      for (std::size_t i = 0; i < y.size(); ++i) preds[fm.doc_ids[i]] = category_from_code(y[i]);
    }
    predictions.emplace_back(p.method, std::move(preds));
  }
  const QualitativeReport report = qualitative_report(subset, predictions);
  emit(s, qualitative_markdown(report), out);
  return 0;
}

Matrix read_matrix(const std::string& path, const char* flag) {
  require_file(path, flag);
  return read_feature_csv(path, "").features.values;
}

int cmd_stat(const Settings& s, std::ostream& out) {
  const Matrix x = read_matrix(s.x, "--x");
  const Matrix y = read_matrix(s.y, "--y");
  json j;
  if (s.stat == "rdc") {
    if (x.rows() != y.rows()) throw InputError("rdc needs paired samples: --x and --y row counts differ");
    RdcConfig cfg;
    cfg.k = s.rdc_k;
    cfg.s = s.rdc_s;
    cfg.seed = s.seed;
    j = {{"statistic", "rdc"}, {"value", rdc(x, y, cfg)}, {"k", cfg.k}, {"s", cfg.s},
         {"ridge", cfg.ridge}, {"seed", cfg.seed}, {"n", x.rows()}};
  } else if (s.stat == "mmd") {
    MmdConfig cfg = sigma_policy(s.mmd_sigma, "--mmd-sigma");
    const double sigma = cfg.policy == MmdConfig::Sigma::Fixed ? cfg.sigma : median_heuristic_sigma(pool_rows(x, y));
    j = {{"statistic", "mmd"}, {"value", mmd(x, y, MmdConfig::fixed(sigma))}, {"sigma", sigma},
         {"sigma_policy", cfg.policy == MmdConfig::Sigma::Fixed ? "fixed" : "median"},
         {"n_x", x.rows()}, {"n_y", y.rows()}};
  } else {
    throw ConfigError("--stat must be rdc or mmd, got '" + s.stat + "'");
  }
  emit(s, j.dump(2) + "\n", out);
  return 0;
}

int cmd_bench(const Settings& s, std::ostream& out) {
  if (s.repeats < 3) throw ConfigError("--repeats must be at least 3");
  using clock = std::chrono::steady_clock;
  json scaling = json::array();
  std::vector<double> medians;
  for (std::size_t n = s.n; n <= 4 * s.n; n *= 2) {
    Engine rng = make_engine(derive_seed(s.seed, "bench-rdc", {n}));
    std::normal_distribution<double> normal;
    Matrix a(static_cast<Eigen::Index>(n), 1), b(static_cast<Eigen::Index>(n), 1);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      a(i, 0) = normal(rng);
      b(i, 0) = a(i, 0) * a(i, 0) + normal(rng);
    }
    std::vector<double> times;
    RdcConfig cfg;
    cfg.seed = s.seed;
    for (int r = 0; r < s.repeats; ++r) {
      const auto t0 = clock::now();
      volatile double v = rdc(a, b, cfg);
      (void)v;
      times.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    medians.push_back(median_in_place(times));
    scaling.push_back({{"n", n}, {"median_seconds", medians.back()}});
  }

  const auto data = synthetic::gaussian_blobs(1000, 300, 3, 4.0, derive_seed(s.seed, "bench-svm"));
  const auto test = synthetic::gaussian_blobs(1000, 300, 3, 4.0, derive_seed(s.seed, "bench-svm-test"));
  HyperParams hp;
  const TrainedModel full = fit(ClassifierKind::GSVM, data.x, data.labels, hp);
  const TrainedModel reduced = fit(ClassifierKind::GSVM, data.x.leftCols(20), data.labels, hp);
  const LatencyStats l300 = predict_latency(full, test.x, s.repeats);
  const LatencyStats l20 = predict_latency(reduced, test.x.leftCols(20), s.repeats);

  json j{{"rdc_scaling", scaling},
         {"gsvm_latency", {{"dims_300_seconds", l300.median}, {"dims_20_seconds", l20.median},
                           {"speedup", l20.median > 0 ? l300.median / l20.median : 0.0}}}};
  emit(s, j.dump(2) + "\n", out);
  return 0;
}

// ---- option wiring --------------------------------------------------------

void corpus_options(CLI::App* app, Settings& s) {
  app->add_option("--input", s.input, "Raw CSV, or corpus.json written by ingest");
  app->add_option("--text-col", s.text_col, "Name of the free-text column")->capture_default_str();
  app->add_option("--score-col", s.score_col, "Name of the 1-5 rating column")->capture_default_str();
  app->add_option("--stopwords", s.stopwords, "Stopword list, one word per line (default: shipped English list)");
  app->add_flag("--strip-digits", s.strip_digits, "Remove decimal digits during preprocessing");
}

void embedding_options(CLI::App* app, Settings& s) {
  app->add_option("--embeddings", s.embeddings, "Word-vector file");
  app->add_option("--format", s.format, "Word-vector file format")
      ->check(CLI::IsMember({"text", "binary"}))
      ->capture_default_str();
  app->add_option("--limit", s.limit, "Read at most this many vectors (0 = all)")->capture_default_str();
}

void common_options(CLI::App* app, Settings& s) {
  app->add_option("--config", s.config, "JSON file of flat keys; command-line flags take precedence");
  app->add_option("--seed", s.seed, "Seed for every random stream")->capture_default_str();
}

void rdc_options(CLI::App* app, Settings& s) {
  app->add_option("--rdc-k", s.rdc_k, "RDC random projections per side")->capture_default_str();
  app->add_option("--rdc-s", s.rdc_s, "RDC projection weight scale")->capture_default_str();
  app->add_option("--mmd-sigma", s.mmd_sigma, "MMD kernel bandwidth: 'median' or a number")->capture_default_str();
}

/// Fills options the user did not pass on the command line from the
/// --config file. Keys that belong to another subcommand are skipped.
void apply_config(CLI::App& root, CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  require_file(path, "--config");
  std::ifstream in(path, std::ios::binary);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("--config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("--config: top level must be an object of flat keys");
  for (const auto& [key, value] : j.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "config") throw ConfigError("--config: a config file cannot name another config file");
    CLI::Option* opt = sub->get_option_no_throw("--" + name);
    if (!opt) {
      bool known = false;
      for (CLI::App* other : root.get_subcommands({}))
        known = known || other->get_option_no_throw("--" + name) != nullptr;
      if (!known) throw ConfigError("--config: unknown key '" + key + "'");
      continue;
    }
    if (opt->count() > 0) continue;
    std::vector<std::string> inputs;
    auto scalar = [&](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number()) return v.dump();
      throw ConfigError("--config: key '" + key + "' has an unsupported value");
    };
    if (value.is_array())
      for (const auto& v : value) inputs.push_back(scalar(v));
    else
      inputs.push_back(scalar(value));
    try {
      opt->add_result(inputs);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("--config: key '" + key + "': " + e.what());
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Review satisfaction classification with dependence-based feature selection", "depsel"};
  app.require_subcommand(1);

  auto* ingest_cmd = app.add_subcommand("ingest", "Preprocess, collapse and rebalance a review CSV");
  common_options(ingest_cmd, s);
  corpus_options(ingest_cmd, s);
  ingest_cmd->add_option("--out", s.out, "Output directory");

  auto* featurize_cmd = app.add_subcommand("featurize", "Write a BOW, TFIDF or W2V feature CSV");
  common_options(featurize_cmd, s);
  corpus_options(featurize_cmd, s);
  embedding_options(featurize_cmd, s);
  featurize_cmd->add_option("--featurizer", s.featurizer, "BOW, TFIDF or W2V")->capture_default_str();
  featurize_cmd->add_option("--out", s.out, "Output directory");

  auto* select_cmd = app.add_subcommand("select", "Greedy dependence-maximizing feature selection");
  common_options(select_cmd, s);
  select_cmd->add_option("--input", s.input, "Feature CSV with a label column");
  select_cmd->add_option("--label-col", s.label_col, "Label column of the feature CSV")->capture_default_str();
  select_cmd->add_option("--method", s.method, "rdc or mmd")->capture_default_str();
  select_cmd->add_option("--target-dim", s.target_dim, "Number of columns to select")->capture_default_str();
  rdc_options(select_cmd, s);
  select_cmd->add_option("--out", s.out, "Output JSON file (default: stdout)");

  auto* run_cmd = app.add_subcommand("run", "Cross-validated experiment over the plan grid");
  common_options(run_cmd, s);
  corpus_options(run_cmd, s);
  embedding_options(run_cmd, s);
  run_cmd->add_option("--featurizers", s.featurizers, "Comma list of BOW, TFIDF, W2V")->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--reducers", s.reducers, "Comma list of None, PCA, GreedyRDC, GreedyMMD")->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--classifiers", s.classifiers, "Comma list of KNN, GNB, LOGREG, LSVM, GSVM, LDA")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--reduced-classifiers", s.reduced_classifiers, "Classifiers paired with reduced W2V features")
      ->delimiter(',')
      ->capture_default_str();
  run_cmd->add_option("--folds", s.folds, "Cross-validation folds")->capture_default_str();
  run_cmd->add_option("--target-dim", s.target_dim, "Reduced dimensionality")->capture_default_str();
  run_cmd->add_option("--knn-k", s.knn_k, "Neighbours for KNN")->capture_default_str();
  run_cmd->add_option("--c", s.c, "Regularization C for LOGREG and the SVMs")->capture_default_str();
  run_cmd->add_option("--max-iter", s.max_iter, "LOGREG iteration cap")->capture_default_str();
  run_cmd->add_option("--svm-sigma", s.svm_sigma, "G-SVM bandwidth: 'median' or a number")->capture_default_str();
  rdc_options(run_cmd, s);
  run_cmd->add_option("--qualitative-limit", s.qualitative_limit, "Documents in qualitative.md (0 = all)")
      ->capture_default_str();
  run_cmd->add_option("--out", s.out, "Output directory");

  auto* inspect_cmd = app.add_subcommand("inspect", "Per-document agreement table across trained models");
  common_options(inspect_cmd, s);
  corpus_options(inspect_cmd, s);
  embedding_options(inspect_cmd, s);
  inspect_cmd->add_option("--models", s.models, "Model artifacts written by run (models/*.json)")->delimiter(',');
  inspect_cmd->add_option("--ids", s.ids, "Document ids to show")->delimiter(',');
  inspect_cmd->add_option("--out", s.out, "Output markdown file (default: stdout)");

  auto* stat_cmd = app.add_subcommand("stat", "RDC or MMD between two numeric CSV matrices");
  common_options(stat_cmd, s);
  stat_cmd->add_option("--x", s.x, "First matrix CSV");
  stat_cmd->add_option("--y", s.y, "Second matrix CSV");
  stat_cmd->add_option("--stat", s.stat, "rdc or mmd")->capture_default_str();
  rdc_options(stat_cmd, s);
  stat_cmd->add_option("--out", s.out, "Output JSON file (default: stdout)");

  auto* bench_cmd = app.add_subcommand("bench", "RDC scaling and G-SVM latency on synthetic data");
  common_options(bench_cmd, s);
  bench_cmd->add_option("--n", s.n, "Smallest RDC sample size (doubled twice)")->capture_default_str();
  bench_cmd->add_option("--repeats", s.repeats, "Timing repeats (median reported)")->capture_default_str();
  bench_cmd->add_option("--out", s.out, "Output JSON file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    apply_config(app, sub, s.config);
    const std::string name = sub->get_name();
    if (name == "ingest") return cmd_ingest(s, out);
    if (name == "featurize") return cmd_featurize(s, out);
    if (name == "select") return cmd_select(s, out);
    if (name == "run") return cmd_run(s, out);
    if (name == "inspect") return cmd_inspect(s, out);
    if (name == "stat") return cmd_stat(s, out);
    if (name == "bench") return cmd_bench(s, out);
    throw ConfigError("unknown subcommand " + name);
  } catch (const ConfigError& e) {
    err << "depsel: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    err << "depsel: input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "depsel: numeric error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    err << "depsel: input error: malformed JSON artifact: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "depsel: runtime error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace depsel
