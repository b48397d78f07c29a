#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "depsel/classify.hpp"
#include "depsel/corpus.hpp"
#include "depsel/depmeasure.hpp"
#include "depsel/embeddings.hpp"
#include "depsel/featsel.hpp"
#include "depsel/featurize.hpp"
#include "json.hpp"

namespace depsel {

enum class Featurizer { BOW, TFIDF, W2V };
enum class Reducer { None, PCA, GreedyRDC, GreedyMMD };

std::string_view to_string(Featurizer f);
std::string_view to_string(Reducer r);
/// Short label used in tables: PCA, RDC, MMD.
std::string_view display_name(Reducer r);
Featurizer featurizer_from_string(std::string_view name);
Reducer reducer_from_string(std::string_view name);

struct ExperimentPlan {
  std::vector<Featurizer> featurizers{Featurizer::BOW, Featurizer::TFIDF, Featurizer::W2V};
  std::vector<Reducer> reducers{Reducer::None, Reducer::PCA, Reducer::GreedyRDC, Reducer::GreedyMMD};
  std::vector<ClassifierKind> classifiers{std::begin(kAllClassifiers), std::end(kAllClassifiers)};
  /// Classifiers paired with the PCA / greedy reducers.
  std::vector<ClassifierKind> reduced_classifiers{ClassifierKind::GSVM};
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  std::size_t target_dim = 20;
  HyperParams hyper;
  RdcConfig rdc;    ///< seed is overridden per fold
  MmdConfig mmd;

  void validate() const;
};

nlohmann::json to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Class-stratified k-fold partition. Each class is shuffled and dealt
/// round-robin over the folds, continuing from where the previous class
/// stopped so fold sizes differ by at most one.
std::vector<Fold> stratified_folds(std::span<const int> labels, std::size_t folds, std::uint64_t seed);

/// Fitted dimensionality reduction (identity for Reducer::None).
struct ReducerState {
  Reducer kind = Reducer::None;
  std::optional<SelectionResult> selection;
  std::optional<PcaModel> pca;

  Matrix transform(const Matrix& x) const;
  nlohmann::json to_json() const;
  static ReducerState from_json(const nlohmann::json& j);
};

/// Fits a reducer reading only `train_rows` of x and labels.
ReducerState fit_reducer(Reducer kind, const Matrix& x, std::span<const int> labels,
                         std::span<const std::size_t> train_rows, const ExperimentPlan& plan,
                         std::uint64_t seed);

struct EvalRow {
  Featurizer featurizer = Featurizer::W2V;
  Reducer reducer = Reducer::None;
  ClassifierKind classifier = ClassifierKind::GSVM;
  std::vector<double> fold_accuracies;  ///< percent
  double mean_accuracy = 0.0;           ///< percent
  std::array<std::array<std::size_t, 3>, 3> confusion{};  ///< [true][predicted], summed over folds
  double reducer_seconds = 0.0;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  /// Out-of-fold prediction of every document.
  std::map<DocId, Category> predictions;

  std::string method_label() const;  ///< e.g. "W2V + PCA + G-SVM"
};

struct QualitativeRow {
  DocId id = 0;
  std::string raw_text;
  Category truth = Category::Neutral;
  std::vector<Category> predicted;  ///< one per method
  std::vector<bool> correct;
};

struct QualitativeReport {
  std::vector<std::string> methods;
  std::vector<QualitativeRow> rows;
};

struct EvalReport {
  ExperimentPlan plan;
  std::vector<EvalRow> rows;
  QualitativeReport qualitative;
  /// Documents each featurizer could not represent.
  std::map<std::string, std::map<DocId, std::string>> dropped;
};

/// Per-method held-out predictions for the same document set.
using MethodPredictions = std::vector<std::pair<std::string, std::map<DocId, Category>>>;

/// Per-document agreement table across methods.
QualitativeReport qualitative_report(const LabeledCorpus& corpus, const MethodPredictions& predictions);

/// Features and labels of one featurizer; rows align with the corpus
/// documents that survive featurization.
struct FeatureSet {
  FeatureMatrix features;
  std::vector<int> labels;  ///< class codes 1..3
  std::map<DocId, std::string> dropped;
  std::optional<Vocabulary> vocabulary;
};

FeatureSet featurize_corpus(const LabeledCorpus& corpus, Featurizer featurizer,
                            const EmbeddingStore* store);

/// Cross-validated evaluation of every (featurizer, reducer, classifier)
/// combination of the plan. PCA and greedy reducers apply to W2V features
/// only; BOW and TF-IDF always run un-reduced.
EvalReport run_experiment(const LabeledCorpus& corpus, const EmbeddingStore* store,
                          const ExperimentPlan& plan);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const QualitativeReport& report);
/// Accuracy tables: one with BOW / TF-IDF columns, one for W2V methods.
std::string report_markdown(const EvalReport& report);
/// One small table per document: marks, predicted labels, then the text.
std::string qualitative_markdown(const QualitativeReport& report, std::size_t limit = 0);

}  // namespace depsel
