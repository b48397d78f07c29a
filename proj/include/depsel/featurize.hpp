#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depsel/corpus.hpp"
#include "depsel/embeddings.hpp"

namespace depsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Vocabulary {
  /// term -> column, dense and in lexicographic (byte) order of the terms.
  std::map<std::string, std::size_t> term_index;
  /// df per column: number of distinct documents containing the term.
  std::vector<std::size_t> doc_freq;
  std::size_t n_docs = 0;

  std::size_t size() const { return doc_freq.size(); }
  /// Terms in column order.
  std::vector<std::string> terms() const;
};

/// What a feature column represents.
struct ColumnTag {
  enum class Kind { Term, EmbeddingDim, Component, Column };
  Kind kind = Kind::Column;
  std::string term;
  std::size_t index = 0;

  static ColumnTag for_term(std::string t) { return {Kind::Term, std::move(t), 0}; }
  static ColumnTag for_dim(std::size_t i) { return {Kind::EmbeddingDim, {}, i}; }
  static ColumnTag for_component(std::size_t i) { return {Kind::Component, {}, i}; }

  /// "term:<word>", "dim:<i>", "pc:<i>" or "col:<i>".
  std::string to_string() const;
  static ColumnTag parse(const std::string& tag);
  bool operator==(const ColumnTag&) const = default;
};

struct FeatureMatrix {
  Matrix values;  // n x d
  std::vector<ColumnTag> columns;
  std::vector<DocId> doc_ids;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

Vocabulary build_vocabulary(const LabeledCorpus& corpus);

/// Raw term counts; tokens missing from the vocabulary are ignored.
FeatureMatrix bow_matrix(const LabeledCorpus& corpus, const Vocabulary& vocab);

/// tf * ln(N / df) with tf the raw in-document count.
FeatureMatrix tfidf_matrix(const LabeledCorpus& corpus, const Vocabulary& vocab);

struct EmbeddingFeatures {
  FeatureMatrix matrix;
  /// Documents with no usable in-vocabulary token, with the reason.
  std::map<DocId, std::string> dropped;
};

/// Mean of the in-vocabulary token vectors of each document, scaled to unit
/// Euclidean norm. Out-of-vocabulary tokens are skipped; with `fold_case`
/// lookups fall back to a case-insensitive match.
EmbeddingFeatures embedding_matrix(const LabeledCorpus& corpus, const EmbeddingStore& store,
                                   bool fold_case = true);

/// CSV artifact: header "doc_id[,label],<tags...>", one row per document.
/// Values are written with 17 significant digits so they read back exactly.
void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& features,
                       const std::vector<int>* labels = nullptr);

struct LabeledFeatures {
  FeatureMatrix features;
  std::optional<std::vector<int>> labels;
};

/// Reads a numeric CSV. `doc_id` and `label_column` (if present) are taken
/// out; every other column must be numeric and becomes a feature.
LabeledFeatures read_feature_csv(const std::filesystem::path& path,
                                 const std::string& label_column = "label");
LabeledFeatures read_feature_csv(std::istream& in, const std::string& label_column = "label");

}  // namespace depsel
