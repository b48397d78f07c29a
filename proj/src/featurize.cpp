#include "depsel/featurize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_map>

#include "depsel/csv.hpp"
#include "depsel/error.hpp"

namespace depsel {

std::vector<std::string> Vocabulary::terms() const {
  std::vector<std::string> out(term_index.size());
  for (const auto& [term, idx] : term_index) out[idx] = term;
  return out;
}

std::string ColumnTag::to_string() const {
  switch (kind) {
    case Kind::Term: return "term:" + term;
    case Kind::EmbeddingDim: return "dim:" + std::to_string(index);
    case Kind::Component: return "pc:" + std::to_string(index);
    case Kind::Column: return "col:" + std::to_string(index);
  }
  return {};
}

ColumnTag ColumnTag::parse(const std::string& tag) {
  auto numeric = [&](std::size_t prefix) -> std::size_t {
    const std::string digits = tag.substr(prefix);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("bad column tag '" + tag + "'");
    return std::stoull(digits);
  };
  if (tag.rfind("term:", 0) == 0) return for_term(tag.substr(5));
  if (tag.rfind("dim:", 0) == 0) return for_dim(numeric(4));
  if (tag.rfind("pc:", 0) == 0) return for_component(numeric(3));
  if (tag.rfind("col:", 0) == 0) return {Kind::Column, {}, numeric(4)};
  // Foreign CSV headers are kept verbatim as terms.
  return for_term(tag);
}

Vocabulary build_vocabulary(const LabeledCorpus& corpus) {
  if (corpus.documents.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus.documents) {
    const std::set<std::string> distinct(doc.tokens.begin(), doc.tokens.end());
    for (const auto& t : distinct) ++df[t];
  }
  Vocabulary vocab;
  vocab.n_docs = corpus.documents.size();
  vocab.doc_freq.reserve(df.size());
  for (const auto& [term, count] : df) {
    vocab.term_index.emplace(term, vocab.doc_freq.size());
    vocab.doc_freq.push_back(count);
  }
  return vocab;
}

namespace {

FeatureMatrix term_frame(const LabeledCorpus& corpus, const Vocabulary& vocab) {
  FeatureMatrix fm;
  fm.values = Matrix::Zero(static_cast<Eigen::Index>(corpus.documents.size()),
                           static_cast<Eigen::Index>(vocab.size()));
  fm.columns.reserve(vocab.size());
  for (auto& term : vocab.terms()) fm.columns.push_back(ColumnTag::for_term(std::move(term)));
  fm.doc_ids.reserve(corpus.documents.size());
  for (std::size_t r = 0; r < corpus.documents.size(); ++r) {
    const auto& doc = corpus.documents[r];
    fm.doc_ids.push_back(doc.id);
    for (const auto& t : doc.tokens)
      if (auto it = vocab.term_index.find(t); it != vocab.term_index.end())
        fm.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(it->second)) += 1.0;
  }
  return fm;
}

}  // namespace

FeatureMatrix bow_matrix(const LabeledCorpus& corpus, const Vocabulary& vocab) {
  return term_frame(corpus, vocab);
}

FeatureMatrix tfidf_matrix(const LabeledCorpus& corpus, const Vocabulary& vocab) {
  FeatureMatrix fm = term_frame(corpus, vocab);
  const double n = static_cast<double>(vocab.n_docs);
  for (std::size_t x = 0; x < vocab.size(); ++x) {
    const double idf = std::log(n / static_cast<double>(vocab.doc_freq[x]));
    fm.values.col(static_cast<Eigen::Index>(x)) *= idf;
  }
  return fm;
}

EmbeddingFeatures embedding_matrix(const LabeledCorpus& corpus, const EmbeddingStore& store,
                                   bool fold_case) {
  const std::size_t dim = store.dim();
  EmbeddingFeatures out;
  std::vector<Vector> rows;
  rows.reserve(corpus.documents.size());
  Vector mean(static_cast<Eigen::Index>(dim));
  for (const auto& doc : corpus.documents) {
    mean.setZero();
    std::size_t found = 0;
    for (const auto& t : doc.tokens) {
      auto v = fold_case ? store.lookup_folded(t) : store.lookup(t);
      if (!v) continue;
      mean += Eigen::Map<const Vector>(v->data(), static_cast<Eigen::Index>(dim));
      ++found;
    }
    if (found == 0) {
      out.dropped.emplace(doc.id, "no token found in the embedding vocabulary");
      continue;
    }
    mean /= static_cast<double>(found);
    const double norm = mean.norm();
    if (!(norm > 0.0)) {
      out.dropped.emplace(doc.id, "mean word vector is zero and cannot be normalized");
      continue;
    }
    rows.push_back(mean / norm);
    out.matrix.doc_ids.push_back(doc.id);
  }
  out.matrix.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.matrix.values.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  out.matrix.columns.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) out.matrix.columns.push_back(ColumnTag::for_dim(j));
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& features,
                       const std::vector<int>* labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  csv::Row header{"doc_id"};
  if (labels) header.push_back("label");
  for (const auto& c : features.columns) header.push_back(c.to_string());
  out << csv::format_row(header) << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    out << features.doc_ids[static_cast<std::size_t>(r)];
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", features.values(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("error writing '" + path.string() + "'");
}

LabeledFeatures read_feature_csv(std::istream& in, const std::string& label_column) {
  const csv::Table table = csv::parse(in);
  std::optional<std::size_t> id_col, label_col;
  std::vector<std::size_t> feature_cols;
  LabeledFeatures out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == "doc_id")
      id_col = i;
    else if (!label_column.empty() && table.header[i] == label_column)
      label_col = i;
    else {
      feature_cols.push_back(i);
      out.features.columns.push_back(ColumnTag::parse(table.header[i]));
    }
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  out.features.values.resize(n, static_cast<Eigen::Index>(feature_cols.size()));
  if (label_col) out.labels.emplace();
  auto number = [&](const std::string& s, std::size_t r) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
      throw InputError("feature CSV row " + std::to_string(r + 1) + ": bad number '" + s + "'");
    return v;
  };
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw InputError("feature CSV row " + std::to_string(r + 1) + ": wrong field count");
    out.features.doc_ids.push_back(id_col ? static_cast<DocId>(number(row[*id_col], r))
                                          : static_cast<DocId>(r));
    if (label_col) out.labels->push_back(static_cast<int>(number(row[*label_col], r)));
    for (std::size_t j = 0; j < feature_cols.size(); ++j)
      out.features.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
          number(row[feature_cols[j]], r);
  }
  return out;
}

LabeledFeatures read_feature_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open feature CSV '" + path.string() + "'");
  return read_feature_csv(in, label_column);
}

}  // namespace depsel
