#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace depsel {

/// Collapsed three-level satisfaction label. Ordered Disagree < Neutral < Agree.
enum class Category : int { Disagree = 0, Neutral = 1, Agree = 2 };

inline constexpr std::array<Category, 3> kCategories = {Category::Disagree, Category::Neutral,
                                                        Category::Agree};

std::string_view to_string(Category c);
/// Short form used in qualitative tables: Neg / Neu / Pos.
std::string_view short_name(Category c);
Category category_from_string(std::string_view name);
/// 1-based numeric class code (1, 2, 3), used when a label must be a number.
inline int class_code(Category c) { return static_cast<int>(c) + 1; }
Category category_from_code(int code);

/// Maps a 1..5 rating onto a category: {1,2} Disagree, {3} Neutral, {4,5} Agree.
Category category_for_score(int raw_score);

using DocId = std::int64_t;

struct Document {
  DocId id = 0;
  std::string raw_text;
  std::vector<std::string> tokens;
  int raw_score = 0;
  Category category = Category::Neutral;
};

using StopwordSet = std::unordered_set<std::string>;

struct LabeledCorpus {
  std::vector<Document> documents;
  StopwordSet stopword_set;
  bool balanced = false;
  /// Documents removed by a pipeline step, with the reason.
  std::map<DocId, std::string> dropped;

  std::array<std::size_t, 3> class_counts() const;
  const Document* find(DocId id) const;
};

/// Reads a UTF-8 CSV; one document per data row, ids are 0-based row indices.
/// Scores must be integers in [1,5]; a bad score is reported with its
/// 1-based data row number.
LabeledCorpus load_csv(const std::filesystem::path& path, const std::string& text_column,
                       const std::string& score_column);
LabeledCorpus load_csv(std::istream& in, const std::string& text_column,
                       const std::string& score_column);

/// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);
/// The shipped English list.
const StopwordSet& default_stopwords();

struct PreprocessOptions {
  bool strip_digits = false;
};

/// Lowercase, strip P*/S* code points, split on white space, drop stopwords.
std::vector<std::string> tokenize(std::string_view raw_text, const StopwordSet& stopwords,
                                  const PreprocessOptions& options = {});

/// Tokenizes every document from its raw text. Documents left with no tokens
/// are dropped and recorded in `dropped`.
LabeledCorpus preprocess(const LabeledCorpus& corpus, const StopwordSet& stopwords,
                         const PreprocessOptions& options = {});

LabeledCorpus collapse_scores(const LabeledCorpus& corpus);

/// Downsamples every category to the smallest category count and shuffles
/// the survivors. Deterministic in seed.
LabeledCorpus rebalance(const LabeledCorpus& corpus, std::uint64_t seed);

}  // namespace depsel
