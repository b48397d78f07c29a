#include "depsel/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include "depsel/csv.hpp"
#include "depsel/error.hpp"
#include "depsel/random.hpp"
#include "depsel/text.hpp"

namespace depsel {

namespace {

// Same content as data/stopwords_en.txt.
constexpr const char* kEnglishStopwords[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
    "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
    "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
    "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
    "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by", "for",
    "with", "about", "against", "between", "into", "through", "during", "before", "after",
    "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
    "again", "further", "then", "once", "here", "there", "when", "where", "why", "how", "all",
    "any", "both", "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not",
    "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
    "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren", "couldn", "didn",
    "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn", "needn", "shan",
    "shouldn", "wasn", "weren", "won", "wouldn",
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Disagree: return "Disagree";
    case Category::Neutral: return "Neutral";
    case Category::Agree: return "Agree";
  }
  return "?";
}

std::string_view short_name(Category c) {
  switch (c) {
    case Category::Disagree: return "Neg";
    case Category::Neutral: return "Neu";
    case Category::Agree: return "Pos";
  }
  return "?";
}

Category category_from_string(std::string_view name) {
  for (Category c : kCategories)
    if (to_string(c) == name) return c;
  throw InputError("unknown category '" + std::string(name) + "'");
}

Category category_from_code(int code) {
  if (code < 1 || code > 3) throw InputError("category code must be 1, 2 or 3");
  return static_cast<Category>(code - 1);
}

Category category_for_score(int raw_score) {
  if (raw_score < 1 || raw_score > 5)
    throw InputError("score " + std::to_string(raw_score) + " outside [1,5]");
  if (raw_score <= 2) return Category::Disagree;
  if (raw_score == 3) return Category::Neutral;
  return Category::Agree;
}

std::array<std::size_t, 3> LabeledCorpus::class_counts() const {
  std::array<std::size_t, 3> counts{};
  for (const auto& d : documents) ++counts[static_cast<int>(d.category)];
  return counts;
}

const Document* LabeledCorpus::find(DocId id) const {
  for (const auto& d : documents)
    if (d.id == id) return &d;
  return nullptr;
}

LabeledCorpus load_csv(std::istream& in, const std::string& text_column,
                       const std::string& score_column) {
  const csv::Table table = csv::parse(in);
  const std::size_t text_idx = table.column(text_column);
  const std::size_t score_idx = table.column(score_column);

  LabeledCorpus corpus;
  corpus.documents.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "row " + std::to_string(r + 1) + " (line " +
                              std::to_string(table.row_lines[r]) + ")";
    if (row.size() != table.header.size())
      throw InputError(where + ": expected " + std::to_string(table.header.size()) +
                       " fields, found " + std::to_string(row.size()));
    const std::string score_text = trim(row[score_idx]);
    int score = 0;
    const auto [end, ec] =
        std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (ec != std::errc() || end != score_text.data() + score_text.size() || score_text.empty())
      throw InputError(where + ": score '" + score_text + "' is not an integer");
    if (score < 1 || score > 5)
      throw InputError(where + ": score " + std::to_string(score) + " outside [1,5]");

    Document doc;
    doc.id = static_cast<DocId>(r);
    doc.raw_text = row[text_idx];
    doc.raw_score = score;
    doc.category = category_for_score(score);
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

LabeledCorpus load_csv(const std::filesystem::path& path, const std::string& text_column,
                       const std::string& score_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open corpus CSV '" + path.string() + "'");
  return load_csv(in, text_column, score_column);
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stopword file '" + path.string() + "'");
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(std::move(w));
  }
  return words;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words(std::begin(kEnglishStopwords), std::end(kEnglishStopwords));
  return words;
}

std::vector<std::string> tokenize(std::string_view raw_text, const StopwordSet& stopwords,
                                  const PreprocessOptions& options) {
  const std::string cleaned = text::strip_punctuation(text::to_lower(raw_text), options.strip_digits);
  std::vector<std::string> tokens = text::split_whitespace(cleaned);
  std::erase_if(tokens, [&](const std::string& t) { return stopwords.contains(t); });
  return tokens;
}

LabeledCorpus preprocess(const LabeledCorpus& corpus, const StopwordSet& stopwords,
                         const PreprocessOptions& options) {
  LabeledCorpus out;
  out.stopword_set = stopwords;
  out.balanced = corpus.balanced;
  out.dropped = corpus.dropped;
  out.documents.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    Document d = doc;
    d.tokens = tokenize(doc.raw_text, stopwords, options);
    if (d.tokens.empty()) {
      out.dropped.emplace(d.id, "no tokens left after preprocessing");
      continue;
    }
    out.documents.push_back(std::move(d));
  }
  if (out.balanced) {
    const auto counts = out.class_counts();
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    out.balanced = *hi - *lo <= 1;
  }
  return out;
}

LabeledCorpus collapse_scores(const LabeledCorpus& corpus) {
  LabeledCorpus out = corpus;
  for (auto& d : out.documents) d.category = category_for_score(d.raw_score);
  return out;
}

LabeledCorpus rebalance(const LabeledCorpus& corpus, std::uint64_t seed) {
  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    members[static_cast<int>(corpus.documents[i].category)].push_back(i);
  for (Category c : kCategories)
    if (members[static_cast<int>(c)].empty())
      throw InputError("cannot rebalance: category " + std::string(to_string(c)) +
                       " has no documents");

  std::size_t keep = members[0].size();
  for (const auto& m : members) keep = std::min(keep, m.size());

  std::vector<std::size_t> survivors;
  survivors.reserve(3 * keep);
  for (Category c : kCategories) {
    auto& m = members[static_cast<int>(c)];
    Engine rng = make_engine(derive_seed(seed, "rebalance", {static_cast<std::uint64_t>(c)}));
    std::shuffle(m.begin(), m.end(), rng);
    survivors.insert(survivors.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  // Canonical order before the final shuffle so the result depends only on the seed
  // and the membership, not on the per-class shuffles above.
  std::sort(survivors.begin(), survivors.end());
  Engine order_rng = make_engine(derive_seed(seed, "rebalance-order"));
  std::shuffle(survivors.begin(), survivors.end(), order_rng);

  LabeledCorpus out;
  out.stopword_set = corpus.stopword_set;
  out.dropped = corpus.dropped;
  std::vector<bool> kept(corpus.documents.size(), false);
  for (std::size_t i : survivors) {
    out.documents.push_back(corpus.documents[i]);
    kept[i] = true;
  }
  for (std::size_t i = 0; i < corpus.documents.size(); ++i)
    if (!kept[i]) out.dropped.emplace(corpus.documents[i].id, "removed by class rebalancing");
  out.balanced = true;
  return out;
}

}  // namespace depsel
