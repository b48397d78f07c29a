#include "depsel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "depsel/csv.hpp"
#include "depsel/error.hpp"
#include "depsel/random.hpp"

namespace depsel::synthetic {

Dataset gaussian_blobs(std::size_t n, std::size_t d, int classes, double separation, std::uint64_t seed) {
  if (classes < 2 || d < 2) throw ConfigError("gaussian_blobs needs classes >= 2 and d >= 2");
  Engine rng = make_engine(derive_seed(seed, "blobs"));
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.labels.resize(n);
  // Means on a regular polygon in the first two dimensions; neighbours are
  // `separation` apart (all pairs, for three classes).
  const double pi = 3.14159265358979323846;
  const double radius = separation / (2.0 * std::sin(pi / classes));
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    out.labels[i] = c + 1;
    for (std::size_t j = 0; j < d; ++j) out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = noise(rng);
    const double angle = 2.0 * pi * c / classes;
    out.x(static_cast<Eigen::Index>(i), 0) += radius * std::cos(angle);
    out.x(static_cast<Eigen::Index>(i), 1) += radius * std::sin(angle);
  }
  return out;
}

PlantedDataset planted_features(std::size_t n, std::size_t d, std::size_t informative, double offset,
                                std::uint64_t seed) {
  if (informative > d) throw ConfigError("more informative columns than columns");
  Engine rng = make_engine(derive_seed(seed, "planted"));
  std::vector<std::size_t> cols(d);
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  PlantedDataset out;
  out.informative.assign(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(informative));
  std::sort(out.informative.begin(), out.informative.end());

  std::normal_distribution<double> noise(0.0, 1.0);
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.labels[i] = static_cast<int>(i % 3) + 1;
    for (std::size_t j = 0; j < d; ++j) out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = noise(rng);
    for (std::size_t j : out.informative)
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += (out.labels[i] - 2) * offset;
  }
  return out;
}

namespace {

const std::vector<std::vector<std::string>> kSentiment = {
    {"awful", "boring", "confusing", "useless", "terrible", "disorganized", "unfair", "rude", "pointless", "hated"},
    {"okay", "average", "fine", "acceptable", "mixed", "ordinary", "adequate", "moderate", "passable", "standard"},
    {"great", "excellent", "helpful", "clear", "engaging", "inspiring", "brilliant", "fantastic", "loved", "enjoyable"},
};

const std::vector<std::string> kFiller = {
    "lecture", "course",  "teacher",  "class",   "homework", "exam",   "lab",     "tutor",   "material",
    "slides",  "project", "semester", "reading", "grading",  "office", "hours",   "feedback", "students",
    "topics",  "pace",    "workload", "notes",   "quizzes",  "module", "seminar", "campus",
};

const std::vector<std::string> kGlue = {"the", "was", "and", "very", "really", "a", "is", "of", "this", "to"};

}  // namespace

ReviewCorpus review_corpus(std::size_t n_docs, std::size_t dim, std::uint64_t seed) {
  if (dim < 3) throw ConfigError("review_corpus needs dim >= 3");
  Engine rng = make_engine(derive_seed(seed, "review-corpus"));
  std::normal_distribution<double> normal(0.0, 1.0);

  ReviewCorpus out{std::string(), EmbeddingStore(dim)};
  std::vector<double> v(dim);
  auto add_word = [&](const std::string& word, int direction) {
    for (double& x : v) x = normal(rng) * 0.5;
    if (direction >= 0) v[static_cast<std::size_t>(direction)] += 3.0;
    out.store.insert(word, v);
  };
  for (int c = 0; c < 3; ++c)
    for (const auto& w : kSentiment[static_cast<std::size_t>(c)]) add_word(w, c);
  for (const auto& w : kFiller) add_word(w, -1);
  for (const auto& w : kGlue) add_word(w, -1);
  // Capitalised key exercises the case-folded lookup.
  add_word("Professor", -1);

  std::ostringstream rows;
  rows << "comment,rating\n";
  std::discrete_distribution<int> class_dist({1.0, 1.0, 2.0});
  std::uniform_int_distribution<std::size_t> pick_len(3, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n_docs; ++i) {
    const int c = class_dist(rng);
    int rating = c == 0 ? 1 + static_cast<int>(unit(rng) < 0.5) : (c == 1 ? 3 : 4 + static_cast<int>(unit(rng) < 0.5));
    std::vector<std::string> words;
    const std::size_t len = pick_len(rng);
    for (std::size_t t = 0; t < len; ++t) {
      const double r = unit(rng);
      if (r < 0.3) {
        // mostly on-class sentiment, occasionally another class
        const int sc = unit(rng) < 0.8 ? c : static_cast<int>(unit(rng) * 3.0) % 3;
        const auto& pool = kSentiment[static_cast<std::size_t>(sc)];
        words.push_back(pool[static_cast<std::size_t>(unit(rng) * static_cast<double>(pool.size())) % pool.size()]);
      } else if (r < 0.75) {
        words.push_back(kFiller[static_cast<std::size_t>(unit(rng) * static_cast<double>(kFiller.size())) % kFiller.size()]);
      } else if (r < 0.95) {
        words.push_back(kGlue[static_cast<std::size_t>(unit(rng) * static_cast<double>(kGlue.size())) % kGlue.size()]);
      } else {
        words.push_back("Professor");
      }
    }
    std::string text;
    for (std::size_t t = 0; t < words.size(); ++t) {
      if (t) text += t % 4 == 0 ? ", " : " ";
      text += words[t];
    }
    if (i % 7 == 0) text += "!";
    if (i % 11 == 0) text = "\"" + text + "\" she said";
    rows << csv::format_row({text, std::to_string(rating)}) << "\n";
  }
  out.csv = rows.str();
  return out;
}

void write_text_embeddings(const std::string& path, const EmbeddingStore& store) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  os << store.vocab_size() << ' ' << store.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < store.vocab_size(); ++i) {
    os << store.words()[i];
    for (double x : store.vector_at(i)) {
      std::snprintf(buf, sizeof buf, " %.17g", x);
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw InputError("failed writing '" + path + "'");
}

}  // namespace depsel::synthetic
