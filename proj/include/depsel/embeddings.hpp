#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace depsel {

enum class EmbeddingFormat { Text, Binary };

EmbeddingFormat embedding_format_from_string(std::string_view name);

/// Immutable word -> vector table. Vectors are stored in double precision,
/// contiguous, in file order.
class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim);

  /// Adds or replaces a word. Returns false if the word already existed.
  bool insert(std::string word, std::span<const double> vector);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  std::span<const double> vector_at(std::size_t index) const;

  /// Exact, case-sensitive match.
  std::optional<std::span<const double>> lookup(std::string_view word) const;
  /// Exact match, then the first stored word whose lowercase form equals
  /// the lowercased query.
  std::optional<std::span<const double>> lookup_folded(std::string_view word) const;

  /// Messages produced while loading (duplicate words and the like).
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string message) { warnings_.push_back(std::move(message)); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> folded_index_;
  std::vector<std::string> warnings_;
};

/// "word v1 ... v_dim" per line, optional "vocab_size dim" header line.
/// limit > 0 stops after that many vectors.
EmbeddingStore load_text_format(const std::filesystem::path& path, std::size_t limit = 0);

/// word2vec binary: ASCII "vocab_size dim\n", then per record the word,
/// a space, dim little-endian float32 values and an optional newline.
EmbeddingStore load_binary_format(const std::filesystem::path& path, std::size_t limit = 0);

EmbeddingStore load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               std::size_t limit = 0);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Words closest (cosine) to V(b) - V(a) + V(c), excluding a, b and c,
/// best first. "a is to b as c is to ?".
std::vector<std::pair<std::string, double>> analogy(const EmbeddingStore& store,
                                                    std::string_view a, std::string_view b,
                                                    std::string_view c, std::size_t top_n);

}  // namespace depsel
