#include "depsel/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "depsel/error.hpp"
#include "depsel/text.hpp"

namespace depsel {

EmbeddingFormat embedding_format_from_string(std::string_view name) {
  if (name == "text") return EmbeddingFormat::Text;
  if (name == "binary") return EmbeddingFormat::Binary;
  throw ConfigError("unknown embedding format '" + std::string(name) +
                    "' (expected text or binary)");
}

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {}

bool EmbeddingStore::insert(std::string word, std::span<const double> vector) {
  if (vector.size() != dim_)
    throw InputError("vector for '" + word + "' has " + std::to_string(vector.size()) +
                     " entries, expected " + std::to_string(dim_));
  for (double v : vector)
    if (!std::isfinite(v)) throw InputError("non-finite value in vector for '" + word + "'");

  if (auto it = index_.find(word); it != index_.end()) {
    std::copy(vector.begin(), vector.end(), values_.begin() + it->second * dim_);
    return false;
  }
  const std::size_t idx = words_.size();
  index_.emplace(word, idx);
  folded_index_.try_emplace(text::to_lower(word), idx);
  words_.push_back(std::move(word));
  values_.insert(values_.end(), vector.begin(), vector.end());
  return true;
}

std::span<const double> EmbeddingStore::vector_at(std::size_t index) const {
  return {values_.data() + index * dim_, dim_};
}

std::optional<std::span<const double>> EmbeddingStore::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return vector_at(it->second);
}

std::optional<std::span<const double>> EmbeddingStore::lookup_folded(std::string_view word) const {
  if (auto exact = lookup(word)) return exact;
  auto it = folded_index_.find(text::to_lower(word));
  if (it == folded_index_.end()) return std::nullopt;
  return vector_at(it->second);
}

namespace {

bool parse_size(const std::string& s, std::size_t& out) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
  out = std::stoull(s);
  return true;
}

std::vector<std::string> split_spaces(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> parts;
  std::string p;
  while (ss >> p) parts.push_back(std::move(p));
  return parts;
}

void note_duplicate(EmbeddingStore& store, const std::string& word, const std::string& where) {
  store.add_warning("duplicate word '" + word + "' at " + where + "; last occurrence wins");
}

}  // namespace

EmbeddingStore load_text_format(const std::filesystem::path& path, std::size_t limit) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding file '" + path.string() + "'");

  EmbeddingStore store;
  std::size_t declared_dim = 0;
  bool have_dim = false;
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto parts = split_spaces(line);
    if (parts.empty()) continue;

    std::size_t a = 0, b = 0;
    if (line_no == 1 && parts.size() == 2 && parse_size(parts[0], a) && parse_size(parts[1], b)) {
      declared_dim = b;
      continue;
    }
    const std::size_t n_values = parts.size() - 1;
    if (!have_dim) {
      if (n_values == 0) throw InputError("line " + std::to_string(line_no) + ": word without vector");
      if (declared_dim && declared_dim != n_values)
        throw InputError("line " + std::to_string(line_no) + ": header declares dimension " +
                         std::to_string(declared_dim) + " but vector has " +
                         std::to_string(n_values) + " values");
      store = EmbeddingStore(n_values);
      have_dim = true;
    }
    if (n_values != store.dim())
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(store.dim()) + " values, found " + std::to_string(n_values));
    values.resize(n_values);
    for (std::size_t i = 0; i < n_values; ++i) {
      const std::string& tok = parts[i + 1];
      char* end = nullptr;
      values[i] = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw InputError("line " + std::to_string(line_no) + ": cannot parse '" + tok + "'");
      if (!std::isfinite(values[i]))
        throw InputError("line " + std::to_string(line_no) + ": non-finite value '" + tok + "'");
    }
    if (!store.insert(parts[0], values))
      note_duplicate(store, parts[0], "line " + std::to_string(line_no));
    if (limit && store.vocab_size() >= limit) break;
  }
  if (!have_dim) store = EmbeddingStore(declared_dim);
  return store;
}

EmbeddingStore load_binary_format(const std::filesystem::path& path, std::size_t limit) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding file '" + path.string() + "'");

  std::string header;
  if (!std::getline(in, header)) throw InputError("binary embeddings: missing header");
  const auto parts = split_spaces(header);
  std::size_t vocab = 0, dim = 0;
  if (parts.size() != 2 || !parse_size(parts[0], vocab) || !parse_size(parts[1], dim))
    throw InputError("binary embeddings: header must be 'vocab_size dim', got '" + header + "'");
  if (dim == 0) throw InputError("binary embeddings: dimension must be positive");

  EmbeddingStore store(dim);
  const std::size_t wanted = limit ? std::min(limit, vocab) : vocab;
  std::vector<unsigned char> raw(dim * 4);
  std::vector<double> values(dim);
  for (std::size_t r = 0; r < wanted; ++r) {
    auto truncated = [&] {
      return InputError("binary embeddings: file truncated after " + std::to_string(r) +
                        " complete records (header declares " + std::to_string(vocab) + ")");
    };
    std::string word;
    int ch;
    while ((ch = in.get()) == '\n') {
    }
    while (ch != EOF && ch != ' ') {
      word.push_back(static_cast<char>(ch));
      ch = in.get();
    }
    if (ch == EOF) throw truncated();
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
      throw truncated();
    for (std::size_t i = 0; i < dim; ++i) {
      std::uint32_t bits = std::uint32_t(raw[4 * i]) | (std::uint32_t(raw[4 * i + 1]) << 8) |
                           (std::uint32_t(raw[4 * i + 2]) << 16) |
                           (std::uint32_t(raw[4 * i + 3]) << 24);
      const float f = std::bit_cast<float>(bits);
      if (!std::isfinite(f))
        throw InputError("binary embeddings: non-finite value in record " + std::to_string(r + 1));
      values[i] = static_cast<double>(f);
    }
    if (!store.insert(word, values)) note_duplicate(store, word, "record " + std::to_string(r + 1));
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                               std::size_t limit) {
  return format == EmbeddingFormat::Text ? load_text_format(path, limit) : load_binary_format(path, limit);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> analogy(const EmbeddingStore& store,
                                                    std::string_view a, std::string_view b,
                                                    std::string_view c, std::size_t top_n) {
  std::vector<double> target(store.dim(), 0.0);
  const std::string_view query[] = {a, b, c};
  const double sign[] = {-1.0, 1.0, 1.0};
  for (int q = 0; q < 3; ++q) {
    auto v = store.lookup(query[q]);
    if (!v) throw InputError("analogy: word '" + std::string(query[q]) + "' not in vocabulary");
    for (std::size_t i = 0; i < store.dim(); ++i) target[i] += sign[q] * (*v)[i];
  }

  std::vector<std::pair<std::size_t, double>> scored;
  scored.reserve(store.vocab_size());
  for (std::size_t i = 0; i < store.vocab_size(); ++i) {
    const std::string& w = store.words()[i];
    if (w == a || w == b || w == c) continue;
    scored.emplace_back(i, cosine_similarity(target, store.vector_at(i)));
  }
  const std::size_t n = std::min(top_n, scored.size());
  auto better = [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    better);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(store.words()[scored[i].first], scored[i].second);
  return out;
}

}  // namespace depsel
