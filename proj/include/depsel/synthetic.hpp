#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depsel/embeddings.hpp"
#include "depsel/featurize.hpp"

/// Seeded synthetic data sets for tests, benchmarks and demos.
namespace depsel::synthetic {

struct Dataset {
  Matrix x;
  std::vector<int> labels;  ///< 1..classes
};

/// Isotropic unit-variance Gaussian blobs. Class means sit on a regular
/// polygon in the first two dimensions, neighbours `separation` apart.
Dataset gaussian_blobs(std::size_t n, std::size_t d, int classes, double separation,
                       std::uint64_t seed);

struct PlantedDataset : Dataset {
  std::vector<std::size_t> informative;  ///< sorted
};

/// Three balanced classes; N(0,1) noise everywhere, plus a class mean offset
/// of (code - 2) * offset on `informative` randomly chosen columns.
PlantedDataset planted_features(std::size_t n, std::size_t d, std::size_t informative,
                                double offset, std::uint64_t seed);

struct ReviewCorpus {
  std::string csv;  ///< columns: comment,rating
  EmbeddingStore store;
};

/// Review-like comments whose sentiment words carry a class direction in the
/// embedding space. Agree is over-represented so rebalancing has work to do.
ReviewCorpus review_corpus(std::size_t n_docs, std::size_t dim, std::uint64_t seed);

void write_text_embeddings(const std::string& path, const EmbeddingStore& store);

}  // namespace depsel::synthetic
