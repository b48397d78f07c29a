#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depsel/depmeasure.hpp"
#include "depsel/featurize.hpp"
#include "json.hpp"

namespace depsel {

enum class SelectionMethod { GreedyRDC, GreedyMMD, PCA };

std::string_view to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(std::string_view name);

/// Dependence score used by greedy selection.
using Scorer = std::variant<RdcConfig, MmdConfig>;

struct SelectionResult {
  SelectionMethod method = SelectionMethod::GreedyRDC;
  std::vector<std::size_t> selected;
  /// Best score of each round, aligned with `selected`.
  std::vector<double> score_trajectory;
  std::size_t target_dim = 20;
  std::uint64_t seed = 0;
  /// Width of the matrix the selection was made on.
  std::size_t source_dim = 0;
  std::vector<std::string> warnings;
};

/// Seed used for candidate `candidate` in round `round` (0-based).
std::uint64_t candidate_seed(std::uint64_t seed, std::size_t round, std::size_t candidate);

/// Dependence between X[:, columns] and the labels, computed directly from
/// the depmeasure primitives. RDC treats labels as an n x 1 numeric column;
/// MMD sums mmd^2 over every unordered pair of class-conditional row sets,
/// with sigma from the median heuristic on the pooled subset unless fixed.
double subset_score(const Matrix& x, std::span<const int> labels,
                    std::span<const std::size_t> columns, const Scorer& scorer,
                    std::uint64_t rdc_seed);

/// Greedy forward selection. Each round scores every unselected column j by
/// subset_score(selected + j) and keeps the best, lowest index on ties.
/// Candidates are evaluated in parallel; the result does not depend on the
/// thread count.
SelectionResult greedy_select(const Matrix& x, std::span<const int> labels, const Scorer& scorer,
                              std::size_t target_dim);

/// Column subset in selection order.
FeatureMatrix apply_selection(const FeatureMatrix& features, const SelectionResult& result);
Matrix apply_selection(const Matrix& x, const SelectionResult& result);

struct PcaModel {
  Vector mean;                ///< d
  Matrix components;          ///< target_dim x d, orthonormal rows
  Vector explained_variance;  ///< non-increasing
};

/// SVD of the centred data. Each component is signed so that its
/// largest-magnitude entry is positive.
PcaModel pca_fit(const Matrix& x, std::size_t target_dim);
Matrix pca_transform(const PcaModel& model, const Matrix& x);
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& features);

nlohmann::json to_json(const SelectionResult& result);
SelectionResult selection_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

}  // namespace depsel
