#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace depsel {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Parameters of the randomized dependence coefficient.
struct RdcConfig {
  int k = 20;               ///< random projections per side
  double s = 1.0 / 6.0;     ///< standard deviation of projection weights and biases
  std::uint64_t seed = 0;
  double ridge = 1e-8;      ///< added to both covariance blocks before inversion

  void validate() const;
};

/// Bandwidth policy for the Gaussian kernel exp(-|a-b|^2 / sigma).
struct MmdConfig {
  enum class Sigma { MedianHeuristic, Fixed };
  Sigma policy = Sigma::MedianHeuristic;
  double sigma = 0.0;  ///< used when policy == Fixed

  static MmdConfig median() { return {}; }
  static MmdConfig fixed(double sigma) { return {Sigma::Fixed, sigma}; }
  void validate() const;
};

/// Column-wise empirical CDF: rank / n with ties given their average rank.
Matrix copula_transform(const Matrix& samples);

/// Weights of k random features sin(w_j . u + b_j).
struct ProjectionWeights {
  Matrix w;  ///< p x k
  Vector b;  ///< k
};

/// Column j is drawn from its own stream seeded by (config.seed, j), so
/// feature j does not depend on k.
ProjectionWeights draw_projection_weights(Eigen::Index p, const RdcConfig& config);

/// sin(copula * w + b), n x k.
Matrix random_projection(const Matrix& copula, const ProjectionWeights& weights);
Matrix random_projection(const Matrix& copula, const RdcConfig& config);

/// Largest canonical correlation between the columns of a and b, computed
/// from ridge-regularized covariance blocks of the column-centred inputs.
/// Result clamped to [0, 1]. Requires n > 1.
double largest_canonical_correlation(const Matrix& a, const Matrix& b, double ridge);

/// Seeds of the two projection sides, derived from config.seed.
RdcConfig rdc_side_config(const RdcConfig& config, int side);

double rdc(const Matrix& x, const Matrix& y, const RdcConfig& config);
/// rdc for inputs that are already copula-transformed.
double rdc_from_copulas(const Matrix& copula_x, const Matrix& copula_y, const RdcConfig& config);

/// Squared Euclidean distances of all unordered row pairs (i < j), row-major
/// upper-triangle order.
std::vector<double> pairwise_squared_distances(const Matrix& z);

/// Median of the values (mean of the middle two for an even count). Reorders
/// the input.
double median_in_place(std::vector<double>& values);

/// Median of the n(n-1)/2 pairwise squared distances. Throws InputError when
/// fewer than two distinct rows exist. If the median itself is zero the
/// median of the positive distances is used instead.
double median_heuristic_sigma(const Matrix& z);

/// Biased (V-statistic) squared MMD with weights 1/n^2, 1/m^2, 2/(nm),
/// clipped at zero.
double mmd_squared(const Matrix& x, const Matrix& y, const MmdConfig& config);
double mmd(const Matrix& x, const Matrix& y, const MmdConfig& config);

/// Stacks the rows of x and y.
Matrix pool_rows(const Matrix& x, const Matrix& y);

}  // namespace depsel
