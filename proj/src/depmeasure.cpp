#include "depsel/depmeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "depsel/error.hpp"
#include "depsel/random.hpp"

namespace depsel {

void RdcConfig::validate() const {
  if (k < 1) throw ConfigError("rdc: k must be >= 1");
  if (!(s > 0)) throw ConfigError("rdc: s must be > 0");
  if (!(ridge > 0)) throw ConfigError("rdc: ridge must be > 0");
}

void MmdConfig::validate() const {
  if (policy == Sigma::Fixed && !(sigma > 0)) throw ConfigError("mmd: fixed sigma must be > 0");
}

Matrix copula_transform(const Matrix& samples) {
  const Eigen::Index n = samples.rows();
  Matrix out(n, samples.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    const auto col = samples.col(c);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return col(a) < col(b); });
    Eigen::Index i = 0;
    while (i < n) {
      Eigen::Index j = i;
      while (j + 1 < n && col(order[j + 1]) == col(order[i])) ++j;
      // ranks i+1 .. j+1 share their average
      const double rank = 0.5 * static_cast<double>(i + j + 2);
      for (Eigen::Index t = i; t <= j; ++t) out(order[t], c) = rank / static_cast<double>(n);
      i = j + 1;
    }
  }
  return out;
}

ProjectionWeights draw_projection_weights(Eigen::Index p, const RdcConfig& config) {
  config.validate();
  ProjectionWeights pw{Matrix(p, config.k), Vector(config.k)};
  for (int j = 0; j < config.k; ++j) {
    Engine rng = make_engine(derive_seed(config.seed, "projection", {static_cast<std::uint64_t>(j)}));
    std::normal_distribution<double> normal(0.0, config.s);
    for (Eigen::Index i = 0; i < p; ++i) pw.w(i, j) = normal(rng);
    pw.b(j) = normal(rng);
  }
  return pw;
}

Matrix random_projection(const Matrix& copula, const ProjectionWeights& weights) {
  if (copula.cols() != weights.w.rows())
    throw InputError("random_projection: weight rows do not match input width");
  Matrix z = copula * weights.w;
  z.rowwise() += weights.b.transpose();
  return z.array().sin().matrix();
}

Matrix random_projection(const Matrix& copula, const RdcConfig& config) {
  return random_projection(copula, draw_projection_weights(copula.cols(), config));
}

namespace {

// (C + ridge I)^(-1/2) for a symmetric positive semi-definite C.
Matrix inverse_sqrt(const Matrix& c, double ridge) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  const Vector scale =
      (eig.eigenvalues().array().max(0.0) + ridge).rsqrt().matrix();
  return eig.eigenvectors() * scale.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double largest_canonical_correlation(const Matrix& a, const Matrix& b, double ridge) {
  const Eigen::Index n = a.rows();
  if (n <= 1) throw InputError("canonical correlation needs more than one sample");
  if (b.rows() != n) throw InputError("canonical correlation: row counts differ");
  if (!(ridge > 0)) throw ConfigError("canonical correlation: ridge must be > 0");

  const Matrix ac = a.rowwise() - a.colwise().mean();
  const Matrix bc = b.rowwise() - b.colwise().mean();
  const double denom = static_cast<double>(n - 1);
  const Matrix caa = ac.transpose() * ac / denom;
  const Matrix cbb = bc.transpose() * bc / denom;
  const Matrix cab = ac.transpose() * bc / denom;

  // Singular values of Caa^-1/2 Cab Cbb^-1/2 are the canonical correlations;
  // the largest squared equals the top eigenvalue of Caa^-1 Cab Cbb^-1 Cba.
  const Matrix m = inverse_sqrt(caa, ridge) * cab * inverse_sqrt(cbb, ridge);
  Eigen::JacobiSVD<Matrix> svd(m);
  const double rho = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  if (!std::isfinite(rho)) throw NumericError("canonical correlation is not finite");
  return std::clamp(rho, 0.0, 1.0);
}

RdcConfig rdc_side_config(const RdcConfig& config, int side) {
  RdcConfig out = config;
  out.seed = derive_seed(config.seed, side == 0 ? "rdc-x" : "rdc-y");
  return out;
}

double rdc_from_copulas(const Matrix& copula_x, const Matrix& copula_y, const RdcConfig& config) {
  config.validate();
  if (copula_x.rows() != copula_y.rows())
    throw InputError("rdc: X has " + std::to_string(copula_x.rows()) + " rows but Y has " +
                     std::to_string(copula_y.rows()));
  if (copula_x.rows() <= 1) throw InputError("rdc needs more than one sample");
  const Matrix fx = random_projection(copula_x, rdc_side_config(config, 0));
  const Matrix fy = random_projection(copula_y, rdc_side_config(config, 1));
  return largest_canonical_correlation(fx, fy, config.ridge);
}

double rdc(const Matrix& x, const Matrix& y, const RdcConfig& config) {
  if (x.rows() != y.rows())
    throw InputError("rdc: X has " + std::to_string(x.rows()) + " rows but Y has " +
                     std::to_string(y.rows()));
  return rdc_from_copulas(copula_transform(x), copula_transform(y), config);
}

std::vector<double> pairwise_squared_distances(const Matrix& z) {
  const Eigen::Index n = z.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  const Matrix zt = z.transpose();  // column access is contiguous
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out.push_back((zt.col(i) - zt.col(j)).squaredNorm());
  return out;
}

double median_in_place(std::vector<double>& values) {
  if (values.empty()) throw InputError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_heuristic_sigma(const Matrix& z) {
  std::vector<double> d = pairwise_squared_distances(z);
  const bool any_positive = std::any_of(d.begin(), d.end(), [](double v) { return v > 0; });
  if (!any_positive)
    throw InputError("median heuristic needs at least two distinct samples; use a fixed sigma");
  double med = median_in_place(d);
  if (med <= 0) {
    std::erase_if(d, [](double v) { return !(v > 0); });
    med = median_in_place(d);
  }
  return med;
}

Matrix pool_rows(const Matrix& x, const Matrix& y) {
  Matrix pooled(x.rows() + y.rows(), x.cols());
  pooled.topRows(x.rows()) = x;
  pooled.bottomRows(y.rows()) = y;
  return pooled;
}

namespace {

// Sum over all ordered pairs of exp(-|a_i - b_j|^2 / sigma); inputs are
// transposed so samples are contiguous columns.
double kernel_sum(const Matrix& at, const Matrix& bt, double sigma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < at.cols(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < bt.cols(); ++j)
      row += std::exp(-(at.col(i) - bt.col(j)).squaredNorm() / sigma);
    total += row;
  }
  return total;
}

}  // namespace

double mmd_squared(const Matrix& x, const Matrix& y, const MmdConfig& config) {
  config.validate();
  if (x.rows() < 1 || y.rows() < 1) throw InputError("mmd needs at least one sample per side");
  if (x.cols() != y.cols()) throw InputError("mmd: samples have different dimensions");

  double sigma = config.sigma;
  if (config.policy == MmdConfig::Sigma::MedianHeuristic) {
    try {
      sigma = median_heuristic_sigma(pool_rows(x, y));
    } catch (const InputError&) {
      throw InputError("mmd: all pooled samples are identical; the median heuristic is undefined, "
                       "use a fixed sigma");
    }
  }
  const Matrix xt = x.transpose();
  const Matrix yt = y.transpose();
  const double n = static_cast<double>(x.rows());
  const double m = static_cast<double>(y.rows());
  const double kxx = kernel_sum(xt, xt, sigma) / (n * n);
  const double kyy = kernel_sum(yt, yt, sigma) / (m * m);
  const double kxy = kernel_sum(xt, yt, sigma) / (n * m);
  return std::max(0.0, kxx + kyy - 2.0 * kxy);
}

double mmd(const Matrix& x, const Matrix& y, const MmdConfig& config) {
  return std::sqrt(mmd_squared(x, y, config));
}

}  // namespace depsel
