#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library under test.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

/// Two passes over token lists: count document frequency, then weigh.
/// Terms are ordered lexicographically, matching the vocabulary contract.
inline Eigen::MatrixXd tfidf(const std::vector<std::vector<std::string>>& docs,
                             std::vector<std::string>* terms_out = nullptr) {
  std::map<std::string, int> df;
  for (const auto& d : docs) {
    std::set<std::string> seen(d.begin(), d.end());
    for (const auto& t : seen) df[t] += 1;
  }
  std::vector<std::string> terms;
  for (const auto& [t, _] : df) terms.push_back(t);
  const double n = static_cast<double>(docs.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(docs.size()),
                                              static_cast<Eigen::Index>(terms.size()));
  for (std::size_t y = 0; y < docs.size(); ++y)
    for (std::size_t x = 0; x < terms.size(); ++x) {
      int tf = 0;
      for (const auto& t : docs[y]) tf += t == terms[x];
      out(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) =
          tf * std::log(n / df[terms[x]]);
    }
  if (terms_out) *terms_out = terms;
  return out;
}

/// Character-at-a-time CSV reader written separately from the library's.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows(1);
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      rows.back().push_back(field);
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      rows.back().push_back(field);
      field.clear();
      rows.emplace_back();
    } else {
      field += c;
    }
  }
  if (!field.empty() || !rows.back().empty()) rows.back().push_back(field);
  if (rows.back().empty()) rows.pop_back();
  return rows;
}

inline double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean(), mb = b.mean();
  double sab = 0, saa = 0, sbb = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sab += (a(i) - ma) * (b(i) - mb);
    saa += (a(i) - ma) * (a(i) - ma);
    sbb += (b(i) - mb) * (b(i) - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// Squared MMD, biased estimator, written as three explicit double sums.
inline double mmd2(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma) {
  auto k = [&](const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::MatrixXd& b, Eigen::Index j) {
    double d = 0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) d += (a(i, c) - b(j, c)) * (a(i, c) - b(j, c));
    return std::exp(-d / sigma);
  };
  double kxx = 0, kyy = 0, kxy = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.rows(); ++j) kxx += k(x, i, x, j);
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j) kyy += k(y, i, y, j);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < y.rows(); ++j) kxy += k(x, i, y, j);
  const double n = static_cast<double>(x.rows()), m = static_cast<double>(y.rows());
  return kxx / (n * n) + kyy / (m * m) - 2.0 * kxy / (n * m);
}

/// 95th percentile of a statistic under random relabelling of the pooled
/// sample (first x.rows() rows versus the rest).
template <class Stat>
double permutation_threshold(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int permutations,
                             std::uint64_t seed, Stat stat) {
  Eigen::MatrixXd pooled(x.rows() + y.rows(), x.cols());
  pooled << x, y;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(pooled.rows()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::mt19937_64 rng(seed);
  std::vector<double> null;
  for (int p = 0; p < permutations; ++p) {
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd a(x.rows(), x.cols()), b(y.rows(), y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) a.row(i) = pooled.row(idx[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      b.row(i) = pooled.row(idx[static_cast<std::size_t>(x.rows() + i)]);
    null.push_back(stat(a, b));
  }
  std::sort(null.begin(), null.end());
  return null[static_cast<std::size_t>(std::ceil(0.95 * permutations)) - 1];
}

/// log N(v; mean, var) summed over features plus log prior, evaluated
/// directly from the class sample.
inline double gnb_log_joint(const Eigen::MatrixXd& class_rows, double prior, double epsilon,
                            const Eigen::RowVectorXd& q) {
  const double n = static_cast<double>(class_rows.rows());
  double total = std::log(prior);
  for (Eigen::Index j = 0; j < q.size(); ++j) {
    double mean = 0;
    for (Eigen::Index i = 0; i < class_rows.rows(); ++i) mean += class_rows(i, j);
    mean /= n;
    double var = 0;
    for (Eigen::Index i = 0; i < class_rows.rows(); ++i)
      var += (class_rows(i, j) - mean) * (class_rows(i, j) - mean);
    var = var / n + epsilon;
    const double pi = 3.14159265358979323846;
    total += -0.5 * std::log(2.0 * pi * var) - (q(j) - mean) * (q(j) - mean) / (2.0 * var);
  }
  return total;
}

}  // namespace oracle
