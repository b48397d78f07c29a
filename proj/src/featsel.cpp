#include "depsel/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "depsel/error.hpp"
#include "depsel/json_util.hpp"
#include "depsel/parallel.hpp"
#include "depsel/random.hpp"

namespace depsel {

std::string_view to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::GreedyRDC: return "GreedyRDC";
    case SelectionMethod::GreedyMMD: return "GreedyMMD";
    case SelectionMethod::PCA: return "PCA";
  }
  return "?";
}

SelectionMethod selection_method_from_string(std::string_view name) {
  if (name == "GreedyRDC" || name == "rdc" || name == "RDC") return SelectionMethod::GreedyRDC;
  if (name == "GreedyMMD" || name == "mmd" || name == "MMD") return SelectionMethod::GreedyMMD;
  if (name == "PCA" || name == "pca") return SelectionMethod::PCA;
  throw ConfigError("unknown selection method '" + std::string(name) + "'");
}

std::uint64_t candidate_seed(std::uint64_t seed, std::size_t round, std::size_t candidate) {
  return derive_seed(seed, "greedy-candidate", {round, candidate});
}

namespace {

struct ClassIndex {
  std::vector<int> classes;              // sorted distinct labels
  std::vector<int> of_row;               // position of each row's label in `classes`
  std::vector<double> counts;
};

ClassIndex index_classes(std::span<const int> labels) {
  ClassIndex ci;
  const std::set<int> distinct(labels.begin(), labels.end());
  ci.classes.assign(distinct.begin(), distinct.end());
  ci.counts.assign(ci.classes.size(), 0.0);
  ci.of_row.reserve(labels.size());
  for (int l : labels) {
    const auto pos = std::lower_bound(ci.classes.begin(), ci.classes.end(), l) - ci.classes.begin();
    ci.of_row.push_back(static_cast<int>(pos));
    ci.counts[static_cast<std::size_t>(pos)] += 1.0;
  }
  return ci;
}

Matrix label_column(std::span<const int> labels) {
  Matrix y(static_cast<Eigen::Index>(labels.size()), 1);
  for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = labels[i];
  return y;
}

Matrix take_columns(const Matrix& x, std::span<const std::size_t> columns) {
  Matrix out(x.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(columns[c]));
  return out;
}

Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

void check_inputs(const Matrix& x, std::span<const int> labels) {
  if (x.cols() < 1) throw InputError("feature selection needs at least one column");
  if (x.rows() <= 1) throw InputError("feature selection needs more than one sample");
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw InputError("feature selection: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(x.rows()) + " rows");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw InputError("feature selection needs labels from at least two classes");
  if (!x.allFinite()) throw InputError("feature selection: non-finite feature value");
}

// Sum over class pairs of mmd^2 from the upper-triangle pairwise squared
// distances of the pooled rows.
double class_separation(const std::vector<double>& dist_upper, const ClassIndex& ci, std::size_t n,
                        double sigma) {
  const std::size_t c = ci.classes.size();
  std::vector<double> block(c * c, 0.0);
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ci_row = static_cast<std::size_t>(ci.of_row[i]) * c;
    for (std::size_t j = i + 1; j < n; ++j, ++p)
      block[ci_row + static_cast<std::size_t>(ci.of_row[j])] += std::exp(-dist_upper[p] / sigma);
  }
  // symmetrize and add the unit diagonal k(x, x) = 1
  std::vector<double> full(c * c, 0.0);
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = 0; b < c; ++b) full[a * c + b] = block[a * c + b] + block[b * c + a];
  for (std::size_t a = 0; a < c; ++a) full[a * c + a] = 2.0 * block[a * c + a] + ci.counts[a];

  double total = 0.0;
  for (std::size_t a = 0; a < c; ++a)
    for (std::size_t b = a + 1; b < c; ++b) {
      const double na = ci.counts[a], nb = ci.counts[b];
      total += std::max(0.0, full[a * c + a] / (na * na) + full[b * c + b] / (nb * nb) -
                                 2.0 * full[a * c + b] / (na * nb));
    }
  return total;
}

// Empty when every row coincides on the subset; such a subset cannot
// separate classes and scores zero.
std::optional<double> sigma_for(const MmdConfig& cfg, std::vector<double> distances) {
  if (cfg.policy == MmdConfig::Sigma::Fixed) return cfg.sigma;
  if (std::none_of(distances.begin(), distances.end(), [](double v) { return v > 0; })) return std::nullopt;
  double med = median_in_place(distances);
  if (med <= 0) {
    std::erase_if(distances, [](double v) { return !(v > 0); });
    med = median_in_place(distances);
  }
  return med;
}

}  // namespace

double subset_score(const Matrix& x, std::span<const int> labels,
                    std::span<const std::size_t> columns, const Scorer& scorer,
                    std::uint64_t rdc_seed) {
  check_inputs(x, labels);
  for (std::size_t c : columns)
    if (c >= static_cast<std::size_t>(x.cols())) throw InputError("column index out of range");
  const Matrix sub = take_columns(x, columns);

  if (const auto* rdc_cfg = std::get_if<RdcConfig>(&scorer)) {
    RdcConfig cfg = *rdc_cfg;
    cfg.seed = rdc_seed;
    return rdc(sub, label_column(labels), cfg);
  }
  const auto& mmd_cfg = std::get<MmdConfig>(scorer);
  if (mmd_cfg.policy != MmdConfig::Sigma::Fixed && (sub.rowwise() - sub.row(0)).cwiseAbs().maxCoeff() == 0.0)
    return 0.0;
  const MmdConfig fixed =
      MmdConfig::fixed(mmd_cfg.policy == MmdConfig::Sigma::Fixed ? mmd_cfg.sigma : median_heuristic_sigma(sub));
  const ClassIndex ci = index_classes(labels);
  std::vector<std::vector<Eigen::Index>> members(ci.classes.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[static_cast<std::size_t>(ci.of_row[i])].push_back(static_cast<Eigen::Index>(i));
  double total = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      total += mmd_squared(take_rows(sub, members[a]), take_rows(sub, members[b]), fixed);
  return total;
}

SelectionResult greedy_select(const Matrix& x, std::span<const int> labels, const Scorer& scorer,
                              std::size_t target_dim) {
  check_inputs(x, labels);
  if (target_dim == 0) throw ConfigError("target dimension must be at least 1");
  std::visit([](const auto& cfg) { cfg.validate(); }, scorer);

  const std::size_t d = static_cast<std::size_t>(x.cols());
  const std::size_t n = static_cast<std::size_t>(x.rows());
  SelectionResult result;
  result.method = std::holds_alternative<RdcConfig>(scorer) ? SelectionMethod::GreedyRDC
                                                            : SelectionMethod::GreedyMMD;
  result.target_dim = target_dim;
  result.source_dim = d;
  if (const auto* cfg = std::get_if<RdcConfig>(&scorer)) result.seed = cfg->seed;
  if (target_dim > d) {
    result.warnings.push_back("target dimension " + std::to_string(target_dim) + " exceeds the " +
                              std::to_string(d) + " available columns; selecting all of them");
  }
  const std::size_t rounds = std::min(target_dim, d);

  // RDC path: column copulas are computed once; a subset's copula is the
  // corresponding column subset.
  Matrix copula_x, copula_y;
  // MMD path: pairwise squared distances of the selected subset, accumulated
  // one column at a time (upper triangle, row-major).
  std::vector<double> base_dist;
  ClassIndex ci;
  if (std::holds_alternative<RdcConfig>(scorer)) {
    copula_x = copula_transform(x);
    copula_y = copula_transform(label_column(labels));
  } else {
    base_dist.assign(n * (n - 1) / 2, 0.0);
    ci = index_classes(labels);
  }

  std::vector<bool> taken(d, false);
  std::vector<double> scores(d);
  for (std::size_t round = 0; round < rounds; ++round) {
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < d; ++j)
      if (!taken[j]) candidates.push_back(j);

    parallel_for(candidates.size(), [&](std::size_t ci_idx) {
      const std::size_t j = candidates[ci_idx];
      if (const auto* rdc_cfg = std::get_if<RdcConfig>(&scorer)) {
        Matrix sub(x.rows(), static_cast<Eigen::Index>(result.selected.size() + 1));
        for (std::size_t c = 0; c < result.selected.size(); ++c)
          sub.col(static_cast<Eigen::Index>(c)) =
              copula_x.col(static_cast<Eigen::Index>(result.selected[c]));
        sub.col(sub.cols() - 1) = copula_x.col(static_cast<Eigen::Index>(j));
        RdcConfig cfg = *rdc_cfg;
        cfg.seed = candidate_seed(rdc_cfg->seed, round, j);
        scores[j] = rdc_from_copulas(sub, copula_y, cfg);
      } else {
        const auto col = x.col(static_cast<Eigen::Index>(j));
        std::vector<double> dist(base_dist.size());
        std::size_t p = 0;
        for (std::size_t a = 0; a < n; ++a) {
          const double va = col(static_cast<Eigen::Index>(a));
          for (std::size_t b = a + 1; b < n; ++b, ++p) {
            const double diff = va - col(static_cast<Eigen::Index>(b));
            dist[p] = base_dist[p] + diff * diff;
          }
        }
        const auto sigma = sigma_for(std::get<MmdConfig>(scorer), dist);
        scores[j] = sigma ? class_separation(dist, ci, n, *sigma) : 0.0;
      }
    });

    std::size_t best = candidates.front();
    for (std::size_t j : candidates)
      if (scores[j] > scores[best]) best = j;
    taken[best] = true;
    result.selected.push_back(best);
    result.score_trajectory.push_back(scores[best]);

    if (!base_dist.empty()) {
      const auto col = x.col(static_cast<Eigen::Index>(best));
      std::size_t p = 0;
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b, ++p) {
          const double diff = col(static_cast<Eigen::Index>(a)) - col(static_cast<Eigen::Index>(b));
          base_dist[p] += diff * diff;
        }
    }
  }
  return result;
}

Matrix apply_selection(const Matrix& x, const SelectionResult& result) {
  if (result.method == SelectionMethod::PCA)
    throw InputError("a PCA reduction is applied with pca_transform, not apply_selection");
  if (result.selected.empty()) throw InputError("selection is empty");
  if (result.source_dim != 0 && result.source_dim != static_cast<std::size_t>(x.cols()))
    throw InputError("selection was made on " + std::to_string(result.source_dim) +
                     " columns but the matrix has " + std::to_string(x.cols()));
  for (std::size_t c : result.selected)
    if (c >= static_cast<std::size_t>(x.cols()))
      throw InputError("selected column " + std::to_string(c) + " out of range");
  return take_columns(x, result.selected);
}

FeatureMatrix apply_selection(const FeatureMatrix& features, const SelectionResult& result) {
  FeatureMatrix out;
  out.values = apply_selection(features.values, result);
  out.doc_ids = features.doc_ids;
  for (std::size_t c : result.selected)
    out.columns.push_back(c < features.columns.size() ? features.columns[c]
                                                      : ColumnTag{ColumnTag::Kind::Column, {}, c});
  return out;
}

PcaModel pca_fit(const Matrix& x, std::size_t target_dim) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  if (n < 2) throw InputError("PCA needs at least two samples");
  if (target_dim == 0 || target_dim > std::min(n, d))
    throw ConfigError("PCA target dimension " + std::to_string(target_dim) +
                      " must be in [1, min(n, d) = " + std::to_string(std::min(n, d)) + "]");
  if (!x.allFinite()) throw InputError("PCA: non-finite input");

  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  const Matrix centred = x.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
  const auto t = static_cast<Eigen::Index>(target_dim);
  model.components = svd.matrixV().leftCols(t).transpose();
  for (Eigen::Index r = 0; r < t; ++r) {
    Eigen::Index arg = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0) model.components.row(r) *= -1.0;
  }
  model.explained_variance =
      svd.singularValues().head(t).array().square() / static_cast<double>(n - 1);
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.mean.size())
    throw InputError("PCA model expects " + std::to_string(model.mean.size()) +
                     " columns, got " + std::to_string(x.cols()));
  return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& features) {
  FeatureMatrix out;
  out.values = pca_transform(model, features.values);
  out.doc_ids = features.doc_ids;
  for (Eigen::Index c = 0; c < model.components.rows(); ++c)
    out.columns.push_back(ColumnTag::for_component(static_cast<std::size_t>(c)));
  return out;
}

nlohmann::json to_json(const SelectionResult& result) {
  return {{"method", std::string(to_string(result.method))},
          {"selected", result.selected},
          {"score_trajectory", result.score_trajectory},
          {"target_dim", result.target_dim},
          {"seed", result.seed},
          {"source_dim", result.source_dim}};
}

SelectionResult selection_from_json(const nlohmann::json& j) {
  SelectionResult r;
  r.method = selection_method_from_string(j.at("method").get<std::string>());
  r.selected = j.at("selected").get<std::vector<std::size_t>>();
  r.score_trajectory = j.at("score_trajectory").get<std::vector<double>>();
  r.target_dim = j.at("target_dim").get<std::size_t>();
  r.seed = j.value("seed", std::uint64_t{0});
  r.source_dim = j.value("source_dim", std::size_t{0});
  return r;
}

nlohmann::json to_json(const PcaModel& model) {
  return {{"mean", vector_to_json(model.mean)},
          {"components", matrix_to_json(model.components)},
          {"explained_variance", vector_to_json(model.explained_variance)}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
  PcaModel m;
  m.mean = vector_from_json(j.at("mean"));
  m.components = matrix_from_json(j.at("components"));
  m.explained_variance = vector_from_json(j.at("explained_variance"));
  return m;
}

}  // namespace depsel
