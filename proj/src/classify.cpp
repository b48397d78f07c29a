#include "depsel/classify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "depsel/error.hpp"
#include "depsel/json_util.hpp"

namespace depsel {

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::KNN: return "KNN";
    case ClassifierKind::GNB: return "GNB";
    case ClassifierKind::LOGREG: return "LOGREG";
    case ClassifierKind::LSVM: return "LSVM";
    case ClassifierKind::GSVM: return "GSVM";
    case ClassifierKind::LDA: return "LDA";
  }
  return "?";
}

std::string_view display_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::KNN: return "k-NN";
    case ClassifierKind::GNB: return "G-NB";
    case ClassifierKind::LOGREG: return "Log";
    case ClassifierKind::LSVM: return "L-SVM";
    case ClassifierKind::GSVM: return "G-SVM";
    case ClassifierKind::LDA: return "LDA";
  }
  return "?";
}

ClassifierKind classifier_kind_from_string(std::string_view name) {
  for (ClassifierKind k : kAllClassifiers)
    if (name == to_string(k) || name == display_name(k)) return k;
  throw ConfigError("unknown classifier '" + std::string(name) + "'");
}

void HyperParams::validate() const {
  if (knn_k < 1) throw ConfigError("knn_k must be >= 1");
  if (!(c > 0)) throw ConfigError("C must be > 0");
  if (!(gnb_var_smoothing > 0)) throw ConfigError("gnb_var_smoothing must be > 0");
  if (!(lda_ridge > 0)) throw ConfigError("lda_ridge must be > 0");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(logreg_tol > 0) || !(svm_tol > 0)) throw ConfigError("tolerances must be > 0");
  svm_sigma.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

// Class index (into sorted `classes`) of every row.
std::vector<int> encode(std::span<const int> labels, const std::vector<int>& classes) {
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels)
    out.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), l) - classes.begin()));
  return out;
}

Matrix squared_distances(const Matrix& a, const Matrix& b) {
  // |a|^2 + |b|^2 - 2 a.b, clamped at zero
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix d = -2.0 * (a * b.transpose());
  d.colwise() += an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

// ---- k-nearest neighbours -------------------------------------------------

KnnParams fit_knn(const Matrix& x, const std::vector<int>& y, const HyperParams& hp) {
  return {x, y, hp.knn_k};
}

Matrix knn_scores(const KnnParams& p, const Matrix& x, std::size_t n_classes) {
  const Eigen::Index n = p.train_x.rows();
  const Eigen::Index k = std::min<Eigen::Index>(p.k, n);
  const Matrix train_t = p.train_x.transpose();
  Matrix votes = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(n_classes));
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < x.rows(); ++q) {
    const Vector d = (train_t.colwise() - x.row(q).transpose()).colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = {d(i), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());  // (distance, index) order
    for (Eigen::Index i = 0; i < k; ++i)
      votes(q, p.train_class[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)]) += 1.0;
  }
  return votes;
}

// ---- Gaussian naive Bayes -------------------------------------------------

GnbParams fit_gnb(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                  const HyperParams& hp) {
  const Eigen::Index d = x.cols();
  const auto kc = static_cast<Eigen::Index>(n_classes);
  GnbParams p{Matrix::Zero(kc, d), Matrix::Zero(kc, d), Vector::Zero(kc)};
  Vector counts = Vector::Zero(kc);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    p.means.row(y[static_cast<std::size_t>(i)]) += x.row(i);
    counts(y[static_cast<std::size_t>(i)]) += 1.0;
  }
  for (Eigen::Index c = 0; c < kc; ++c) p.means.row(c) /= counts(c);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = y[static_cast<std::size_t>(i)];
    p.variances.row(c) += (x.row(i) - p.means.row(c)).array().square().matrix();
  }
  for (Eigen::Index c = 0; c < kc; ++c) p.variances.row(c) /= counts(c);

  const Matrix centred = x.rowwise() - x.colwise().mean();
  const double max_var = d ? (centred.array().square().colwise().sum() / static_cast<double>(x.rows())).maxCoeff() : 0.0;
  const double epsilon = max_var > 0 ? hp.gnb_var_smoothing * max_var : hp.gnb_var_smoothing;
  p.variances.array() += epsilon;
  p.log_priors = (counts / static_cast<double>(x.rows())).array().log().matrix();
  return p;
}

Matrix gnb_scores(const GnbParams& p, const Matrix& x) {
  const Eigen::Index kc = p.means.rows();
  Matrix out(x.rows(), kc);
  for (Eigen::Index c = 0; c < kc; ++c) {
    const auto var = p.variances.row(c).array();
    const double norm = -0.5 * (2.0 * std::numbers::pi * var).log().sum();
    const Matrix diff = x.rowwise() - p.means.row(c);
    out.col(c) = ((diff.array().square().rowwise() / var).rowwise().sum() * -0.5 + norm +
                  p.log_priors(c))
                     .matrix();
  }
  return out;
}

// ---- multinomial logistic regression --------------------------------------

struct LogRegProblem {
  const Matrix& x;
  const Matrix& onehot;  // n x K
  double inv_c;

  // Objective (1/n)[sum CE + |W|^2 / (2C)] and its gradient.
  double evaluate(const Matrix& w, const Vector& b, Matrix* gw, Vector* gb) const {
    const double n = static_cast<double>(x.rows());
    Matrix logits = x * w.transpose();
    logits.rowwise() += b.transpose();
    const Vector row_max = logits.rowwise().maxCoeff();
    logits.colwise() -= row_max;
    Matrix prob = logits.array().exp().matrix();
    const Vector z = prob.rowwise().sum();
    const Vector log_z = z.array().log().matrix();
    double ce = -(onehot.array() * (logits.colwise() - log_z).array()).sum();
    const double obj = (ce + 0.5 * inv_c * w.squaredNorm()) / n;
    if (gw) {
      prob.array().colwise() /= z.array();
      const Matrix residual = prob - onehot;  // n x K
      *gw = (residual.transpose() * x + inv_c * w) / n;
      *gb = residual.colwise().sum().transpose() / n;
    }
    return obj;
  }
};

LogRegParams fit_logreg(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                        const HyperParams& hp, FitDiagnostics& diag) {
  const auto kc = static_cast<Eigen::Index>(n_classes);
  Matrix onehot = Matrix::Zero(x.rows(), kc);
  for (Eigen::Index i = 0; i < x.rows(); ++i) onehot(i, y[static_cast<std::size_t>(i)]) = 1.0;
  const LogRegProblem problem{x, onehot, 1.0 / hp.c};

  Matrix w = Matrix::Zero(kc, x.cols());
  Vector b = Vector::Zero(kc);
  Matrix gw;
  Vector gb;
  double obj = problem.evaluate(w, b, &gw, &gb);
  diag.objective_history = {obj};
  diag.converged = false;

  double step = 1.0;
  Matrix prev_w, prev_gw;
  Vector prev_b, prev_gb;
  int iter = 0;
  for (; iter < hp.max_iter; ++iter) {
    const double grad_sq = gw.squaredNorm() + gb.squaredNorm();
    if (std::sqrt(grad_sq) < hp.logreg_tol) {
      diag.converged = true;
      break;
    }
    if (iter > 0) {
      // Barzilai-Borwein trial step, then Armijo backtracking
      const double sy = (w - prev_w).cwiseProduct(gw - prev_gw).sum() + (b - prev_b).dot(gb - prev_gb);
      const double ss = (w - prev_w).squaredNorm() + (b - prev_b).squaredNorm();
      step = sy > 0 ? ss / sy : 1.0;
    }
    prev_w = w;
    prev_b = b;
    prev_gw = gw;
    prev_gb = gb;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      const Matrix w_try = prev_w - step * prev_gw;
      const Vector b_try = prev_b - step * prev_gb;
      const double obj_try = problem.evaluate(w_try, b_try, nullptr, nullptr);
      if (obj_try <= obj - 1e-4 * step * grad_sq) {
        w = w_try;
        b = b_try;
        obj = problem.evaluate(w, b, &gw, &gb);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable
    diag.objective_history.push_back(obj);
  }
  diag.iterations = iter;
  diag.final_gradient_norm = std::sqrt(gw.squaredNorm() + gb.squaredNorm());
  if (diag.final_gradient_norm < hp.logreg_tol) diag.converged = true;
  return {w, b};
}

Matrix logreg_scores(const LogRegParams& p, const Matrix& x) {
  Matrix logits = x * p.weights.transpose();
  logits.rowwise() += p.bias.transpose();
  return logits;
}

// ---- support vector machines ----------------------------------------------

SvmParams fit_svm(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                  const HyperParams& hp, bool gaussian, FitDiagnostics& diag) {
  SvmParams p;
  p.gaussian = gaussian;
  p.center = x.colwise().mean().transpose();
  const Matrix xc = x.rowwise() - p.center.transpose();
  Matrix kernel;
  if (gaussian) {
    p.sigma = hp.svm_sigma.policy == MmdConfig::Sigma::Fixed ? hp.svm_sigma.sigma
                                                             : median_heuristic_sigma(xc);
    kernel = gaussian_kernel(xc, xc, p.sigma);
  } else {
    kernel = xc * xc.transpose();
  }

  const auto n = static_cast<std::size_t>(x.rows());
  const auto kc = static_cast<Eigen::Index>(n_classes);
  std::vector<Vector> coefs;
  p.bias = Vector::Zero(kc);
  std::vector<bool> is_sv(n, false);
  std::vector<double> target(n);
  diag.converged = true;
  for (Eigen::Index c = 0; c < kc; ++c) {
    for (std::size_t i = 0; i < n; ++i) target[i] = y[i] == c ? 1.0 : -1.0;
    const SmoResult r = smo_solve(kernel, target, hp.c, hp.svm_tol);
    diag.iterations += r.iterations;
    diag.converged = diag.converged && r.converged;
    Vector coef(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      coef(static_cast<Eigen::Index>(i)) = r.alpha(static_cast<Eigen::Index>(i)) * target[i];
      if (r.alpha(static_cast<Eigen::Index>(i)) > 0) is_sv[i] = true;
    }
    coefs.push_back(std::move(coef));
    p.bias(c) = r.bias;
  }

  std::vector<Eigen::Index> sv;
  for (std::size_t i = 0; i < n; ++i)
    if (is_sv[i]) sv.push_back(static_cast<Eigen::Index>(i));
  p.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
  p.dual_coef.resize(kc, static_cast<Eigen::Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    p.support_vectors.row(static_cast<Eigen::Index>(s)) = xc.row(sv[s]);
    for (Eigen::Index c = 0; c < kc; ++c)
      p.dual_coef(c, static_cast<Eigen::Index>(s)) = coefs[static_cast<std::size_t>(c)](sv[s]);
  }
  if (!gaussian) p.linear_weights = p.dual_coef * p.support_vectors;
  return p;
}

Matrix svm_scores(const SvmParams& p, const Matrix& x) {
  const Matrix xc = x.rowwise() - p.center.transpose();
  Matrix scores;
  if (p.gaussian)
    scores = gaussian_kernel(xc, p.support_vectors, p.sigma) * p.dual_coef.transpose();
  else
    scores = xc * p.linear_weights.transpose();
  scores.rowwise() += p.bias.transpose();
  return scores;
}

// ---- linear discriminant analysis -----------------------------------------

LdaParams fit_lda(const Matrix& x, const std::vector<int>& y, std::size_t n_classes,
                  const HyperParams& hp) {
  const auto kc = static_cast<Eigen::Index>(n_classes);
  const Eigen::Index n = x.rows();
  LdaParams p{Matrix::Zero(kc, x.cols()), Matrix(kc, x.cols()), Vector(kc)};
  Vector counts = Vector::Zero(kc);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.means.row(y[static_cast<std::size_t>(i)]) += x.row(i);
    counts(y[static_cast<std::size_t>(i)]) += 1.0;
  }
  for (Eigen::Index c = 0; c < kc; ++c) p.means.row(c) /= counts(c);

  // Within-class residuals scaled so that R^T R is the pooled covariance.
  Matrix residual(n, x.cols());
  for (Eigen::Index i = 0; i < n; ++i) residual.row(i) = x.row(i) - p.means.row(y[static_cast<std::size_t>(i)]);
  residual /= std::sqrt(static_cast<double>(std::max<Eigen::Index>(n - kc, 1)));

  // (V S^2 V^T + r I)^-1 = V diag(1 / (s^2 + r)) V^T + (I - V V^T) / r
  Eigen::BDCSVD<Matrix> svd(residual, Eigen::ComputeThinV);
  const Matrix& v = svd.matrixV();
  const Vector shrink = (svd.singularValues().array().square() + hp.lda_ridge).inverse().matrix();
  const Matrix proj = p.means * v;  // K x r
  p.coef = (proj * shrink.asDiagonal()) * v.transpose() + (p.means - proj * v.transpose()) / hp.lda_ridge;
  for (Eigen::Index c = 0; c < kc; ++c)
    p.intercept(c) = -0.5 * p.coef.row(c).dot(p.means.row(c)) + std::log(counts(c) / static_cast<double>(n));
  return p;
}

Matrix lda_scores(const LdaParams& p, const Matrix& x) {
  Matrix s = x * p.coef.transpose();
  s.rowwise() += p.intercept.transpose();
  return s;
}

}  // namespace

Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma) {
  return (squared_distances(a, b).array() * (-1.0 / sigma)).exp().matrix();
}

SmoResult smo_solve(const Matrix& kernel, std::span<const double> y, double c, double tol,
                    long max_iter) {
  const auto n = static_cast<Eigen::Index>(y.size());
  constexpr double kTau = 1e-12;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (max_iter <= 0) max_iter = std::max<long>(10'000'000L, 100L * n);

  SmoResult r;
  r.alpha = Vector::Zero(n);
  Vector& alpha = r.alpha;
  Vector grad = Vector::Constant(n, -1.0);  // Q alpha - e, Q_ij = y_i y_j K_ij
  auto upper = [&](Eigen::Index t) { return alpha(t) >= c; };
  auto lower = [&](Eigen::Index t) { return alpha(t) <= 0; };

  long iter = 0;
  r.converged = false;
  for (; iter < max_iter; ++iter) {
    double gmax = -kInf, gmax2 = -kInf, best_obj = kInf;
    Eigen::Index i = -1, j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[static_cast<std::size_t>(t)] > 0) {
        if (!upper(t) && -grad(t) >= gmax) { gmax = -grad(t); i = t; }
      } else {
        if (!lower(t) && grad(t) >= gmax) { gmax = grad(t); i = t; }
      }
    }
    if (i < 0) { r.converged = true; break; }
    for (Eigen::Index t = 0; t < n; ++t) {
      double grad_diff;
      if (y[static_cast<std::size_t>(t)] > 0) {
        if (lower(t)) continue;
        grad_diff = gmax + grad(t);
        gmax2 = std::max(gmax2, grad(t));
      } else {
        if (upper(t)) continue;
        grad_diff = gmax - grad(t);
        gmax2 = std::max(gmax2, -grad(t));
      }
      if (grad_diff > 0) {
        double quad = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (quad <= 0) quad = kTau;
        const double obj = -grad_diff * grad_diff / quad;
        if (obj <= best_obj) { best_obj = obj; j = t; }
      }
    }
    if (gmax + gmax2 < tol || j < 0) { r.converged = true; break; }

    const double yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
    const double kij = yi * yj * kernel(i, j);
    const double old_i = alpha(i), old_j = alpha(j);
    if (yi != yj) {
      double quad = kernel(i, i) + kernel(j, j) + 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = diff; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = -diff; }
      }
      if (diff > 0) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = c - diff; }
      } else {
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = c + diff; }
      }
    } else {
      double quad = kernel(i, i) + kernel(j, j) - 2.0 * kij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = sum - c; }
      } else {
        if (alpha(j) < 0) { alpha(j) = 0; alpha(i) = sum; }
      }
      if (sum > c) {
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = sum - c; }
      } else {
        if (alpha(i) < 0) { alpha(i) = 0; alpha(j) = sum; }
      }
    }
    const double di = alpha(i) - old_i, dj = alpha(j) - old_j;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double yt = y[static_cast<std::size_t>(t)];
      grad(t) += yt * (yi * kernel(i, t) * di + yj * kernel(j, t) * dj);
    }
  }
  r.iterations = static_cast<int>(std::min<long>(iter, std::numeric_limits<int>::max()));

  // rho: mean of y_i G_i over free variables, else midpoint of the feasible range
  double ub = kInf, lb = -kInf, sum_free = 0;
  int n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yt = y[static_cast<std::size_t>(t)];
    const double yg = yt * grad(t);
    if (upper(t)) {
      if (yt < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (yt > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  r.bias = -rho;
  return r;
}

TrainedModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> labels,
                 const HyperParams& hp, std::uint64_t /*seed: every fit is deterministic*/) {
  hp.validate();
  if (static_cast<std::size_t>(x.rows()) != labels.size())
    throw InputError("fit: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(x.rows()) + " rows");
  if (!x.allFinite()) throw InputError("fit: non-finite feature value");
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw InputError("fit: training labels contain a single class");

  TrainedModel model;
  model.kind = kind;
  model.hyper = hp;
  model.classes.assign(distinct.begin(), distinct.end());
  model.feature_dim = static_cast<std::size_t>(x.cols());
  const std::vector<int> y = encode(labels, model.classes);
  const std::size_t kc = model.classes.size();
  switch (kind) {
    case ClassifierKind::KNN: model.params = fit_knn(x, y, hp); break;
    case ClassifierKind::GNB: model.params = fit_gnb(x, y, kc, hp); break;
    case ClassifierKind::LOGREG: model.params = fit_logreg(x, y, kc, hp, model.diagnostics); break;
    case ClassifierKind::LSVM: model.params = fit_svm(x, y, kc, hp, false, model.diagnostics); break;
    case ClassifierKind::GSVM: model.params = fit_svm(x, y, kc, hp, true, model.diagnostics); break;
    case ClassifierKind::LDA: model.params = fit_lda(x, y, kc, hp); break;
  }
  return model;
}

Matrix decision_scores(const TrainedModel& model, const Matrix& x) {
  if (static_cast<std::size_t>(x.cols()) != model.feature_dim)
    throw InputError("model expects " + std::to_string(model.feature_dim) + " features, got " +
                     std::to_string(x.cols()));
  return std::visit(
      [&](const auto& p) -> Matrix {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>) return knn_scores(p, x, model.classes.size());
        else if constexpr (std::is_same_v<P, GnbParams>) return gnb_scores(p, x);
        else if constexpr (std::is_same_v<P, LogRegParams>) return logreg_scores(p, x);
        else if constexpr (std::is_same_v<P, SvmParams>) return svm_scores(p, x);
        else return lda_scores(p, x);
      },
      model.params);
}

std::vector<int> predict(const TrainedModel& model, const Matrix& x) {
  const Matrix scores = decision_scores(model, x);
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

LatencyStats predict_latency(const TrainedModel& model, const Matrix& x, int repeats) {
  if (repeats < 3) throw ConfigError("predict_latency needs at least 3 repeats");
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repeats));
  for (int r = 0; r < repeats; ++r) {
    const auto start = Clock::now();
    const auto labels = predict(model, x);
    const auto stop = Clock::now();
    if (labels.size() != static_cast<std::size_t>(x.rows())) throw NumericError("prediction count mismatch");
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  LatencyStats s;
  s.repeats = repeats;
  s.min = *std::min_element(times.begin(), times.end());
  s.max = *std::max_element(times.begin(), times.end());
  s.median = median_in_place(times);
  return s;
}

// ---- serialization --------------------------------------------------------

nlohmann::json to_json(const HyperParams& hp) {
  nlohmann::json sigma = hp.svm_sigma.policy == MmdConfig::Sigma::Fixed
                             ? nlohmann::json{{"policy", "fixed"}, {"sigma", hp.svm_sigma.sigma}}
                             : nlohmann::json{{"policy", "median"}};
  return {{"knn_k", hp.knn_k},         {"knn_weighting", "uniform"},
          {"c", hp.c},                 {"svm_sigma", sigma},
          {"gnb_var_smoothing", hp.gnb_var_smoothing},
          {"lda_ridge", hp.lda_ridge}, {"max_iter", hp.max_iter},
          {"logreg_tol", hp.logreg_tol}, {"svm_tol", hp.svm_tol}};
}

HyperParams hyper_params_from_json(const nlohmann::json& j) {
  HyperParams hp;
  hp.knn_k = j.value("knn_k", hp.knn_k);
  hp.c = j.value("c", hp.c);
  if (j.contains("svm_sigma")) {
    const auto& s = j.at("svm_sigma");
    if (s.value("policy", std::string("median")) == "fixed") hp.svm_sigma = MmdConfig::fixed(s.at("sigma").get<double>());
  }
  hp.gnb_var_smoothing = j.value("gnb_var_smoothing", hp.gnb_var_smoothing);
  hp.lda_ridge = j.value("lda_ridge", hp.lda_ridge);
  hp.max_iter = j.value("max_iter", hp.max_iter);
  hp.logreg_tol = j.value("logreg_tol", hp.logreg_tol);
  hp.svm_tol = j.value("svm_tol", hp.svm_tol);
  hp.validate();
  return hp;
}

namespace {
constexpr int kModelFormatVersion = 1;
}

nlohmann::json to_json(const TrainedModel& model) {
  nlohmann::json params = std::visit(
      [](const auto& p) -> nlohmann::json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>)
          return {{"train_x", matrix_to_json(p.train_x)}, {"train_class", p.train_class}, {"k", p.k}};
        else if constexpr (std::is_same_v<P, GnbParams>)
          return {{"means", matrix_to_json(p.means)},
                  {"variances", matrix_to_json(p.variances)},
                  {"log_priors", vector_to_json(p.log_priors)}};
        else if constexpr (std::is_same_v<P, LogRegParams>)
          return {{"weights", matrix_to_json(p.weights)}, {"bias", vector_to_json(p.bias)}};
        else if constexpr (std::is_same_v<P, SvmParams>)
          return {{"gaussian", p.gaussian},
                  {"sigma", p.sigma},
                  {"center", vector_to_json(p.center)},
                  {"support_vectors", matrix_to_json(p.support_vectors)},
                  {"dual_coef", matrix_to_json(p.dual_coef)},
                  {"bias", vector_to_json(p.bias)}};
        else
          return {{"means", matrix_to_json(p.means)},
                  {"coef", matrix_to_json(p.coef)},
                  {"intercept", vector_to_json(p.intercept)}};
      },
      model.params);
  return {{"format_version", kModelFormatVersion},
          {"kind", std::string(to_string(model.kind))},
          {"hyperparameters", to_json(model.hyper)},
          {"classes", model.classes},
          {"feature_dim", model.feature_dim},
          {"params", params}};
}

TrainedModel model_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kModelFormatVersion)
    throw InputError("unsupported model format version");
  TrainedModel m;
  m.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
  m.hyper = hyper_params_from_json(j.at("hyperparameters"));
  m.classes = j.at("classes").get<std::vector<int>>();
  m.feature_dim = j.at("feature_dim").get<std::size_t>();
  const auto& p = j.at("params");
  const auto d = static_cast<Eigen::Index>(m.feature_dim);
  switch (m.kind) {
    case ClassifierKind::KNN:
      m.params = KnnParams{matrix_from_json(p.at("train_x"), d),
                           p.at("train_class").get<std::vector<int>>(), p.at("k").get<int>()};
      break;
    case ClassifierKind::GNB:
      m.params = GnbParams{matrix_from_json(p.at("means"), d), matrix_from_json(p.at("variances"), d),
                           vector_from_json(p.at("log_priors"))};
      break;
    case ClassifierKind::LOGREG:
      m.params = LogRegParams{matrix_from_json(p.at("weights"), d), vector_from_json(p.at("bias"))};
      break;
    case ClassifierKind::LSVM:
    case ClassifierKind::GSVM: {
      SvmParams s;
      s.gaussian = p.at("gaussian").get<bool>();
      s.sigma = p.at("sigma").get<double>();
      s.center = vector_from_json(p.at("center"));
      s.support_vectors = matrix_from_json(p.at("support_vectors"), d);
      s.bias = vector_from_json(p.at("bias"));
      s.dual_coef = matrix_from_json(p.at("dual_coef"), s.support_vectors.rows());
      if (s.dual_coef.rows() == 0) s.dual_coef.resize(s.bias.size(), 0);
      if (!s.gaussian) s.linear_weights = s.dual_coef * s.support_vectors;
      m.params = std::move(s);
      break;
    }
    case ClassifierKind::LDA:
      m.params = LdaParams{matrix_from_json(p.at("means"), d), matrix_from_json(p.at("coef"), d),
                           vector_from_json(p.at("intercept"))};
      break;
  }
  return m;
}

}  // namespace depsel
