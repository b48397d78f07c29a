#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depsel/depmeasure.hpp"
#include "json.hpp"

namespace depsel {

enum class ClassifierKind { KNN, GNB, LOGREG, LSVM, GSVM, LDA };

inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::KNN,  ClassifierKind::GNB,
                                                     ClassifierKind::LOGREG, ClassifierKind::LSVM,
                                                     ClassifierKind::GSVM, ClassifierKind::LDA};

std::string_view to_string(ClassifierKind k);
/// Table label: k-NN, G-NB, Log, L-SVM, G-SVM, LDA.
std::string_view display_name(ClassifierKind k);
ClassifierKind classifier_kind_from_string(std::string_view name);

struct HyperParams {
  int knn_k = 5;                 ///< uniform weighting
  double c = 1.0;                ///< shared by LOGREG and both SVMs
  MmdConfig svm_sigma;           ///< G-SVM bandwidth policy
  double gnb_var_smoothing = 1e-9;
  double lda_ridge = 1e-6;
  int max_iter = 1000;           ///< LOGREG iterations
  double logreg_tol = 1e-6;
  double svm_tol = 1e-3;

  void validate() const;
};

struct KnnParams {
  Matrix train_x;
  std::vector<int> train_class;  ///< index into TrainedModel::classes
  int k = 5;
};

struct GnbParams {
  Matrix means;      ///< K x d
  Matrix variances;  ///< K x d, smoothing included
  Vector log_priors;
};

struct LogRegParams {
  Matrix weights;  ///< K x d
  Vector bias;     ///< K
};

/// One-vs-rest machines sharing one support-vector set.
struct SvmParams {
  bool gaussian = false;
  double sigma = 0.0;        ///< kernel exp(-|a-b|^2 / sigma)
  Vector center;             ///< subtracted from inputs before kernel evaluation
  Matrix support_vectors;    ///< nsv x d (centred)
  Matrix dual_coef;          ///< K x nsv, alpha_i * y_i per machine
  Vector bias;               ///< K
  Matrix linear_weights;     ///< K x d, linear kernel only
};

struct LdaParams {
  Matrix means;      ///< K x d
  Matrix coef;       ///< K x d
  Vector intercept;  ///< K
};

struct FitDiagnostics {
  int iterations = 0;
  bool converged = true;
  double final_gradient_norm = 0.0;
  std::vector<double> objective_history;  ///< LOGREG only
};

struct TrainedModel {
  ClassifierKind kind = ClassifierKind::KNN;
  HyperParams hyper;
  std::vector<int> classes;  ///< sorted distinct training labels
  std::size_t feature_dim = 0;
  std::variant<KnnParams, GnbParams, LogRegParams, SvmParams, LdaParams> params;
  FitDiagnostics diagnostics;
};

TrainedModel fit(ClassifierKind kind, const Matrix& x, std::span<const int> labels,
                 const HyperParams& hp, std::uint64_t seed = 0);

/// Per-class scores (m x K): votes, log joint likelihoods, logits, decision
/// values or discriminants, depending on the kind.
Matrix decision_scores(const TrainedModel& model, const Matrix& x);

/// Arg-max of decision_scores; ties go to the earlier class in `classes`.
std::vector<int> predict(const TrainedModel& model, const Matrix& x);

struct LatencyStats {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  int repeats = 0;
};

/// Wall-clock statistics over `repeats` (>= 3) full predict calls.
LatencyStats predict_latency(const TrainedModel& model, const Matrix& x, int repeats);

/// Binary soft-margin SVM dual solved by SMO with second-order working set
/// selection, on a precomputed kernel matrix. Labels are +1 / -1.
struct SmoResult {
  Vector alpha;
  double bias = 0.0;  ///< f(x) = sum alpha_i y_i K(x_i, x) + bias
  int iterations = 0;
  bool converged = true;
};

SmoResult smo_solve(const Matrix& kernel, std::span<const double> y, double c, double tol,
                    long max_iter = 0);

/// Gaussian kernel matrix exp(-|a_i - b_j|^2 / sigma).
Matrix gaussian_kernel(const Matrix& a, const Matrix& b, double sigma);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HyperParams& hp);
HyperParams hyper_params_from_json(const nlohmann::json& j);

}  // namespace depsel
