#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fairmix/dataset.hpp"

namespace fairmix {

enum class ModelKind { rbf_svm, mlp, logistic };

std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view text);

struct PredictorSpec {
  ModelKind kind = ModelKind::rbf_svm;

  // RBF-SVM
  double C = 1.0;
  std::optional<double> gamma;  // unset: 1 / (n_features * variance of X)
  double svm_tolerance = 1e-3;
  int platt_folds = 3;

  // MLP
  int hidden_units = 100;
  double learning_rate = 1e-3;
  int epochs = 500;
  int batch_size = 32;
  int patience = 20;
  double min_improvement = 1e-6;

  // MLP and logistic regression
  double l2 = 1e-4;

  bool balanced_class_weight = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainingInfo {
  Index n_train = 0;
  std::array<Index, 2> class_counts{0, 0};
};

// Fitted binary classifier. Immutable; safe for concurrent prediction.
class TrainedPredictor {
 public:
  TrainedPredictor(PredictorSpec spec, Index n_features, TrainingInfo info)
      : spec_(std::move(spec)), n_features_(n_features), info_(info) {}
  virtual ~TrainedPredictor() = default;

  // n x 2 matrix of (P(y=0), P(y=1)).
  Matrix predict_proba(const Matrix& x) const;
  // argmax of predict_proba; ties go to class 1.
  Labels predict(const Matrix& x) const;

  const PredictorSpec& spec() const { return spec_; }
  Index n_features() const { return n_features_; }
  const TrainingInfo& info() const { return info_; }

 protected:
  virtual Vector positive_probability(const Matrix& x) const = 0;

 private:
  PredictorSpec spec_;
  Index n_features_;
  TrainingInfo info_;
};

using PredictorPtr = std::shared_ptr<const TrainedPredictor>;

// Throws FitError when y holds a single class or shapes disagree.
PredictorPtr fit(const PredictorSpec& spec, const Matrix& x, const Labels& y);

Labels labels_from_proba(const Matrix& proba);

// Shuffled assignment of rows to `k` folds, dealing each class round-robin so
// every fold receives a near-equal share of both labels.
std::vector<int> stratified_fold_assignment(const Labels& y, int k, std::uint64_t seed);

// Emits a fixed class with probability one. Used where a training split holds
// a single class and a real model cannot be fitted.
class ConstantPredictor final : public TrainedPredictor {
 public:
  ConstantPredictor(int label, Index n_features, TrainingInfo info);

 protected:
  Vector positive_probability(const Matrix& x) const override;

 private:
  int label_;
};

// ---------------------------------------------------------------------------

class RbfSvm final : public TrainedPredictor {
 public:
  static std::shared_ptr<const RbfSvm> train(const PredictorSpec& spec, const Matrix& x,
                                             const Labels& y);

  // Signed distance-like score, positive for class 1.
  Vector decision_function(const Matrix& x) const;

  double gamma() const { return gamma_; }
  double platt_a() const { return platt_a_; }
  double platt_b() const { return platt_b_; }
  Index n_support() const { return support_.rows(); }

  struct Dual {
    std::vector<Index> support;  // rows of the kernel with alpha > 0
    Vector coef;                 // alpha_i * y_i for each support row
    double rho = 0.0;
  };

  // SMO on the dual with second-order working-set selection.
  static Dual solve_dual(const Matrix& kernel, const Vector& y_signed, const Vector& upper,
                         double tolerance);

  RbfSvm(PredictorSpec spec, Index n_features, TrainingInfo info)
      : TrainedPredictor(std::move(spec), n_features, info) {}

 protected:
  Vector positive_probability(const Matrix& x) const override;

 private:
  Matrix support_;
  Vector coef_;
  double rho_ = 0.0;
  double gamma_ = 1.0;
  double platt_a_ = -1.0;
  double platt_b_ = 0.0;
};

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma);

// Platt's sigmoid fit, returning (A, B) with P(y=1|f) = 1 / (1 + exp(A f + B)).
std::pair<double, double> fit_platt_sigmoid(const Vector& decision, const Labels& y);
double platt_probability(double decision, double a, double b);

// ---------------------------------------------------------------------------

// One hidden tanh layer, two-way softmax output, cross-entropy loss with an
// L2 penalty on the weight matrices, trained by mini-batch Adam.
class Mlp final : public TrainedPredictor {
 public:
  static std::shared_ptr<const Mlp> train(const PredictorSpec& spec, const Matrix& x,
                                          const Labels& y);

  // Flat parameter layout: W1 (h x d, column-major), b1 (h), W2 (2 x h), b2 (2).
  static Index parameter_count(Index n_inputs, Index n_hidden);

  // Weighted mean cross-entropy plus (l2 / 2) * (|W1|^2 + |W2|^2). Writes the
  // gradient when `grad` is non-null.
  static double loss_and_gradient(const Vector& theta, Index n_inputs, Index n_hidden,
                                  const Matrix& x, const Labels& y, const Vector& weights,
                                  double l2, Vector* grad);

  static Vector initial_parameters(Index n_inputs, Index n_hidden, std::uint64_t seed);

  const Vector& parameters() const { return theta_; }
  int epochs_run() const { return epochs_run_; }
  double final_loss() const { return final_loss_; }

  Mlp(PredictorSpec spec, Index n_features, TrainingInfo info)
      : TrainedPredictor(std::move(spec), n_features, info) {}

 protected:
  Vector positive_probability(const Matrix& x) const override;

 private:
  Vector theta_;
  Index hidden_ = 0;
  int epochs_run_ = 0;
  double final_loss_ = 0.0;
};

// ---------------------------------------------------------------------------

// L2-regularized logistic regression solved by damped Newton iterations. The
// intercept is not penalized.
class LogisticRegression final : public TrainedPredictor {
 public:
  static std::shared_ptr<const LogisticRegression> train(const PredictorSpec& spec,
                                                         const Matrix& x, const Labels& y);

  LogisticRegression(PredictorSpec spec, Vector weights, double bias, TrainingInfo info = {});

  const Vector& weights() const { return weights_; }
  double bias() const { return bias_; }

 protected:
  Vector positive_probability(const Matrix& x) const override;

 private:
  Vector weights_;
  double bias_ = 0.0;
};

double sigmoid(double z);

}  // namespace fairmix
