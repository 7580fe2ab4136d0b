#include "fairmix/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairmix/error.hpp"
#include "fairmix/random.hpp"

namespace fairmix {

std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::rbf_svm: return "rbf_svm";
    case ModelKind::mlp: return "mlp";
    case ModelKind::logistic: return "logistic";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "rbf_svm") return ModelKind::rbf_svm;
  if (text == "mlp") return ModelKind::mlp;
  if (text == "logistic") return ModelKind::logistic;
  throw ConfigError("unknown model kind '" + std::string(text) + "'");
}

void PredictorSpec::validate() const {
  if (!(C > 0.0)) throw ConfigError("model.C must be positive");
  if (gamma && !(*gamma > 0.0)) throw ConfigError("model.gamma must be positive or 'scale'");
  if (hidden_units < 1) throw ConfigError("model.hidden_units must be at least 1");
  if (epochs < 1) throw ConfigError("model.epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("model.batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("model.learning_rate must be positive");
  if (!(l2 >= 0.0)) throw ConfigError("model.l2 must be non-negative");
  if (platt_folds < 2) throw ConfigError("model.platt_folds must be at least 2");
  if (!(svm_tolerance > 0.0)) throw ConfigError("model.svm_tolerance must be positive");
}

Labels labels_from_proba(const Matrix& proba) {
  Labels out(proba.rows());
  for (Index r = 0; r < proba.rows(); ++r) out(r) = proba(r, 1) >= proba(r, 0) ? 1 : 0;
  return out;
}

Matrix TrainedPredictor::predict_proba(const Matrix& x) const {
  if (x.cols() != n_features_) {
    throw ShapeError("model trained on " + std::to_string(n_features_) +
                     " features, got " + std::to_string(x.cols()));
  }
  const Vector p1 = positive_probability(x);
  Matrix out(x.rows(), 2);
  for (Index r = 0; r < x.rows(); ++r) {
    const double p = std::clamp(p1(r), 0.0, 1.0);
    out(r, 0) = 1.0 - p;
    out(r, 1) = p;
  }
  return out;
}

Labels TrainedPredictor::predict(const Matrix& x) const {
  return labels_from_proba(predict_proba(x));
}

ConstantPredictor::ConstantPredictor(int label, Index n_features, TrainingInfo info)
    : TrainedPredictor(PredictorSpec{}, n_features, info), label_(label) {}

Vector ConstantPredictor::positive_probability(const Matrix& x) const {
  return Vector::Constant(x.rows(), label_ == 1 ? 1.0 : 0.0);
}

namespace {

TrainingInfo check_training_data(const Matrix& x, const Labels& y) {
  if (x.rows() != y.size()) {
    throw FitError("X has " + std::to_string(x.rows()) + " rows but y has " +
                   std::to_string(y.size()) + " labels");
  }
  if (x.rows() < 2) throw FitError("need at least two training rows");
  if (x.cols() < 1) throw FitError("need at least one feature");
  TrainingInfo info;
  info.n_train = x.rows();
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0 && y(i) != 1) throw FitError("labels must be 0 or 1");
    ++info.class_counts[static_cast<std::size_t>(y(i))];
  }
  if (info.class_counts[0] == 0 || info.class_counts[1] == 0) {
    throw FitError("training labels contain a single class");
  }
  if (!x.allFinite()) throw FitError("training features must be finite");
  return info;
}

Vector sample_weights(const PredictorSpec& spec, const Labels& y, const TrainingInfo& info) {
  Vector w = Vector::Ones(y.size());
  if (spec.balanced_class_weight) {
    for (Index i = 0; i < y.size(); ++i) {
      w(i) = static_cast<double>(info.n_train) /
             (2.0 * static_cast<double>(info.class_counts[static_cast<std::size_t>(y(i))]));
    }
  }
  return w;
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---------------------------------------------------------------------------
// RBF-SVM

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma) {
  const Vector na = a.rowwise().squaredNorm();
  const Vector nb = b.rowwise().squaredNorm();
  Matrix k = -2.0 * (a * b.transpose());
  k.colwise() += na;
  k.rowwise() += nb.transpose();
  return (-gamma * k.array().max(0.0)).exp().matrix();
}

RbfSvm::Dual RbfSvm::solve_dual(const Matrix& kernel, const Vector& y, const Vector& upper,
                                double tolerance) {
  const Index n = kernel.rows();
  constexpr double tau = 1e-12;
  Vector alpha = Vector::Zero(n);
  Vector grad = -Vector::Ones(n);  // Q alpha - e

  const auto is_upper = [&](Index t) { return alpha(t) >= upper(t); };
  const auto is_lower = [&](Index t) { return alpha(t) <= 0.0; };
  const auto in_up = [&](Index t) { return y(t) > 0 ? !is_upper(t) : !is_lower(t); };
  const auto in_low = [&](Index t) { return y(t) > 0 ? !is_lower(t) : !is_upper(t); };

  const long max_iter = std::max<long>(100000, 100L * static_cast<long>(n));
  for (long iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Index i = -1;
    for (Index t = 0; t < n; ++t) {
      if (in_up(t) && -y(t) * grad(t) >= gmax) {
        gmax = -y(t) * grad(t);
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    Index j = -1;
    for (Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmax2 = std::max(gmax2, y(t) * grad(t));
      if (i < 0) continue;
      const double b = gmax + y(t) * grad(t);
      if (b > 0.0) {
        double a = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
        if (a <= 0.0) a = tau;
        const double obj = -(b * b) / a;
        if (obj <= best) {
          best = obj;
          j = t;
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) break;

    const double ci = upper(i);
    const double cj = upper(j);
    const double old_i = alpha(i);
    const double old_j = alpha(j);
    double quad = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    if (quad <= 0.0) quad = tau;
    double ai = old_i;
    double aj = old_j;
    if (y(i) != y(j)) {
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > ci - cj) {
        if (ai > ci) { ai = ci; aj = ci - diff; }
      } else {
        if (aj > cj) { aj = cj; ai = cj + diff; }
      }
    } else {
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) { ai = ci; aj = sum - ci; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > cj) {
        if (aj > cj) { aj = cj; ai = sum - cj; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    alpha(i) = ai;
    alpha(j) = aj;
    const double di = (ai - old_i) * y(i);
    const double dj = (aj - old_j) * y(j);
    // Q_ti = y_t y_i K_ti
    grad.array() += y.array() * (kernel.col(i).array() * di + kernel.col(j).array() * dj);
  }

  // Offset from the free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  Index n_free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = y(t) * grad(t);
    if (is_upper(t)) {
      if (y(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (is_lower(t)) {
      if (y(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  Dual dual;
  dual.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);

  for (Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0) dual.support.push_back(t);
  }
  dual.coef.resize(static_cast<Index>(dual.support.size()));
  for (std::size_t k = 0; k < dual.support.size(); ++k) {
    dual.coef(static_cast<Index>(k)) = alpha(dual.support[k]) * y(dual.support[k]);
  }
  return dual;
}

namespace {

struct SvmFit {
  std::vector<Index> support;
  Vector coef;
  double rho = 0.0;
};

SvmFit train_svm_on(const Matrix& kernel, const std::vector<Index>& rows, const Labels& y,
                    const PredictorSpec& spec, const Vector& weights) {
  const auto n = static_cast<Index>(rows.size());
  Matrix k(n, n);
  Vector ys(n);
  Vector upper(n);
  for (Index a = 0; a < n; ++a) {
    ys(a) = y(rows[static_cast<std::size_t>(a)]) == 1 ? 1.0 : -1.0;
    upper(a) = spec.C * weights(rows[static_cast<std::size_t>(a)]);
    for (Index b = 0; b < n; ++b) k(a, b) = kernel(rows[static_cast<std::size_t>(a)], rows[static_cast<std::size_t>(b)]);
  }
  const auto dual = RbfSvm::solve_dual(k, ys, upper, spec.svm_tolerance);
  SvmFit fit;
  fit.coef = dual.coef;
  fit.rho = dual.rho;
  for (auto s : dual.support) fit.support.push_back(rows[static_cast<std::size_t>(s)]);
  return fit;
}

double svm_decision(const Matrix& kernel, Index row, const SvmFit& fit) {
  double f = -fit.rho;
  for (std::size_t s = 0; s < fit.support.size(); ++s) {
    f += fit.coef(static_cast<Index>(s)) * kernel(row, fit.support[s]);
  }
  return f;
}

}  // namespace

std::vector<int> stratified_fold_assignment(const Labels& y, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> fold(static_cast<std::size_t>(y.size()), 0);
  std::size_t next = 0;
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<Index> idx;
    for (Index i = 0; i < y.size(); ++i) {
      if (y(i) == cls) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (auto i : idx) fold[static_cast<std::size_t>(i)] = static_cast<int>(next++ % static_cast<std::size_t>(k));
  }
  return fold;
}

double platt_probability(double decision, double a, double b) {
  const double fapb = decision * a + b;
  if (fapb >= 0.0) return std::exp(-fapb) / (1.0 + std::exp(-fapb));
  return 1.0 / (1.0 + std::exp(fapb));
}

std::pair<double, double> fit_platt_sigmoid(const Vector& dec, const Labels& y) {
  const Index n = dec.size();
  double prior1 = 0.0;
  for (Index i = 0; i < n; ++i) prior1 += y(i) == 1 ? 1.0 : 0.0;
  const double prior0 = static_cast<double>(n) - prior1;

  constexpr int max_iter = 100;
  constexpr double min_step = 1e-10;
  constexpr double sigma = 1e-12;
  constexpr double eps = 1e-5;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  Vector t(n);
  for (Index i = 0; i < n; ++i) t(i) = y(i) == 1 ? hi : lo;

  const auto objective = [&](double a, double b) {
    double f = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double fapb = dec(i) * a + b;
      if (fapb >= 0.0) {
        f += t(i) * fapb + std::log1p(std::exp(-fapb));
      } else {
        f += (t(i) - 1.0) * fapb + std::log1p(std::exp(fapb));
      }
    }
    return f;
  };

  double a = 0.0;
  double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int iter = 0; iter < max_iter; ++iter) {
    double h11 = sigma;
    double h22 = sigma;
    double h21 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double fapb = dec(i) * a + b;
      double p = 0.0;
      double q = 0.0;
      if (fapb >= 0.0) {
        p = std::exp(-fapb) / (1.0 + std::exp(-fapb));
        q = 1.0 / (1.0 + std::exp(-fapb));
      } else {
        p = 1.0 / (1.0 + std::exp(fapb));
        q = std::exp(fapb) / (1.0 + std::exp(fapb));
      }
      const double d2 = p * q;
      h11 += dec(i) * dec(i) * d2;
      h22 += d2;
      h21 += dec(i) * d2;
      const double d1 = t(i) - p;
      g1 += dec(i) * d1;
      g2 += d1;
    }
    if (std::abs(g1) < eps && std::abs(g2) < eps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= min_step) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 0.0001 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < min_step) break;
  }
  return {a, b};
}

std::shared_ptr<const RbfSvm> RbfSvm::train(const PredictorSpec& spec, const Matrix& x,
                                            const Labels& y) {
  spec.validate();
  const TrainingInfo info = check_training_data(x, y);
  auto model = std::make_shared<RbfSvm>(spec, x.cols(), info);

  if (spec.gamma) {
    model->gamma_ = *spec.gamma;
  } else {
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    model->gamma_ = var > 0.0 ? 1.0 / (static_cast<double>(x.cols()) * var) : 1.0;
  }
  const Matrix kernel = rbf_kernel(x, x, model->gamma_);
  const Vector weights = sample_weights(spec, y, info);

  std::vector<Index> all(static_cast<std::size_t>(x.rows()));
  std::iota(all.begin(), all.end(), Index{0});
  const SvmFit full = train_svm_on(kernel, all, y, spec, weights);

  // Out-of-fold decision values for the probability sigmoid.
  const int k = std::min<int>(spec.platt_folds, static_cast<int>(x.rows()));
  const auto fold = stratified_fold_assignment(y, k, derive_seed(spec.seed, "platt"));
  Vector dec(x.rows());
  for (int f = 0; f < k; ++f) {
    std::vector<Index> train_rows;
    std::vector<Index> test_rows;
    for (Index i = 0; i < x.rows(); ++i) {
      (fold[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    }
    if (test_rows.empty()) continue;
    int has0 = 0;
    int has1 = 0;
    for (auto r : train_rows) (y(r) == 1 ? has1 : has0) = 1;
    if (!(has0 && has1)) {
      for (auto r : test_rows) dec(r) = has1 ? 1.0 : (has0 ? -1.0 : 0.0);
      continue;
    }
    const SvmFit part = train_svm_on(kernel, train_rows, y, spec, weights);
    for (auto r : test_rows) dec(r) = svm_decision(kernel, r, part);
  }
  std::tie(model->platt_a_, model->platt_b_) = fit_platt_sigmoid(dec, y);

  model->support_.resize(static_cast<Index>(full.support.size()), x.cols());
  for (std::size_t s = 0; s < full.support.size(); ++s) {
    model->support_.row(static_cast<Index>(s)) = x.row(full.support[s]);
  }
  model->coef_ = full.coef;
  model->rho_ = full.rho;
  return model;
}

Vector RbfSvm::decision_function(const Matrix& x) const {
  if (x.cols() != n_features()) {
    throw ShapeError("model trained on " + std::to_string(n_features()) + " features, got " +
                     std::to_string(x.cols()));
  }
  if (support_.rows() == 0) return Vector::Constant(x.rows(), -rho_);
  return (rbf_kernel(x, support_, gamma_) * coef_).array() - rho_;
}

Vector RbfSvm::positive_probability(const Matrix& x) const {
  const Vector dec = decision_function(x);
  Vector p(dec.size());
  for (Index i = 0; i < dec.size(); ++i) p(i) = platt_probability(dec(i), platt_a_, platt_b_);
  return p;
}

// ---------------------------------------------------------------------------
// MLP

Index Mlp::parameter_count(Index d, Index h) { return h * d + h + 2 * h + 2; }

Vector Mlp::initial_parameters(Index d, Index h, std::uint64_t seed) {
  Rng rng(seed);
  Vector theta = Vector::Zero(parameter_count(d, h));
  const double lim1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(h + 2));
  std::uniform_real_distribution<double> u1(-lim1, lim1);
  std::uniform_real_distribution<double> u2(-lim2, lim2);
  Index p = 0;
  for (Index i = 0; i < h * d; ++i) theta(p++) = u1(rng);
  p += h;
  for (Index i = 0; i < 2 * h; ++i) theta(p++) = u2(rng);
  return theta;
}

double Mlp::loss_and_gradient(const Vector& theta, Index d, Index h, const Matrix& x,
                              const Labels& y, const Vector& weights, double l2, Vector* grad) {
  using Map = Eigen::Map<const Matrix>;
  using VMap = Eigen::Map<const Vector>;
  const Map w1(theta.data(), h, d);
  const VMap b1(theta.data() + h * d, h);
  const Map w2(theta.data() + h * d + h, 2, h);
  const VMap b2(theta.data() + h * d + h + 2 * h, 2);

  const Index n = x.rows();
  const double wsum = weights.sum();
  const Matrix hidden = ((x * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
  const Matrix logits = (hidden * w2.transpose()).rowwise() + b2.transpose();

  Matrix prob(n, 2);
  double loss = 0.0;
  for (Index r = 0; r < n; ++r) {
    const double m = logits.row(r).maxCoeff();
    const double e0 = std::exp(logits(r, 0) - m);
    const double e1 = std::exp(logits(r, 1) - m);
    const double lse = m + std::log(e0 + e1);
    prob(r, 0) = e0 / (e0 + e1);
    prob(r, 1) = e1 / (e0 + e1);
    loss += weights(r) * (lse - logits(r, y(r)));
  }
  loss /= wsum;
  loss += 0.5 * l2 * (w1.squaredNorm() + w2.squaredNorm());

  if (grad != nullptr) {
    grad->resize(theta.size());
    Matrix dz2 = prob;
    for (Index r = 0; r < n; ++r) {
      dz2(r, y(r)) -= 1.0;
      dz2.row(r) *= weights(r) / wsum;
    }
    Eigen::Map<Matrix> gw1(grad->data(), h, d);
    Eigen::Map<Vector> gb1(grad->data() + h * d, h);
    Eigen::Map<Matrix> gw2(grad->data() + h * d + h, 2, h);
    Eigen::Map<Vector> gb2(grad->data() + h * d + h + 2 * h, 2);
    gw2 = dz2.transpose() * hidden + l2 * w2;
    gb2 = dz2.colwise().sum().transpose();
    const Matrix dz1 = ((dz2 * w2).array() * (1.0 - hidden.array().square())).matrix();
    gw1 = dz1.transpose() * x + l2 * w1;
    gb1 = dz1.colwise().sum().transpose();
  }
  return loss;
}

std::shared_ptr<const Mlp> Mlp::train(const PredictorSpec& spec, const Matrix& x,
                                      const Labels& y) {
  spec.validate();
  const TrainingInfo info = check_training_data(x, y);
  auto model = std::make_shared<Mlp>(spec, x.cols(), info);
  const Index d = x.cols();
  const Index h = spec.hidden_units;
  model->hidden_ = h;
  model->theta_ = initial_parameters(d, h, derive_seed(spec.seed, "mlp-init"));
  const Vector weights = sample_weights(spec, y, info);

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  Vector m1 = Vector::Zero(model->theta_.size());
  Vector m2 = Vector::Zero(model->theta_.size());
  Vector grad;
  long step = 0;

  Rng rng(derive_seed(spec.seed, "mlp-shuffle"));
  const Index n = x.rows();
  const Index batch = std::min<Index>(spec.batch_size, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (Index start = 0; start < n; start += batch) {
      const Index len = std::min(batch, n - start);
      Matrix xb(len, d);
      Labels yb(len);
      Vector wb(len);
      for (Index k = 0; k < len; ++k) {
        const Index r = order[static_cast<std::size_t>(start + k)];
        xb.row(k) = x.row(r);
        yb(k) = y(r);
        wb(k) = weights(r);
      }
      const double loss =
          loss_and_gradient(model->theta_, d, h, xb, yb, wb, spec.l2, &grad);
      epoch_loss += loss * static_cast<double>(len);

      ++step;
      m1 = beta1 * m1 + (1.0 - beta1) * grad;
      m2 = beta2 * m2 + (1.0 - beta2) * grad.cwiseProduct(grad);
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      model->theta_.array() -=
          spec.learning_rate * (m1.array() / c1) / ((m2.array() / c2).sqrt() + eps);
    }
    epoch_loss /= static_cast<double>(n);
    model->epochs_run_ = epoch + 1;
    model->final_loss_ = epoch_loss;
    if (epoch_loss > best - spec.min_improvement) {
      if (++stale >= spec.patience) break;
    } else {
      stale = 0;
    }
    best = std::min(best, epoch_loss);
  }
  return model;
}

Vector Mlp::positive_probability(const Matrix& x) const {
  const Index d = n_features();
  const Index h = hidden_;
  using Map = Eigen::Map<const Matrix>;
  using VMap = Eigen::Map<const Vector>;
  const Map w1(theta_.data(), h, d);
  const VMap b1(theta_.data() + h * d, h);
  const Map w2(theta_.data() + h * d + h, 2, h);
  const VMap b2(theta_.data() + h * d + h + 2 * h, 2);
  const Matrix hidden = ((x * w1.transpose()).rowwise() + b1.transpose()).array().tanh().matrix();
  const Matrix logits = (hidden * w2.transpose()).rowwise() + b2.transpose();
  // softmax over two classes = sigmoid of the logit difference
  Vector p(x.rows());
  for (Index r = 0; r < x.rows(); ++r) p(r) = sigmoid(logits(r, 1) - logits(r, 0));
  return p;
}

// ---------------------------------------------------------------------------
// Logistic regression

LogisticRegression::LogisticRegression(PredictorSpec spec, Vector weights, double bias,
                                       TrainingInfo info)
    : TrainedPredictor(std::move(spec), weights.size(), info),
      weights_(std::move(weights)),
      bias_(bias) {}

std::shared_ptr<const LogisticRegression> LogisticRegression::train(const PredictorSpec& spec,
                                                                    const Matrix& x,
                                                                    const Labels& y) {
  spec.validate();
  const TrainingInfo info = check_training_data(x, y);
  const Index n = x.rows();
  const Index d = x.cols();
  const Vector sw = sample_weights(spec, y, info);
  const double wsum = sw.sum();

  // theta = (w, b); design matrix gets a trailing column of ones.
  Matrix design(n, d + 1);
  design.leftCols(d) = x;
  design.col(d).setOnes();
  Vector penalty = Vector::Constant(d + 1, spec.l2);
  penalty(d) = 0.0;

  const auto objective = [&](const Vector& theta) {
    const Vector z = design * theta;
    double f = 0.0;
    for (Index i = 0; i < n; ++i) {
      // log(1 + exp(-s z)) with s = +-1
      const double m = y(i) == 1 ? -z(i) : z(i);
      f += sw(i) * (m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)));
    }
    return f / wsum + 0.5 * theta.cwiseProduct(penalty).dot(theta);
  };

  Vector theta = Vector::Zero(d + 1);
  double fval = objective(theta);
  for (int iter = 0; iter < 200; ++iter) {
    const Vector z = design * theta;
    Vector resid(n);
    Vector curv(n);
    for (Index i = 0; i < n; ++i) {
      const double p = sigmoid(z(i));
      resid(i) = sw(i) * (p - static_cast<double>(y(i))) / wsum;
      curv(i) = sw(i) * p * (1.0 - p) / wsum;
    }
    const Vector grad = design.transpose() * resid + penalty.cwiseProduct(theta);
    if (grad.lpNorm<Eigen::Infinity>() < 1e-10) break;
    Matrix hess = design.transpose() * curv.asDiagonal() * design;
    hess.diagonal() += penalty;
    hess.diagonal().array() += 1e-10;
    const Vector dir = -hess.ldlt().solve(grad);
    double step = 1.0;
    const double slope = grad.dot(dir);
    bool moved = false;
    while (step > 1e-12) {
      const Vector cand = theta + step * dir;
      const double fc = objective(cand);
      if (fc <= fval + 1e-4 * step * slope) {
        theta = cand;
        fval = fc;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return std::make_shared<LogisticRegression>(spec, theta.head(d), theta(d), info);
}

Vector LogisticRegression::positive_probability(const Matrix& x) const {
  const Vector z = (x * weights_).array() + bias_;
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

// ---------------------------------------------------------------------------

PredictorPtr fit(const PredictorSpec& spec, const Matrix& x, const Labels& y) {
  switch (spec.kind) {
    case ModelKind::rbf_svm: return RbfSvm::train(spec, x, y);
    case ModelKind::mlp: return Mlp::train(spec, x, y);
    case ModelKind::logistic: return LogisticRegression::train(spec, x, y);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace fairmix
