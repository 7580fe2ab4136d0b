#include <doctest.h>

#include <cmath>
#include <random>

#include "fairmix/error.hpp"
#include "fairmix/models.hpp"

using namespace fairmix;

namespace {

void blobs(std::uint64_t seed, Matrix& x, Labels& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  x.resize(40, 2);
  y.resize(40);
  for (Index i = 0; i < 40; ++i) {
    const double c = i < 20 ? 0.0 : 4.0;
    x(i, 0) = c + noise(rng);
    x(i, 1) = c + noise(rng);
    y(i) = i < 20 ? 0 : 1;
  }
}

double training_accuracy(const TrainedPredictor& m, const Matrix& x, const Labels& y) {
  return (m.predict(x).array() == y.array()).cast<double>().mean();
}

void check_probabilities(const Matrix& p) {
  for (Index r = 0; r < p.rows(); ++r) {
    CHECK(p(r, 0) >= 0.0);
    CHECK(p(r, 1) <= 1.0);
    CHECK(std::abs(p(r, 0) + p(r, 1) - 1.0) <= 1e-9);
  }
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("svm separates two blobs") {
  Matrix x;
  Labels y;
  blobs(17, x, y);
  const auto m = fit(PredictorSpec{.kind = ModelKind::rbf_svm}, x, y);
  CHECK(training_accuracy(*m, x, y) >= 0.95);
  check_probabilities(m->predict_proba(x));
}

TEST_CASE("svm dual matches the libsvm reference") {
  Matrix x(10, 2);
  x << 0.0, 0.0, 1.0, 0.2, 0.3, 1.1, 0.9, 0.8, 2.0, 2.1, 2.5, 1.6, 1.8, 2.7, 3.0, 3.0, 1.2, 1.4, 1.6, 1.1;
  Labels y(10);
  y << 0, 0, 0, 0, 1, 1, 1, 1, 0, 1;
  Matrix q(4, 2);
  q << 0.5, 0.5, 2.2, 2.2, 1.4, 1.3, -1.0, 3.0;
  PredictorSpec spec{.kind = ModelKind::rbf_svm, .C = 1.0, .gamma = 0.5, .svm_tolerance = 1e-10};
  const auto m = RbfSvm::train(spec, x, y);
  const Vector dec = m->decision_function(q);
  const double expected[] = {-1.220904190976453, 1.1452150916562276, -0.1720941893887632,
                             0.07675871261325748};
  for (int i = 0; i < 4; ++i) CHECK(std::abs(dec(i) - expected[i]) < 1e-7);
  CHECK(m->n_support() == 10);
  CHECK(m->gamma() == 0.5);
}

TEST_CASE("platt sigmoid matches a direct minimiser") {
  Vector f(10);
  f << -2.1, -1.3, -0.4, 0.2, -0.7, 0.9, 1.5, 2.2, 0.1, -0.2;
  Labels y(10);
  y << 0, 0, 0, 0, 1, 1, 1, 1, 1, 0;
  const auto [a, b] = fit_platt_sigmoid(f, y);
  CHECK(std::abs(a - (-0.9295783141604799)) < 1e-6);
  CHECK(std::abs(b - 0.006570594199035718) < 1e-6);
  CHECK(platt_probability(0.0, a, b) == doctest::Approx(1.0 / (1.0 + std::exp(b))));
}

TEST_CASE("gamma scale rule") {
  Matrix x(4, 2);
  x << 0, 0, 1, 0, 0, 1, 1, 1;
  Labels y(4);
  y << 0, 1, 1, 0;
  const auto m = RbfSvm::train(PredictorSpec{.kind = ModelKind::rbf_svm}, x, y);
  // variance of all entries is 0.25, two features
  CHECK(m->gamma() == doctest::Approx(2.0));
}

TEST_CASE("logistic regression matches a direct minimiser") {
  Matrix x(8, 2);
  x << 0.5, 1.0, 1.5, -0.5, -1.0, 0.3, 2.0, 2.0, -0.3, -1.2, 0.8, 0.1, -2.0, 1.5, 1.1, -1.4;
  Labels y(8);
  y << 1, 1, 0, 1, 0, 1, 0, 0;
  const auto m = LogisticRegression::train(PredictorSpec{.kind = ModelKind::logistic, .l2 = 0.1}, x, y);
  CHECK(std::abs(m->weights()(0) - 1.2203843087192767) < 1e-7);
  CHECK(std::abs(m->weights()(1) - 0.8434064333458193) < 1e-7);
  CHECK(std::abs(m->bias() - (-0.4534059705496662)) < 1e-7);
}

TEST_CASE("logistic edge cases") {
  const LogisticRegression zero(PredictorSpec{.kind = ModelKind::logistic}, Vector::Zero(3), 0.0);
  const auto p = zero.predict_proba(Matrix::Random(5, 3));
  CHECK((p.array() == 0.5).all());
  CHECK((zero.predict(Matrix::Random(5, 3)).array() == 1).all());

  Matrix x(6, 1);
  x << -3, -2, -1, 1, 2, 3;
  Labels y(6);
  y << 0, 0, 0, 1, 1, 1;
  const auto m = fit(PredictorSpec{.kind = ModelKind::logistic}, x, y);
  CHECK(training_accuracy(*m, x, y) == 1.0);
}

TEST_CASE("mlp solves xor") {
  Matrix x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  Labels y(4);
  y << 0, 1, 1, 0;
  const auto m = Mlp::train(PredictorSpec{.kind = ModelKind::mlp, .hidden_units = 8, .epochs = 2000, .seed = 1}, x, y);
  CHECK(training_accuracy(*m, x, y) == 1.0);
  CHECK(m->epochs_run() <= 2000);
}

TEST_CASE("mlp gradient matches central differences") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal;
  const Index d = 3, h = 4;
  Matrix x(5, d);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < d; ++j) x(i, j) = normal(rng);
  Labels y(5);
  y << 0, 1, 1, 0, 1;
  const Vector w = Vector::Ones(5);
  Vector theta = Mlp::initial_parameters(d, h, 7);
  for (Index i = 0; i < theta.size(); ++i) theta(i) += 0.3 * normal(rng);

  Vector grad;
  Mlp::loss_and_gradient(theta, d, h, x, y, w, 0.01, &grad);
  REQUIRE(grad.size() == Mlp::parameter_count(d, h));
  const double eps = 1e-6;
  for (Index i = 0; i < theta.size(); ++i) {
    Vector tp = theta, tm = theta;
    tp(i) += eps;
    tm(i) -= eps;
    const double numeric = (Mlp::loss_and_gradient(tp, d, h, x, y, w, 0.01, nullptr) -
                            Mlp::loss_and_gradient(tm, d, h, x, y, w, 0.01, nullptr)) /
                           (2.0 * eps);
    const double denom = std::max({std::abs(numeric), std::abs(grad(i)), 1e-8});
    CHECK(std::abs(numeric - grad(i)) / denom < 1e-4);
  }
}

TEST_CASE("predictor contract") {
  Matrix x;
  Labels y;
  blobs(3, x, y);
  for (auto kind : {ModelKind::rbf_svm, ModelKind::mlp, ModelKind::logistic}) {
    PredictorSpec spec{.kind = kind, .hidden_units = 6, .epochs = 50, .seed = 4};
    const auto a = fit(spec, x, y);
    const auto b = fit(spec, x, y);
    const Matrix q = Matrix::Random(7, 2) * 3.0;
    CHECK(a->predict_proba(q) == b->predict_proba(q));
    const Matrix p = a->predict_proba(q);
    check_probabilities(p);
    CHECK(a->predict(q) == labels_from_proba(p));
    CHECK_THROWS_AS(a->predict_proba(Matrix::Zero(2, 3)), ShapeError);
  }
  CHECK_THROWS_AS(fit(PredictorSpec{}, x, Labels::Zero(40)), FitError);
}

TEST_CASE("argmax tie rule") {
  Matrix p(3, 2);
  p << 0.3, 0.7, 0.5, 0.5, 0.8, 0.2;
  const Labels l = labels_from_proba(p);
  CHECK(l(0) == 1);
  CHECK(l(1) == 1);
  CHECK(l(2) == 0);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(PredictorSpec{.C = 0.0}.validate(), ConfigError);
  CHECK_THROWS_AS(PredictorSpec{.gamma = -1.0}.validate(), ConfigError);
  CHECK_THROWS_AS(PredictorSpec{.hidden_units = 0}.validate(), ConfigError);
  CHECK_THROWS_AS(PredictorSpec{.epochs = 0}.validate(), ConfigError);
  CHECK_THROWS_AS(parse_model_kind("lstm"), ConfigError);
}

TEST_CASE("stratified fold assignment") {
  Labels y(10);
  y << 0, 0, 0, 0, 0, 0, 1, 1, 1, 1;
  const auto f = stratified_fold_assignment(y, 2, 9);
  int zeros[2] = {0, 0};
  int ones[2] = {0, 0};
  for (Index i = 0; i < y.size(); ++i) (y(i) ? ones : zeros)[f[static_cast<std::size_t>(i)]]++;
  CHECK(zeros[0] == 3);
  CHECK(ones[0] == 2);
}

}  // TEST_SUITE
