#include "doctest.h"
#include "oracles.hpp"

#include "xcca/classify.hpp"

using namespace xcca;

namespace {

struct Labeled {
  Matrix x;
  std::vector<int> y;
};

/// Two Gaussian blobs along a fixed random direction; `pos_share` of rows are +1.
Labeled blobs(Index n, Index d, double separation, double pos_share, std::uint64_t seed) {
  std::mt19937_64 dir_rng(1234);
  const Vector dir = oracle::random_matrix(d, 1, dir_rng).col(0).normalized();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Labeled out{oracle::random_matrix(n, d, rng), std::vector<int>(static_cast<std::size_t>(n))};
  for (Index i = 0; i < n; ++i) {
    const int y = unit(rng) < pos_share ? 1 : -1;
    out.y[static_cast<std::size_t>(i)] = y;
    out.x.row(i) += (0.5 * separation * y) * dir.transpose();
  }
  out.x.array() += 0.7;
  return out;
}

double objective(const Labeled& d, const ClassifierModel& m, double c) {
  return oracle::svm_primal(d.x, d.y, m.w, m.b, c, m.weight_pos, m.weight_neg);
}

}  // namespace

TEST_CASE("svm approaches the exact weighted optimum") {
  for (double pos_share : {0.5, 0.2}) {
    const Labeled d = blobs(200, 5, 2.0, pos_share, 10);
    const SvmParams params{1.0, 200, 3, true};
    const ClassifierModel m = train_svm(d.x, d.y, params);
    const auto exact = oracle::smo_svm(d.x, d.y, params.c, m.weight_pos, m.weight_neg);
    const double best = oracle::svm_primal(d.x, d.y, exact.w, exact.b, params.c, m.weight_pos, m.weight_neg);
    CHECK(objective(d, m, params.c) <= best * 1.02);
    const auto pred = predict(m, d.x);
    std::size_t agree = 0;
    for (Index i = 0; i < d.x.rows(); ++i) agree += pred[static_cast<std::size_t>(i)] == (d.x.row(i).dot(exact.w) + exact.b >= 0 ? 1 : -1);
    CHECK(agree >= 196);
  }
}

TEST_CASE("balanced weights follow inverse class frequency") {
  const Labeled d = blobs(100, 3, 1.0, 0.2, 4);
  const auto pos = static_cast<double>(std::count(d.y.begin(), d.y.end(), 1));
  const ClassifierModel m = train_svm(d.x, d.y, {1.0, 20, 0, true});
  CHECK(m.weight_pos == doctest::Approx(100.0 / (2.0 * pos)));
  CHECK(m.weight_neg == doctest::Approx(100.0 / (2.0 * (100.0 - pos))));
  const ClassifierModel plain = train_svm(d.x, d.y, {1.0, 20, 0, false});
  CHECK(plain.weight_pos == 1.0);
  CHECK(plain.weight_neg == 1.0);
}

TEST_CASE("class weights are equivalent to duplicating the minority class") {
  // 10 positives, 30 negatives; tripling the positives equalizes the classes.
  Labeled d = blobs(40, 3, 1.2, 0.0, 31);
  for (Index i = 0; i < 10; ++i) {
    d.y[static_cast<std::size_t>(i)] = 1;
    d.x.row(i).array() += 1.2;
  }
  Labeled dup = d;
  dup.x.conservativeResize(60, Eigen::NoChange);
  for (Index r = 0; r < 20; ++r) {
    dup.x.row(40 + r) = d.x.row(r % 10);
    dup.y.push_back(1);
  }
  const double c = 0.5;
  const double w_pos = 40.0 / 20.0, w_neg = 40.0 / 60.0;
  const auto weighted = oracle::smo_svm(d.x, d.y, c, w_pos, w_neg, 1e-12);
  const auto duplicated = oracle::smo_svm(dup.x, dup.y, c * w_neg, 1.0, 1.0, 1e-12);
  const Vector dv_w = (d.x * weighted.w).array() + weighted.b;
  const Vector dv_d = (d.x * duplicated.w).array() + duplicated.b;
  CHECK((dv_w - dv_d).cwiseAbs().maxCoeff() < 1e-6);

  const ClassifierModel sgd_w = train_svm(d.x, d.y, {c, 200, 1, true});
  const ClassifierModel sgd_d = train_svm(dup.x, dup.y, {c * w_neg, 200, 1, false});
  const Vector a = sgd_w.decision(d.x);
  const Vector b = sgd_d.decision(d.x);
  for (Index i = 0; i < 40; ++i) {
    if (std::abs(dv_w(i)) > 0.1) CHECK((a(i) >= 0) == (b(i) >= 0));
  }
}

TEST_CASE("balanced weighting helps the minority class") {
  const Labeled d = blobs(400, 4, 1.0, 0.15, 12);
  const Labeled t = blobs(2000, 4, 1.0, 0.15, 13);
  const auto recall = [&](bool balanced) {
    const ClassifierModel m = train_svm(d.x, d.y, {1.0, 200, 1, balanced});
    return compute_metrics(predict(m, t.x), t.y).recall;
  };
  CHECK(recall(true) > recall(false));
}

TEST_CASE("decisions are invariant to feature scaling with C / a^2") {
  const Labeled d = blobs(150, 4, 1.5, 0.4, 21);
  const ClassifierModel m = train_svm(d.x, d.y, {1.0, 100, 5, true});
  const double a = 7.0;
  const ClassifierModel s = train_svm(d.x * a, d.y, {1.0 / (a * a), 100, 5, true});
  CHECK(predict(m, d.x) == predict(s, d.x * a));
  CHECK((s.w * a - m.w).norm() < 1e-9 * m.w.norm());
}

TEST_CASE("training is deterministic under a seed") {
  const Labeled d = blobs(80, 3, 1.0, 0.5, 2);
  const ClassifierModel a = train_svm(d.x, d.y, {1.0, 50, 9, true});
  const ClassifierModel b = train_svm(d.x, d.y, {1.0, 50, 9, true});
  CHECK(a.w == b.w);
  CHECK(a.b == b.b);
}

TEST_CASE("svm input validation") {
  const Labeled d = blobs(10, 2, 1.0, 0.5, 1);
  CHECK_THROWS_AS(train_svm(d.x, std::vector<int>(10, 1)), ValidationError);
  CHECK_THROWS_AS(train_svm(d.x, std::vector<int>(10, 2)), ValidationError);
  CHECK_THROWS_AS(train_svm(d.x, std::vector<int>(9, 1)), ValidationError);
  CHECK_THROWS_AS(train_svm(d.x, d.y, {0.0}), ValidationError);
}

TEST_CASE("predict maps a zero decision to +1") {
  ClassifierModel m;
  m.w = Vector::Zero(2);
  m.b = 0.0;
  CHECK(predict(m, Matrix::Ones(3, 2)) == std::vector<int>{1, 1, 1});
}

TEST_CASE("metrics by hand") {
  const Metrics m = compute_metrics({1, 1, -1, -1, 1}, {1, -1, -1, 1, 1});
  CHECK(m.confusion.tp == 2);
  CHECK(m.confusion.fp == 1);
  CHECK(m.confusion.tn == 1);
  CHECK(m.confusion.fn == 1);
  CHECK(m.accuracy == doctest::Approx(0.6));
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  const Metrics none = compute_metrics({-1, -1}, {-1, -1});
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.accuracy == 1.0);
}

TEST_CASE("metrics identities over random pairs") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> len(1, 40);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = len(rng);
    std::vector<int> pred(n), truth(n);
    for (int i = 0; i < n; ++i) {
      pred[i] = coin(rng) ? 1 : -1;
      truth[i] = coin(rng) ? 1 : -1;
    }
    const Metrics m = compute_metrics(pred, truth);
    const auto& c = m.confusion;
    REQUIRE(c.tp + c.fp + c.tn + c.fn == static_cast<std::size_t>(n));
    const double tp = c.tp, fp = c.fp, tn = c.tn, fn = c.fn;
    REQUIRE(m.accuracy == (tp + tn) / n);
    REQUIRE(m.precision == (c.tp + c.fp ? tp / (tp + fp) : 0.0));
    REQUIRE(m.recall == (c.tp + c.fn ? tp / (tp + fn) : 0.0));
    const double f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    REQUIRE(m.f1 == f1);
  }
}

TEST_CASE("balanced subsample") {
  std::vector<int> y(30, -1);
  for (int i = 0; i < 8; ++i) y[static_cast<std::size_t>(i * 3)] = 1;
  const auto rows = balanced_subsample(y, 5);
  CHECK(rows.size() == 16);
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  int pos = 0;
  for (Index r : rows) pos += y[static_cast<std::size_t>(r)] > 0;
  CHECK(pos == 8);
  CHECK(balanced_subsample(y, 5) == rows);
}

TEST_CASE("label parsing") {
  CHECK(parse_labels("label\nface\nfull-body\n+1\n-1\n1\n", "t") == std::vector<int>{1, -1, 1, -1, 1});
  CHECK_THROWS_AS(parse_labels("1\nmaybe\n", "t"), IngestError);
  CHECK_THROWS_AS(parse_labels("header\n", "t"), IngestError);
}

TEST_CASE("separable blobs are fit exactly") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix x(100, 2);
  std::vector<int> y(100);
  for (Index i = 0; i < 100; ++i) {
    const int label = i < 50 ? 1 : -1;
    y[static_cast<std::size_t>(i)] = label;
    x(i, 0) = 2.0 * label + std::clamp(noise(rng), -0.9, 0.9);
    x(i, 1) = noise(rng);
  }
  const ClassifierModel m = train_svm(x, y);
  CHECK(predict(m, x) == y);
  CHECK(compute_metrics(predict(m, x), y).accuracy == 1.0);
}

TEST_CASE("labels independent of features stay near chance") {
  std::mt19937_64 rng(6);
  std::bernoulli_distribution coin(0.5);
  const auto draw = [&](Index n) {
    Labeled d{oracle::random_matrix(n, 10, rng), std::vector<int>(static_cast<std::size_t>(n))};
    for (auto& v : d.y) v = coin(rng) ? 1 : -1;
    return d;
  };
  const Labeled train = draw(400), test = draw(2000);
  const double acc = compute_metrics(predict(train_svm(train.x, train.y), test.x), test.y).accuracy;
  CHECK(acc >= 0.38);
  CHECK(acc <= 0.62);
}

TEST_CASE("imbalanced separable data keeps minority recall") {
  const Labeled d = blobs(500, 4, 4.0, 0.1, 17);
  const Labeled t = blobs(2000, 4, 4.0, 0.1, 18);
  const ClassifierModel m = train_svm(d.x, d.y);
  CHECK(compute_metrics(predict(m, t.x), t.y).recall > 0.5);
}

TEST_CASE("metrics extremes") {
  const std::vector<int> truth{1, -1, 1, -1};
  const Metrics perfect = compute_metrics(truth, truth);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.f1 == 1.0);
  const Metrics miss = compute_metrics({-1, 1, -1, 1}, truth);
  CHECK(miss.accuracy == 0.0);
  CHECK(miss.f1 == 0.0);
  // TP=2, FP=1, FN=1, TN=6.
  std::vector<int> pred{1, 1, 1, -1, -1, -1, -1, -1, -1, -1};
  std::vector<int> gold{1, 1, -1, 1, -1, -1, -1, -1, -1, -1};
  const Metrics m = compute_metrics(pred, gold);
  CHECK(m.precision == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall == doctest::Approx(2.0 / 3.0));
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0));
  CHECK(m.accuracy == doctest::Approx(0.8));
  CHECK_THROWS_AS(compute_metrics({1}, {1, 1}), ValidationError);
}
