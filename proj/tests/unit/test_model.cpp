#include <doctest.h>

#include <cmath>
#include <cstring>

#include <json.hpp>

#include "../support/files.hpp"
#include "../support/gradient_check.hpp"
#include "icorate/model.hpp"
#include "icorate/random.hpp"

using namespace icorate;

namespace {

AspectSpans six_wide() {
  AspectSpans s;
  s.spans = {{Aspect::whitepaper, {0, 2}}, {Aspect::github, {2, 1}}, {Aspect::team, {3, 1}},
             {Aspect::website, {4, 1}},    {Aspect::other, {5, 1}}};
  return s;
}

// Coordinate 0 carries the log price ratio; the rest is noise.
std::vector<LabeledFeatures> planted(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledFeatures> out;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledFeatures lf;
    lf.features.dossier_id = "d" + std::to_string(i);
    lf.features.spans = six_wide();
    lf.features.values = Vector(6);
    for (Index e = 0; e < 6; ++e) lf.features.values(e) = rng.normal();
    const double log_ratio = 2.0 * lf.features.values(0) + 0.3 * rng.normal();
    lf.ratio = std::exp(log_ratio);
    lf.target = sigmoid(log_ratio);
    out.push_back(std::move(lf));
  }
  return out;
}

std::vector<RegressionExample> regression(const std::vector<LabeledFeatures>& data) {
  std::vector<RegressionExample> out;
  for (const auto& d : data) out.push_back({d.features.values, d.target});
  return out;
}

RatingModel with_weights(Vector w) {
  RatingModel m;
  m.w = std::move(w);
  return m;
}

}  // namespace

TEST_CASE("predicted score is the sigmoid of w.h") {
  CHECK(predict_score(with_weights(Vector::Zero(3)), Vector::Ones(3)) == 0.5);
  const auto m = with_weights(Vector::Constant(1, std::log(3.0)));
  CHECK(predict_score(m, Vector::Ones(1)) == doctest::Approx(0.75).epsilon(1e-12));
  const auto one = with_weights(Vector::Ones(1));
  const double a = predict_score(one, Vector::Constant(1, -1.0));
  const double b = predict_score(one, Vector::Constant(1, 0.2));
  const double c = predict_score(one, Vector::Constant(1, 3.0));
  CHECK(a < b);
  CHECK(b < c);
  CHECK_THROWS_AS(predict_score(one, Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("objective gradient matches finite differences") {
  const auto data = regression(planted(40, 3));
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    Vector w(6);
    for (Index e = 0; e < 6; ++e) w(e) = 0.5 * rng.normal();
    const Vector numeric = testing::central_difference([&](const Vector& v) { return objective(v, data, 0.01); }, w);
    CHECK(testing::relative_error(objective_gradient(w, data, 0.01), numeric) < 1e-6);
  }
  CHECK(objective(Vector::Zero(6), data, 5.0) == doctest::Approx(mean_squared_error(Vector::Zero(6), data)));
}

TEST_CASE("training fits a planted separable signal") {
  Rng rng(7);
  std::vector<RegressionExample> train_set, dev_set;
  for (int i = 0; i < 240; ++i) {
    Vector x(3);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x << sign * rng.uniform(1.0, 3.0), rng.normal(), rng.normal();
    (i < 200 ? train_set : dev_set).push_back({x, sign > 0 ? 0.95 : 0.05});
  }
  TrainOptions o;
  o.seed = 2;
  TrainHistory h;
  const auto model = train(train_set, dev_set, AspectSpans{}, o, &h);
  REQUIRE(h.dev_loss.size() >= 2);
  CHECK(mean_squared_error(model.w, dev_set) < 0.25 * h.dev_loss.front());
  CHECK(model.w(0) > 0.0);
  CHECK(model.best_epoch <= model.epochs_run);
  CHECK(h.dev_loss[static_cast<std::size_t>(model.best_epoch)] == doctest::Approx(mean_squared_error(model.w, dev_set)));

  const auto again = train(train_set, dev_set, AspectSpans{}, o);
  CHECK(again.w == model.w);
}

TEST_CASE("a huge penalty pins the weights near zero") {
  const auto data = regression(planted(100, 5));
  TrainOptions o;
  o.lambda = 1e6;
  const auto model = train(data, data, AspectSpans{}, o);
  CHECK(model.w.norm() < 1e-3);
}

TEST_CASE("training loss settles over the second half of the epochs") {
  const auto data = planted(300, 9);
  const auto all = regression(data);
  const std::vector<RegressionExample> train_set(all.begin(), all.begin() + 240), dev_set(all.begin() + 240, all.end());
  TrainOptions o;
  o.max_epochs = 100;
  TrainHistory h;
  train(train_set, dev_set, six_wide(), o, &h);
  REQUIRE(h.train_loss.size() == 100);
  for (std::size_t e = h.train_loss.size() / 2; e < h.train_loss.size(); ++e)
    CHECK(h.train_loss[e] <= h.train_loss[e - 1] + 1e-6);
}

TEST_CASE("training rejects empty or mismatched input") {
  const auto data = regression(planted(20, 1));
  CHECK_THROWS_AS(train({}, data, AspectSpans{}, TrainOptions{}), InvalidInput);
  CHECK_THROWS_AS(train(data, {}, AspectSpans{}, TrainOptions{}), InvalidInput);
  auto bad = data;
  bad[3].x = Vector::Zero(2);
  CHECK_THROWS_AS(train(bad, data, AspectSpans{}, TrainOptions{}), DimensionMismatch);
}

TEST_CASE("classification threshold lives in target space") {
  CHECK(scam_threshold(TargetMode::log, 1.0) == 0.5);
  CHECK(scam_threshold(TargetMode::log, 0.01) == doctest::Approx(0.0099).epsilon(1e-3));
  const auto m = with_weights(Vector::Ones(1));
  auto at = [&](double c) { return Vector::Constant(1, std::log(c / (1.0 - c))); };
  CHECK(classify(m, at(0.4), 1.0) == 1);
  CHECK(classify(m, at(0.6), 1.0) == 0);
  CHECK(classify(m, Vector::Zero(1), 1.0) == 1);  // exactly on the threshold
  CHECK_THROWS_AS(classify(m, at(0.4), 0.0), InvalidInput);

  // Raising m never turns a scam call into a non-scam call.
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Vector x = Vector::Constant(1, 4.0 * rng.normal());
    int prev = 0;
    for (double bar : {0.01, 0.1, 0.5, 1.0, 2.0, 10.0}) {
      const int y = classify(m, x, bar);
      CHECK(y >= prev);
      prev = y;
    }
  }
}

TEST_CASE("metric arithmetic") {
  const auto r = metrics_from_counts(3, 1, 2, 4);
  CHECK(r.precision == 0.75);
  CHECK(r.recall == 0.6);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.positive_rate == 0.5);
  const auto perfect = metrics_from_counts(5, 0, 0, 5);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  const auto none = metrics_from_counts(0, 0, 0, 7);
  CHECK(none.precision == 0.0);
  CHECK(none.precision_undefined);
  CHECK(none.recall_undefined);
  CHECK(none.f1 == 0.0);
  for (std::size_t tp = 0; tp < 5; ++tp)
    for (std::size_t fp = 0; fp < 5; ++fp)
      for (std::size_t fn = 0; fn < 5; ++fn) {
        const auto m = metrics_from_counts(tp, fp, fn, 3);
        CHECK(m.f1 <= std::min(2 * m.precision, 2 * m.recall) + 1e-12);
        CHECK(m.f1 >= 0.0);
        CHECK(m.f1 <= 1.0);
      }
}

TEST_CASE("evaluate counts the confusion matrix") {
  const auto m = with_weights(Vector::Ones(1));
  // Scores below 0.5 are scam calls at m = 1.
  const std::vector<Vector> xs = {Vector::Constant(1, -1), Vector::Constant(1, -2), Vector::Constant(1, -3),
                                  Vector::Constant(1, -4), Vector::Constant(1, 1),  Vector::Constant(1, 2),
                                  Vector::Constant(1, 3)};
  const std::vector<int> gold = {1, 1, 1, 0, 1, 1, 0};
  const auto r = evaluate(m, xs, gold, 1.0);
  CHECK(r.tp == 3);
  CHECK(r.fp == 1);
  CHECK(r.fn == 2);
  CHECK(r.tn == 1);
  CHECK(r.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate(m, {}, {}, 1.0), InvalidInput);
}

TEST_CASE("zeroing an aspect equals zeroing its weights") {
  const auto data = planted(50, 6);
  const auto all = regression(data);
  const auto model = train(all, all, six_wide(), TrainOptions{});
  for (Aspect a : kAspectOrder) {
    auto muted = model;
    const auto s = *model.spans.find(a);
    muted.w.segment(s.start, s.length).setZero();
    for (const auto& d : data)
      CHECK(predict_score(model, erase_aspect(d.features.values, model.spans, a)) ==
            doctest::Approx(predict_score(muted, d.features.values)).epsilon(1e-14));
  }
}

TEST_CASE("ablation produces one table per scam bar") {
  const auto data = planted(300, 11);
  const std::vector<LabeledFeatures> tr(data.begin(), data.begin() + 240), dev(data.begin() + 240, data.begin() + 270),
      te(data.begin() + 270, data.end());
  TrainOptions o;
  o.max_epochs = 50;
  const auto tables = run_ablation(tr, dev, te, {0.1, 1.0, 10.0}, o);
  REQUIRE(tables.size() == 3);
  CHECK(standard_ablation_groups().size() == 7);
  CHECK(cumulative_ablation_chain() == std::vector<std::size_t>{0, 4, 5, 6});
  double prev = 0.0;
  for (const auto& t : tables) {
    CHECK(t.rows.size() == 7);
    CHECK(t.positive_rate >= prev);
    prev = t.positive_rate;
  }
  // The planted coordinate lives in the white paper span.
  CHECK(tables[1].rows[0].metrics.f1 > tables[1].rows[1].metrics.f1);
  const auto text = format_ablation_tables(tables);
  CHECK(text.find("scam bar m = 0.1") != std::string::npos);
  CHECK(text.find("white paper + GitHub + founding team") != std::string::npos);
  CHECK(nlohmann::json::parse(ablation_tables_to_json(tables)).size() == 3);

  LabeledFeatures lf;
  lf.ratio = 1.0;
  CHECK(lf.label_for(1.0) == 1);
  CHECK(lf.label_for(0.99) == 0);
}

TEST_CASE("rating model round-trips bit-exactly") {
  const auto data = planted(60, 2);
  const auto all = regression(data);
  auto model = train(all, all, six_wide(), TrainOptions{});
  const auto path = (testing::scratch_dir("model") / "model.bin").string();
  save_rating_model(model, path);
  const auto back = load_rating_model(path);
  CHECK(std::memcmp(back.w.data(), model.w.data(), sizeof(double) * 6) == 0);
  CHECK(back.spans == model.spans);
  CHECK(back.lambda == model.lambda);
  CHECK(back.target_mode == model.target_mode);
  CHECK(back.best_epoch == model.best_epoch);
  testing::write_file(path, "garbage");
  CHECK_THROWS_AS(load_rating_model(path), Error);
}
