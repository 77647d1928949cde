#include "icorate/model.hpp"

#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "icorate/binary_io.hpp"
#include "icorate/random.hpp"

namespace icorate {

namespace {

constexpr std::string_view kMagic = "ICRLRM";
constexpr std::uint32_t kVersion = 1;

void check_dims(const Vector& w, const Vector& x) {
  if (w.size() != x.size()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                            std::to_string(w.size()));
  }
}

}  // namespace

double predict_score(const RatingModel& model, const Vector& features) {
  check_dims(model.w, features);
  return sigmoid(model.w.dot(features));
}

double mean_squared_error(const Vector& w, const std::vector<RegressionExample>& data) {
  require(!data.empty(), "empty data set");
  double sum = 0.0;
  for (const auto& ex : data) {
    check_dims(w, ex.x);
    const double r = sigmoid(w.dot(ex.x)) - ex.target;
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

double objective(const Vector& w, const std::vector<RegressionExample>& data, double lambda) {
  return mean_squared_error(w, data) + lambda * w.squaredNorm();
}

Vector objective_gradient(const Vector& w, const std::vector<RegressionExample>& data, double lambda) {
  require(!data.empty(), "empty data set");
  Vector g = Vector::Zero(w.size());
  for (const auto& ex : data) {
    check_dims(w, ex.x);
    const double c_hat = sigmoid(w.dot(ex.x));
    g += (2.0 * (c_hat - ex.target) * c_hat * (1.0 - c_hat)) * ex.x;
  }
  g /= static_cast<double>(data.size());
  g += 2.0 * lambda * w;
  return g;
}

RatingModel train(const std::vector<RegressionExample>& train_set, const std::vector<RegressionExample>& dev_set,
                  const AspectSpans& spans, const TrainOptions& options, TrainHistory* history) {
  require(!train_set.empty(), "training set is empty");
  require(!dev_set.empty(), "dev set is empty");
  require(options.batch_size > 0, "batch size must be > 0");
  require(options.lambda >= 0.0, "lambda must be >= 0");
  const Index dim = train_set.front().x.size();
  for (const auto& ex : train_set) require_dims(ex.x.size() == dim, "training vectors differ in length");
  for (const auto& ex : dev_set) require_dims(ex.x.size() == dim, "dev vectors differ in length");
  require_dims(spans.spans.empty() || spans.total() == dim, "aspect spans do not match the feature dimension");

  RatingModel model;
  model.w = Vector::Zero(dim);
  model.lambda = options.lambda;
  model.spans = spans;
  model.target_mode = options.target_mode;
  model.horizon_days = options.horizon_days;
  model.seed = options.seed;

  TrainHistory h;
  Vector w = model.w;
  double best_dev = mean_squared_error(w, dev_set);
  h.dev_loss.push_back(best_dev);
  Vector best_w = w;
  int best_epoch = 0;

  // Diagonal preconditioner: coordinate e steps by eta / s_e^2 with s_e = max(1, RMS of x_e).
  // Large-magnitude inputs (log supply, age) would otherwise dominate the step; small ones are
  // never amplified.
  Vector scale = Vector::Zero(dim);
  for (const auto& ex : train_set) scale += ex.x.cwiseAbs2();
  scale = (scale / static_cast<double>(train_set.size())).cwiseMax(1.0);

  Rng rng(options.seed);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Vector g(dim);
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    rng.shuffle(order);
    const Vector eta = (options.learning_rate / std::sqrt(static_cast<double>(epoch))) * scale.cwiseInverse();
    const Vector shrink = (1.0 + 2.0 * options.lambda * eta.array()).inverse().matrix();
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      g.setZero();
      for (std::size_t b = start; b < stop; ++b) {
        const auto& ex = train_set[order[b]];
        const double c_hat = sigmoid(w.dot(ex.x));
        g += (2.0 * (c_hat - ex.target) * c_hat * (1.0 - c_hat)) * ex.x;
      }
      g /= static_cast<double>(stop - start);
      w = ((w - eta.cwiseProduct(g)).array() * shrink.array()).matrix();
    }
    h.train_loss.push_back(objective(w, train_set, options.lambda));
    const double dev = mean_squared_error(w, dev_set);
    h.dev_loss.push_back(dev);
    if (dev < best_dev) {
      best_dev = dev;
      best_w = w;
      best_epoch = epoch;
    }
  }
  model.w = best_w;
  model.best_epoch = best_epoch;
  model.epochs_run = options.max_epochs;
  if (history) *history = std::move(h);
  return model;
}

double scam_threshold(TargetMode mode, double scam_bar) {
  require(scam_bar > 0.0, "scam bar m must be > 0");
  return transform_ratio(scam_bar, mode);
}

int classify(const RatingModel& model, const Vector& features, double scam_bar) {
  return predict_score(model, features) <= scam_threshold(model.target_mode, scam_bar) ? 1 : 0;
}

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  MetricsReport r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.tn = tn;
  r.precision_undefined = tp + fp == 0;
  r.recall_undefined = tp + fn == 0;
  r.precision = r.precision_undefined ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  r.recall = r.recall_undefined ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  const std::size_t n = tp + fp + fn + tn;
  r.positive_rate = n == 0 ? 0.0 : static_cast<double>(tp + fn) / static_cast<double>(n);
  return r;
}

MetricsReport evaluate(const RatingModel& model, const std::vector<Vector>& features, const std::vector<int>& labels,
                       double scam_bar) {
  require(!features.empty(), "test set is empty");
  require(features.size() == labels.size(), "label count differs from example count");
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int pred = classify(model, features[i], scam_bar);
    const int gold = labels[i];
    require(gold == 0 || gold == 1, "labels must be 0 or 1");
    if (pred == 1 && gold == 1) ++tp;
    else if (pred == 1) ++fp;
    else if (gold == 1) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, fn, tn);
}

const std::vector<AblationGroup>& standard_ablation_groups() {
  static const std::vector<AblationGroup> groups = {
      {"white paper", {Aspect::whitepaper}},
      {"GitHub", {Aspect::github}},
      {"founding team", {Aspect::team}},
      {"website", {Aspect::website}},
      {"white paper + GitHub", {Aspect::whitepaper, Aspect::github}},
      {"white paper + GitHub + founding team", {Aspect::whitepaper, Aspect::github, Aspect::team}},
      {"white paper + GitHub + founding team + website + other features",
       {Aspect::whitepaper, Aspect::github, Aspect::team, Aspect::website, Aspect::other}},
  };
  return groups;
}

const std::vector<std::size_t>& cumulative_ablation_chain() {
  static const std::vector<std::size_t> chain = {0, 4, 5, 6};
  return chain;
}

int LabeledFeatures::label_for(double scam_bar) const {
  require(scam_bar > 0.0, "scam bar m must be > 0");
  return ratio <= scam_bar ? 1 : 0;
}

std::vector<AblationTable> run_ablation(const std::vector<LabeledFeatures>& train_set,
                                        const std::vector<LabeledFeatures>& dev_set,
                                        const std::vector<LabeledFeatures>& test_set,
                                        const std::vector<double>& scam_bars, const TrainOptions& options) {
  require(!test_set.empty(), "test set is empty");
  std::vector<AblationTable> tables;
  for (double m : scam_bars) {
    AblationTable t;
    t.scam_bar = m;
    std::size_t positives = 0;
    for (const auto& ex : test_set) positives += static_cast<std::size_t>(ex.label_for(m));
    t.positive_rate = static_cast<double>(positives) / static_cast<double>(test_set.size());
    tables.push_back(std::move(t));
  }
  // The regression target does not depend on m, so one model per feature group serves every m.
  for (const auto& group : standard_ablation_groups()) {
    auto project = [&](const std::vector<LabeledFeatures>& data) {
      std::vector<RegressionExample> out;
      out.reserve(data.size());
      for (const auto& ex : data) out.push_back({select_aspects(ex.features, group.aspects).values, ex.target});
      return out;
    };
    const auto spans = select_aspects(train_set.front().features, group.aspects).spans;
    const RatingModel model = train(project(train_set), project(dev_set), spans, options);
    std::vector<Vector> test_x;
    for (const auto& ex : test_set) test_x.push_back(select_aspects(ex.features, group.aspects).values);
    for (auto& table : tables) {
      std::vector<int> labels;
      for (const auto& ex : test_set) labels.push_back(ex.label_for(table.scam_bar));
      table.rows.push_back({group.name, evaluate(model, test_x, labels, table.scam_bar)});
    }
  }
  return tables;
}

std::string format_ablation_tables(const std::vector<AblationTable>& tables) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  for (const auto& t : tables) {
    os << "scam bar m = " << std::defaultfloat << t.scam_bar << std::fixed << " (positive proportion "
       << std::setprecision(1) << 100.0 * t.positive_rate << "%)" << std::setprecision(2) << '\n';
    os << "Feature type\tPrecision\tRecall\tF1\n";
    for (const auto& r : t.rows) {
      os << r.name << '\t' << r.metrics.precision << (r.metrics.precision_undefined ? "*" : "") << '\t'
         << r.metrics.recall << (r.metrics.recall_undefined ? "*" : "") << '\t' << r.metrics.f1 << '\n';
    }
    os << '\n';
  }
  os << "* zero denominator, reported as 0\n";
  return os.str();
}

std::string ablation_tables_to_json(const std::vector<AblationTable>& tables) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
      const auto& m = r.metrics;
      rows.push_back({{"features", r.name},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"f1", m.f1},
                      {"tp", m.tp},
                      {"fp", m.fp},
                      {"fn", m.fn},
                      {"tn", m.tn},
                      {"precision_undefined", m.precision_undefined},
                      {"recall_undefined", m.recall_undefined}});
    }
    out.push_back({{"scam_bar", t.scam_bar}, {"positive_rate", t.positive_rate}, {"rows", rows}});
  }
  return out.dump(2);
}

void save_rating_model(const RatingModel& model, const std::string& path) {
  BinaryWriter w(path, kMagic, kVersion);
  w.vector(model.w);
  w.f64(model.lambda);
  w.u32(model.target_mode == TargetMode::log ? 0U : 1U);
  w.i64(model.horizon_days);
  w.u64(model.seed);
  w.i64(model.epochs_run);
  w.i64(model.best_epoch);
  w.i64(model.spans.topic_offset);
  w.i64(model.spans.topic_count);
  w.u64(model.spans.spans.size());
  for (const auto& [a, s] : model.spans.spans) {
    w.u32(static_cast<std::uint32_t>(a));
    w.i64(s.start);
    w.i64(s.length);
  }
  w.close();
}

RatingModel load_rating_model(const std::string& path) {
  BinaryReader r(path, kMagic, kVersion);
  RatingModel m;
  m.w = r.vector();
  m.lambda = r.f64();
  m.target_mode = r.u32() == 0 ? TargetMode::log : TargetMode::literal;
  m.horizon_days = static_cast<int>(r.i64());
  m.seed = r.u64();
  m.epochs_run = static_cast<int>(r.i64());
  m.best_epoch = static_cast<int>(r.i64());
  m.spans.topic_offset = r.i64();
  m.spans.topic_count = r.i64();
  const auto n = r.u64();
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto a = r.u32();
    if (a > 4) throw InvalidInput("corrupt aspect id in '" + path + "'");
    const Index start = r.i64();
    const Index length = r.i64();
    m.spans.spans.push_back({static_cast<Aspect>(a), {start, length}});
  }
  if (!m.spans.spans.empty() && (!m.spans.tiles() || m.spans.total() != m.w.size())) {
    throw InvalidInput("inconsistent rating model artifact '" + path + "'");
  }
  return m;
}

}  // namespace icorate
