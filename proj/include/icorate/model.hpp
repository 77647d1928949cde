#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icorate/common.hpp"
#include "icorate/corpus.hpp"
#include "icorate/features.hpp"

namespace icorate {

struct RatingModel {
  Vector w;
  double lambda = 0.0;
  AspectSpans spans;
  TargetMode target_mode = TargetMode::log;
  int horizon_days = 365;
  std::uint64_t seed = 0;
  int epochs_run = 0;
  int best_epoch = 0;  // epoch count selected on the dev set (0 = initial weights)
};

struct RegressionExample {
  Vector x;
  double target = 0.5;
};

struct TrainOptions {
  double lambda = 1e-3;
  double learning_rate = 0.05;
  std::size_t batch_size = 30;
  int max_epochs = 200;
  std::uint64_t seed = 1;
  TargetMode target_mode = TargetMode::log;
  int horizon_days = 365;
};

struct TrainHistory {
  std::vector<double> train_loss;  // objective on the full training set after each epoch
  std::vector<double> dev_loss;    // mean squared error on dev; entry 0 is before training
};

/// c_hat = sigmoid(w . h)
double predict_score(const RatingModel& model, const Vector& features);

/// mean_i (sigmoid(w . x_i) - c_i)^2 + lambda ||w||^2
double objective(const Vector& w, const std::vector<RegressionExample>& data, double lambda);
Vector objective_gradient(const Vector& w, const std::vector<RegressionExample>& data, double lambda);
double mean_squared_error(const Vector& w, const std::vector<RegressionExample>& data);

/// Minibatch SGD from w = 0 with seeded shuffling each epoch and a diagonal step preconditioner
/// (see model.cpp). The L2 term is applied as an exact
/// proximal shrink, so any lambda >= 0 is stable. Returns the weights of the epoch with the
/// lowest dev error.
RatingModel train(const std::vector<RegressionExample>& train_set, const std::vector<RegressionExample>& dev_set,
                  const AspectSpans& spans, const TrainOptions& options, TrainHistory* history = nullptr);

/// Scam threshold in predicted-target space: the training transform applied to m.
double scam_threshold(TargetMode mode, double scam_bar);

/// 1 iff c_hat <= threshold(m).
int classify(const RatingModel& model, const Vector& features, double scam_bar);

struct MetricsReport {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
  double positive_rate = 0.0;      // share of gold positives
  bool precision_undefined = false;  // TP + FP == 0
  bool recall_undefined = false;     // TP + FN == 0
};

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);
MetricsReport evaluate(const RatingModel& model, const std::vector<Vector>& features, const std::vector<int>& labels,
                       double scam_bar);

struct AblationGroup {
  std::string name;
  std::vector<Aspect> aspects;
};

/// Single aspects, then cumulative combinations.
const std::vector<AblationGroup>& standard_ablation_groups();
/// Indices into standard_ablation_groups() of the cumulative chain (whitepaper, +github, +team, +rest).
const std::vector<std::size_t>& cumulative_ablation_chain();

struct LabeledFeatures {
  FeatureVector features;
  double target = 0.5;
  int label_for(double scam_bar) const;
  double ratio = 1.0;  // price(t) / price(0)
};

struct AblationRow {
  std::string name;
  MetricsReport metrics;
};

struct AblationTable {
  double scam_bar = 1.0;
  double positive_rate = 0.0;
  std::vector<AblationRow> rows;
};

std::vector<AblationTable> run_ablation(const std::vector<LabeledFeatures>& train_set,
                                        const std::vector<LabeledFeatures>& dev_set,
                                        const std::vector<LabeledFeatures>& test_set,
                                        const std::vector<double>& scam_bars, const TrainOptions& options);

std::string format_ablation_tables(const std::vector<AblationTable>& tables);
std::string ablation_tables_to_json(const std::vector<AblationTable>& tables);

void save_rating_model(const RatingModel& model, const std::string& path);
RatingModel load_rating_model(const std::string& path);

}  // namespace icorate
