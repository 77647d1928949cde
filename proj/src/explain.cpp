#include "icorate/explain.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace icorate {

namespace {

void check_dims(const RatingModel& model, const Vector& x) {
  if (model.w.size() != x.size()) {
    throw DimensionMismatch("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                            std::to_string(model.w.size()));
  }
}

Span span_of(const AspectSpans& spans, Aspect a) {
  const auto s = spans.find(a);
  if (!s) throw InvalidInput("aspect '" + aspect_name(a) + "' has no span");
  return *s;
}

}  // namespace

double scam_score(const RatingModel& model, const Vector& features) {
  return 1.0 - predict_score(model, features);
}

std::vector<AspectValue> aspect_saliency(const Vector& feature_saliency, const AspectSpans& spans) {
  require_dims(spans.total() == feature_saliency.size(), "spans do not cover the saliency vector");
  std::vector<AspectValue> out;
  for (const auto& [a, s] : spans.spans) {
    const double v = s.length == 0 ? 0.0 : feature_saliency.segment(s.start, s.length).mean();
    out.push_back({a, v});
  }
  return out;
}

SaliencyReport saliency(const RatingModel& model, const FeatureVector& fv) {
  check_dims(model, fv.values);
  const double p = sigmoid(model.w.dot(fv.values));
  // dS/dx = -w p (1 - p)
  SaliencyReport r;
  r.dossier_id = fv.dossier_id;
  r.feature = (model.w * (p * (1.0 - p))).cwiseAbs();
  const AspectSpans& spans = fv.spans.spans.empty() ? model.spans : fv.spans;
  if (!spans.spans.empty()) r.aspect = aspect_saliency(r.feature, spans);
  return r;
}

Influence erase_influence(const RatingModel& model, const Vector& features, const std::vector<Index>& coords) {
  check_dims(model, features);
  Vector erased = features;
  double removed = 0.0;
  for (Index i : coords) {
    if (i < 0 || i >= features.size()) throw InvalidInput("coordinate " + std::to_string(i) + " out of range");
    if (erased(i) != 0.0) removed += model.w(i) * erased(i);
    erased(i) = 0.0;
  }
  const double s = scam_score(model, features);
  const double s_erased = scam_score(model, erased);
  if (s_erased == 0.0) throw UndefinedInfluence("scam score is zero after erasure; influence undefined");
  Influence inf;
  inf.ratio = (s - s_erased) / s_erased;
  // logit(1 - sigmoid(z)) = -z
  inf.logit = -removed;
  return inf;
}

Influence erase_influence(const RatingModel& model, const Vector& features, Aspect aspect) {
  const Span s = span_of(model.spans, aspect);
  std::vector<Index> coords(static_cast<std::size_t>(s.length));
  for (Index i = 0; i < s.length; ++i) coords[static_cast<std::size_t>(i)] = s.start + i;
  return erase_influence(model, features, coords);
}

ErasureReport erasure_report(const RatingModel& model, const FeatureVector& fv) {
  ErasureReport r;
  r.dossier_id = fv.dossier_id;
  for (const auto& [a, s] : model.spans.spans) r.aspect.emplace_back(a, erase_influence(model, fv.values, a));
  return r;
}

std::vector<TopicRisk> topic_risk_ranking(const RatingModel& model, const std::vector<FeatureVector>& corpus,
                                          const std::vector<std::string>& names) {
  require(!corpus.empty(), "corpus is empty");
  const Index K = model.spans.topic_count;
  require(K > 0, "model has no topic-mixture block");
  require(names.empty() || names.size() == static_cast<std::size_t>(K), "topic name count differs from K");
  std::vector<TopicRisk> out;
  for (Index k = 0; k < K; ++k) {
    const Index coord = model.spans.topic_offset + k;
    double sum = 0.0;
    for (const auto& fv : corpus) sum += erase_influence(model, fv.values, std::vector<Index>{coord}).ratio;
    TopicRisk t;
    t.topic = static_cast<int>(k);
    t.score = sum / static_cast<double>(corpus.size());
    if (!names.empty()) t.name = names[static_cast<std::size_t>(k)];
    out.push_back(std::move(t));
  }
  std::stable_sort(out.begin(), out.end(), [](const TopicRisk& a, const TopicRisk& b) { return a.score > b.score; });
  return out;
}

std::string explanation_to_json(const SaliencyReport& s, const ErasureReport& e, double score) {
  nlohmann::json j;
  j["dossier_id"] = s.dossier_id;
  j["scam_score"] = score;
  j["feature_saliency"] = std::vector<double>(s.feature.data(), s.feature.data() + s.feature.size());
  nlohmann::json aspects = nlohmann::json::object();
  for (const auto& a : s.aspect) aspects[aspect_name(a.aspect)] = a.value;
  j["aspect_saliency"] = aspects;
  nlohmann::json erasure = nlohmann::json::object();
  for (const auto& [a, inf] : e.aspect) erasure[aspect_name(a)] = {{"ratio", inf.ratio}, {"logit", inf.logit}};
  j["erasure_influence"] = erasure;
  return j.dump();
}

std::string topic_ranking_to_json(const std::vector<TopicRisk>& ranking) {
  nlohmann::json j;
  j["sign"] = "positive score: the topic raises the scam score S = 1 - c_hat";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : ranking) rows.push_back({{"topic", t.topic}, {"name", t.name}, {"score", t.score}});
  j["topics"] = rows;
  return j.dump(2);
}

}  // namespace icorate
