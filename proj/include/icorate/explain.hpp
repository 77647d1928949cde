#pragma once

#include <string>
#include <vector>

#include "icorate/common.hpp"
#include "icorate/features.hpp"
#include "icorate/model.hpp"

namespace icorate {

/// Raised when the erased score is zero, so the relative change has no value.
class UndefinedInfluence : public Error {
public:
  using Error::Error;
};

/// Scam-direction score S(x, y=1). Scams have low c_hat, so S = 1 - c_hat.
double scam_score(const RatingModel& model, const Vector& features);

struct AspectValue {
  Aspect aspect;
  double value = 0.0;
};

struct SaliencyReport {
  std::string dossier_id;
  Vector feature;                   // |dS/dx_e|
  std::vector<AspectValue> aspect;  // span means, in aspect order
};

SaliencyReport saliency(const RatingModel& model, const FeatureVector& fv);

/// Mean of the feature saliencies over each span.
std::vector<AspectValue> aspect_saliency(const Vector& feature_saliency, const AspectSpans& spans);

struct Influence {
  double ratio = 0.0;  // (S(x) - S(x without e)) / S(x without e)
  double logit = 0.0;  // logit S(x) - logit S(x without e); additive over disjoint erasures
};

/// Influence of zeroing the listed coordinates.
Influence erase_influence(const RatingModel& model, const Vector& features, const std::vector<Index>& coords);
Influence erase_influence(const RatingModel& model, const Vector& features, Aspect aspect);

struct ErasureReport {
  std::string dossier_id;
  std::vector<std::pair<Aspect, Influence>> aspect;
};

ErasureReport erasure_report(const RatingModel& model, const FeatureVector& fv);

struct TopicRisk {
  int topic = 0;
  double score = 0.0;  // mean ratio influence of the topic coordinate; positive raises scam risk
  std::string name;
};

/// Ranked descending by score; ties keep topic order.
std::vector<TopicRisk> topic_risk_ranking(const RatingModel& model, const std::vector<FeatureVector>& corpus,
                                          const std::vector<std::string>& names = {});

std::string explanation_to_json(const SaliencyReport& s, const ErasureReport& e, double score);
std::string topic_ranking_to_json(const std::vector<TopicRisk>& ranking);

}  // namespace icorate
