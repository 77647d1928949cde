#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "icorate/common.hpp"
#include "icorate/corpus.hpp"
#include "icorate/encoder.hpp"
#include "icorate/tagger.hpp"
#include "icorate/topics.hpp"

namespace icorate {

enum class Aspect { whitepaper, github, team, website, other };

inline constexpr std::array<Aspect, 5> kAspectOrder = {Aspect::whitepaper, Aspect::github, Aspect::team,
                                                       Aspect::website, Aspect::other};

const std::string& aspect_name(Aspect a);
Aspect aspect_from_string(const std::string& name);

struct Span {
  Index start = 0;
  Index length = 0;
};

/// Where each aspect lives inside a fused feature vector. Spans are listed in the fixed aspect
/// order and tile [0, total()). The topic-mixture block, when present, sits inside the
/// whitepaper span.
struct AspectSpans {
  std::vector<std::pair<Aspect, Span>> spans;
  Index topic_offset = 0;
  Index topic_count = 0;

  Index total() const;
  std::optional<Span> find(Aspect a) const;
  bool tiles() const;
  bool operator==(const AspectSpans&) const;
};

struct FeatureVector {
  std::string dossier_id;
  Vector values;
  AspectSpans spans;
};

/// Team-level manual features. Degree is the team maximum; age and job counts are team means
/// over members with evidence.
struct TeamManualFeatures {
  enum Degree { none = 0, bachelor = 1, master = 2, phd = 3 };

  bool has_bio = false;
  int degree_level = none;
  bool known_company = false;
  double age = 0.0;
  bool age_known = false;
  double jobs_3yr = 0.0;
  bool other_icos = false;

  static constexpr Index kDim = 7;
  Vector encode() const;
};

/// Degree level named by a single token ("master", "PhD", "BSc", ...), or none.
int degree_from_token(const std::string& token);

/// Founder name (lowercased, single-spaced) to the projects that list it.
class FounderIndex {
public:
  FounderIndex() = default;
  explicit FounderIndex(const std::vector<ProjectDossier>& corpus);

  bool involved_elsewhere(const std::string& name, const std::string& project_id) const;
  const std::map<std::string, std::set<std::string>>& entries() const { return projects_; }
  void add(const std::string& name, const std::string& project_id);

private:
  std::map<std::string, std::set<std::string>> projects_;
};

TeamManualFeatures extract_team_manual_features(const std::vector<TeamBio>& bios, const TaggerModel& tagger,
                                                const Dictionaries& dictionaries, const FounderIndex& founders,
                                                const std::string& project_id, int ico_year);

struct FeatureConfig {
  int fold_in_iterations = 50;
  std::uint64_t seed = 1;
  int default_ico_year = 2017;
  std::size_t max_platforms = 20;
};

/// Most frequent platforms in the corpus (ties broken alphabetically), capped at max_platforms.
std::vector<std::string> platform_vocabulary(const std::vector<ProjectDossier>& corpus, std::size_t max_platforms);

/// Corpus-level state the featurizer needs besides the trained models.
struct FeatureContext {
  std::vector<std::string> platforms;
  FounderIndex founders;
  FeatureConfig config;
};

FeatureContext make_feature_context(const std::vector<ProjectDossier>& corpus, const FeatureConfig& config);

/// Layout of the fused vector for the given model dimensions.
AspectSpans feature_layout(Index doc_dim, Index topic_count, std::size_t platform_count);

FeatureVector featurize_project(const ProjectDossier& dossier, const TopicModel& topics, const EncoderStack& encoder,
                                const TaggerModel& tagger, const FeatureContext& context);

/// Copies the listed aspects (in fixed order) into a smaller vector with rebased spans.
FeatureVector select_aspects(const FeatureVector& fv, const std::vector<Aspect>& aspects);

/// Sets every entry of the aspect's span to zero.
Vector erase_aspect(const Vector& values, const AspectSpans& spans, Aspect a);

std::string feature_vector_to_json(const FeatureVector& fv);
FeatureVector feature_vector_from_json(const std::string& line);
void save_feature_vectors(const std::string& path, const std::vector<FeatureVector>& vectors);
std::vector<FeatureVector> load_feature_vectors(const std::string& path);

}  // namespace icorate
