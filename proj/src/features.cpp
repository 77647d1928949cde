#include "icorate/features.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace icorate {

using json = nlohmann::json;

namespace {

const std::array<std::string, 5> kAspectNames = {"whitepaper", "github", "team", "website", "other"};

std::optional<TokenizedDoc> tokenize_optional(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  try {
    return tokenize(*text);
  } catch (const InvalidInput&) {
    return std::nullopt;  // whitespace or punctuation only
  }
}

std::string normalize_name(const std::string& name) {
  std::istringstream is(name);
  std::string out;
  for (std::string part; is >> part;) {
    if (!out.empty()) out.push_back(' ');
    out += to_lower(part);
  }
  return out;
}

std::optional<int> year_in(const TaggedSpan& span) {
  std::istringstream is(span.text);
  for (std::string tok; is >> tok;) {
    if (tok.size() == 4 && std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); })) {
      const int y = std::stoi(tok);
      if (y >= 1900 && y <= 2100) return y;
    }
  }
  return std::nullopt;
}

}  // namespace

const std::string& aspect_name(Aspect a) { return kAspectNames[static_cast<std::size_t>(a)]; }

Aspect aspect_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kAspectNames.size(); ++i)
    if (kAspectNames[i] == name) return static_cast<Aspect>(i);
  throw InvalidInput("unknown aspect '" + name + "'");
}

Index AspectSpans::total() const {
  Index n = 0;
  for (const auto& [_, s] : spans) n += s.length;
  return n;
}

std::optional<Span> AspectSpans::find(Aspect a) const {
  for (const auto& [aspect, s] : spans)
    if (aspect == a) return s;
  return std::nullopt;
}

bool AspectSpans::tiles() const {
  Index next = 0;
  int last_order = -1;
  for (const auto& [aspect, s] : spans) {
    if (static_cast<int>(aspect) <= last_order || s.start != next || s.length < 0) return false;
    last_order = static_cast<int>(aspect);
    next += s.length;
  }
  return true;
}

bool AspectSpans::operator==(const AspectSpans& o) const {
  if (spans.size() != o.spans.size() || topic_offset != o.topic_offset || topic_count != o.topic_count) return false;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].first != o.spans[i].first || spans[i].second.start != o.spans[i].second.start ||
        spans[i].second.length != o.spans[i].second.length) {
      return false;
    }
  }
  return true;
}

Vector TeamManualFeatures::encode() const {
  Vector v(kDim);
  v << (has_bio ? 1.0 : 0.0), static_cast<double>(degree_level), (known_company ? 1.0 : 0.0), age,
      (age_known ? 1.0 : 0.0), jobs_3yr, (other_icos ? 1.0 : 0.0);
  return v;
}

int degree_from_token(const std::string& token) {
  static const std::map<std::string, int> table = {
      {"bachelor", 1}, {"bachelors", 1}, {"bsc", 1},   {"ba", 1},     {"bs", 1},        {"beng", 1},
      {"master", 2},   {"masters", 2},   {"msc", 2},   {"ma", 2},     {"ms", 2},        {"mba", 2},
      {"meng", 2},     {"mphil", 2},     {"phd", 3},   {"doctorate", 3}, {"doctoral", 3}, {"dphil", 3}};
  const auto it = table.find(to_lower(token));
  return it == table.end() ? TeamManualFeatures::none : it->second;
}

FounderIndex::FounderIndex(const std::vector<ProjectDossier>& corpus) {
  for (const auto& d : corpus)
    for (const auto& b : d.team_bios) add(b.name, d.id);
}

void FounderIndex::add(const std::string& name, const std::string& project_id) {
  const auto key = normalize_name(name);
  if (!key.empty()) projects_[key].insert(project_id);
}

bool FounderIndex::involved_elsewhere(const std::string& name, const std::string& project_id) const {
  const auto it = projects_.find(normalize_name(name));
  if (it == projects_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const auto& p) { return p != project_id; });
}

TeamManualFeatures extract_team_manual_features(const std::vector<TeamBio>& bios, const TaggerModel& tagger,
                                                const Dictionaries& dictionaries, const FounderIndex& founders,
                                                const std::string& project_id, int ico_year) {
  TeamManualFeatures out;
  double age_sum = 0.0, jobs_sum = 0.0;
  int age_count = 0, members_with_bio = 0;
  for (const auto& member : bios) {
    if (founders.involved_elsewhere(member.name, project_id)) out.other_icos = true;
    const auto doc = tokenize_optional(member.bio);
    if (!doc) continue;
    out.has_bio = true;
    ++members_with_bio;
    std::set<std::string> companies;
    std::optional<int> born;
    for (const auto& sentence : doc->sentences) {
      TokenSequence seq{sentence, std::nullopt, std::nullopt};
      const auto spans = extract_spans(sentence, decode(tagger, seq));
      for (const auto& span : spans) {
        switch (span.category) {
          case BioCategory::degree:
            for (std::size_t t = span.begin; t < span.end; ++t)
              out.degree_level = std::max(out.degree_level, degree_from_token(sentence[t]));
            break;
          case BioCategory::born_date:
            if (!born) born = year_in(span);
            break;
          case BioCategory::company: {
            const auto key = normalize_phrase(sentence, span.begin, span.end);
            companies.insert(key);
            if (dictionaries.companies.contains(key)) out.known_company = true;
            break;
          }
          default:
            break;
        }
      }
    }
    if (born) {
      age_sum += static_cast<double>(ico_year - *born);
      ++age_count;
    }
    jobs_sum += static_cast<double>(companies.size());
  }
  if (age_count > 0) {
    out.age = age_sum / age_count;
    out.age_known = true;
  }
  if (members_with_bio > 0) out.jobs_3yr = jobs_sum / members_with_bio;
  return out;
}

std::vector<std::string> platform_vocabulary(const std::vector<ProjectDossier>& corpus, std::size_t max_platforms) {
  std::map<std::string, std::size_t> counts;
  for (const auto& d : corpus)
    if (d.platform && !d.platform->empty()) ++counts[*d.platform];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < ranked.size() && i < max_platforms; ++i) out.push_back(ranked[i].first);
  return out;
}

FeatureContext make_feature_context(const std::vector<ProjectDossier>& corpus, const FeatureConfig& config) {
  return {platform_vocabulary(corpus, config.max_platforms), FounderIndex(corpus), config};
}

AspectSpans feature_layout(Index doc_dim, Index topic_count, std::size_t platform_count) {
  const std::array<Index, 5> lengths = {
      doc_dim + topic_count,                           // DocVec | theta
      doc_dim + 5,                                     // README DocVec | has_repo | 4 log counts
      doc_dim + TeamManualFeatures::kDim,              // bios DocVec | manual features
      doc_dim + 1,                                     // website DocVec | has_website
      static_cast<Index>(platform_count) + 1 + 2};     // platform one-hot + OTHER | log supply | cap
  AspectSpans spans;
  Index start = 0;
  for (std::size_t i = 0; i < kAspectOrder.size(); ++i) {
    spans.spans.push_back({kAspectOrder[i], {start, lengths[i]}});
    start += lengths[i];
  }
  spans.topic_offset = doc_dim;
  spans.topic_count = topic_count;
  return spans;
}

FeatureVector featurize_project(const ProjectDossier& dossier, const TopicModel& topics, const EncoderStack& encoder,
                                const TaggerModel& tagger, const FeatureContext& context) {
  if (topics.phi.size() == 0) throw InvalidInput("topic model is not trained");
  if (encoder.layers.empty()) throw InvalidInput("encoder is not trained");
  if (tagger.features.empty()) throw InvalidInput("tagger is not trained");

  const Index D = encoder.hidden();
  const Index K = topics.topics();
  FeatureVector fv;
  fv.dossier_id = dossier.id;
  fv.spans = feature_layout(D, K, context.platforms.size());
  fv.values = Vector::Zero(fv.spans.total());
  auto block = [&](Aspect a) { return fv.values.segment(fv.spans.find(a)->start, fv.spans.find(a)->length); };

  if (const auto doc = tokenize_optional(dossier.white_paper)) {
    auto wp = block(Aspect::whitepaper);
    wp.head(D) = encode_document(encoder, *doc);
    const std::uint64_t seed = fnv1a64(dossier.id, context.config.seed);
    try {
      wp.tail(K) = infer_mixture(topics, *doc, context.config.fold_in_iterations, seed);
    } catch (const InvalidInput&) {
      wp.tail(K).setConstant(1.0 / static_cast<double>(K));  // no in-vocabulary word: prior mean
    }
  }

  if (dossier.github) {
    auto gh = block(Aspect::github);
    if (const auto readme = tokenize_optional(dossier.github->readme_text)) gh.head(D) = encode_document(encoder, *readme);
    gh(D) = 1.0;
    gh(D + 1) = std::log1p(static_cast<double>(dossier.github->n_branches));
    gh(D + 2) = std::log1p(static_cast<double>(dossier.github->n_commits));
    gh(D + 3) = std::log1p(static_cast<double>(dossier.github->loc_total));
    gh(D + 4) = std::log1p(static_cast<double>(dossier.github->n_files));
  }

  {
    auto team = block(Aspect::team);
    TokenizedDoc bios;
    for (const auto& b : dossier.team_bios) {
      if (const auto doc = tokenize_optional(b.bio)) {
        bios.sentences.insert(bios.sentences.end(), doc->sentences.begin(), doc->sentences.end());
      }
    }
    if (!bios.sentences.empty()) team.head(D) = encode_document(encoder, bios);
    const auto manual =
        extract_team_manual_features(dossier.team_bios, tagger, tagger.dictionaries, context.founders, dossier.id,
                                     dossier.ico_year.value_or(context.config.default_ico_year));
    team.tail(TeamManualFeatures::kDim) = manual.encode();
  }

  if (const auto doc = tokenize_optional(dossier.website_text)) {
    auto web = block(Aspect::website);
    web.head(D) = encode_document(encoder, *doc);
    web(D) = 1.0;
  }

  {
    auto other = block(Aspect::other);
    const auto P = static_cast<Index>(context.platforms.size());
    if (dossier.platform && !dossier.platform->empty()) {
      const auto it = std::find(context.platforms.begin(), context.platforms.end(), *dossier.platform);
      other(it == context.platforms.end() ? P : static_cast<Index>(it - context.platforms.begin())) = 1.0;
    }
    if (dossier.total_supply) other(P + 1) = std::log1p(*dossier.total_supply);
    other(P + 2) = dossier.cap_unlimited ? 1.0 : 0.0;
  }
  return fv;
}

FeatureVector select_aspects(const FeatureVector& fv, const std::vector<Aspect>& aspects) {
  FeatureVector out;
  out.dossier_id = fv.dossier_id;
  Index total = 0;
  for (Aspect a : kAspectOrder) {
    if (std::find(aspects.begin(), aspects.end(), a) == aspects.end()) continue;
    const auto s = fv.spans.find(a);
    if (!s) throw InvalidInput("feature vector has no '" + aspect_name(a) + "' span");
    out.spans.spans.push_back({a, {total, s->length}});
    if (a == Aspect::whitepaper) {
      out.spans.topic_offset = total + (fv.spans.topic_offset - s->start);
      out.spans.topic_count = fv.spans.topic_count;
    }
    total += s->length;
  }
  out.values.resize(total);
  for (const auto& [a, s] : out.spans.spans) out.values.segment(s.start, s.length) = fv.values.segment(fv.spans.find(a)->start, s.length);
  return out;
}

Vector erase_aspect(const Vector& values, const AspectSpans& spans, Aspect a) {
  const auto s = spans.find(a);
  if (!s) throw InvalidInput("no '" + aspect_name(a) + "' span to erase");
  Vector out = values;
  out.segment(s->start, s->length).setZero();
  return out;
}

std::string feature_vector_to_json(const FeatureVector& fv) {
  json rec;
  rec["id"] = fv.dossier_id;
  rec["values"] = std::vector<double>(fv.values.data(), fv.values.data() + fv.values.size());
  json spans = json::array();
  for (const auto& [a, s] : fv.spans.spans) spans.push_back({{"aspect", aspect_name(a)}, {"start", s.start}, {"length", s.length}});
  rec["spans"] = spans;
  rec["topic_offset"] = fv.spans.topic_offset;
  rec["topic_count"] = fv.spans.topic_count;
  return rec.dump();
}

FeatureVector feature_vector_from_json(const std::string& line) {
  const json rec = json::parse(line);
  FeatureVector fv;
  fv.dossier_id = rec.at("id").get<std::string>();
  const auto values = rec.at("values").get<std::vector<double>>();
  fv.values = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  for (const auto& s : rec.at("spans")) {
    fv.spans.spans.push_back({aspect_from_string(s.at("aspect").get<std::string>()),
                              {s.at("start").get<Index>(), s.at("length").get<Index>()}});
  }
  fv.spans.topic_offset = rec.at("topic_offset").get<Index>();
  fv.spans.topic_count = rec.at("topic_count").get<Index>();
  if (!fv.spans.tiles() || fv.spans.total() != fv.values.size()) {
    throw InvalidInput("feature record '" + fv.dossier_id + "' has spans that do not tile its values");
  }
  return fv;
}

void save_feature_vectors(const std::string& path, const std::vector<FeatureVector>& vectors) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& fv : vectors) out << feature_vector_to_json(fv) << '\n';
}

std::vector<FeatureVector> load_feature_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open feature file '" + path + "'");
  std::vector<FeatureVector> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(feature_vector_from_json(line));
    } catch (const std::exception& e) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace icorate
