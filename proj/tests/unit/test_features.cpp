#include <doctest.h>

#include <cmath>

#include "../support/files.hpp"
#include "icorate/features.hpp"
#include "icorate/synthetic.hpp"

using namespace icorate;

namespace {

// Tags four-digit numbers as birth years, "master"/"phd" as degrees and capitalized
// dictionary companies as companies; everything else falls back to O.
TaggerModel rule_tagger(const Dictionaries& dicts) {
  TaggerModel m;
  m.features = {"all_digits=1", "w[0]=master", "w[0]=phd", "dict_companies=B", "dict_companies=I"};
  m.index_features();
  m.emission = Matrix::Zero(5, kNumLabels);
  m.transition = Matrix::Zero(kNumLabels, kNumLabels);
  m.emission(0, begin_label(BioCategory::born_date)) = 10.0;
  m.emission(1, begin_label(BioCategory::degree)) = 10.0;
  m.emission(2, begin_label(BioCategory::degree)) = 10.0;
  m.emission(3, begin_label(BioCategory::company)) = 10.0;
  m.emission(4, inside_label(BioCategory::company)) = 10.0;
  m.dictionaries = dicts;
  return m;
}

Dictionaries fixture_dictionaries() {
  Dictionaries d;
  d.companies.add("acme corp");
  d.universities.add("university of pennsylvania");
  return d;
}

TopicModel tiny_topics() {
  TopicModel m;
  m.vocab = {"chain", "ledger", "token"};
  m.phi.resize(2, 3);
  m.phi << 0.7, 0.2, 0.1, 0.1, 0.2, 0.7;
  m.alpha = 0.5;
  m.beta = 0.01;
  m.n_train_docs = 1;
  m.index_vocab();
  return m;
}

EncoderStack tiny_encoder() {
  WordEmbeddingTable table;
  table.dim = 4;
  table.oov_seed = 3;
  EncoderConfig cfg;
  cfg.hidden = 4;
  cfg.output_tanh = true;  // keeps the document vectors well away from zero
  return make_encoder(table, cfg);
}

ProjectDossier full_dossier() {
  ProjectDossier d;
  d.id = "p1";
  d.white_paper = "Our token ledger secures the chain. The token chain scales.";
  d.team_bios = {{"Ann Lee", "Ann Lee was born in 1990. She holds a master degree."}};
  d.website_text = "Join the presale today.";
  d.github = GithubMeta{"A fast ledger.", 2, 99, 1000, 9};
  d.platform = "ethereum";
  d.total_supply = 1e6;
  d.cap_unlimited = true;
  d.ico_year = 2017;
  return d;
}

struct Fixture {
  TopicModel topics = tiny_topics();
  EncoderStack encoder = tiny_encoder();
  TaggerModel tagger = rule_tagger(fixture_dictionaries());
  FeatureContext context = make_feature_context({full_dossier()}, FeatureConfig{});

  FeatureVector run(const ProjectDossier& d) const { return featurize_project(d, topics, encoder, tagger, context); }
};

bool only_span_differs(const FeatureVector& a, const FeatureVector& b, Aspect changed) {
  for (const auto& [aspect, span] : a.spans.spans) {
    const bool same = a.values.segment(span.start, span.length) == b.values.segment(span.start, span.length);
    if ((aspect == changed) == same) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("layout tiles the vector and sizes the whitepaper span") {
  const auto spans = feature_layout(300, 50, 20);
  CHECK(spans.find(Aspect::whitepaper)->length == 350);
  CHECK(spans.tiles());
  Index sum = 0;
  for (const auto& [a, s] : spans.spans) sum += s.length;
  CHECK(sum == spans.total());
  CHECK(spans.topic_offset == 300);
  CHECK(spans.topic_count == 50);
  CHECK(spans.find(Aspect::other)->length == 23);
  CHECK(aspect_from_string(aspect_name(Aspect::github)) == Aspect::github);
  CHECK_THROWS_AS(aspect_from_string("price"), InvalidInput);
}

TEST_CASE("team features from tagged bios") {
  const auto dicts = fixture_dictionaries();
  const auto tagger = rule_tagger(dicts);
  const FounderIndex none;
  const auto born = extract_team_manual_features({{"A", "A was born in 1990."}}, tagger, dicts, none, "p", 2017);
  CHECK(born.age == 27.0);
  CHECK(born.age_known);
  CHECK(born.has_bio);

  const auto empty = extract_team_manual_features({}, tagger, dicts, none, "p", 2017);
  CHECK(empty.encode() == Vector::Zero(TeamManualFeatures::kDim));

  const auto degree = extract_team_manual_features({{"B", "B is master of University of Pennsylvania."}}, tagger,
                                                   dicts, none, "p", 2017);
  CHECK(degree.degree_level == TeamManualFeatures::master);
  CHECK_FALSE(degree.age_known);

  const auto mixed = extract_team_manual_features(
      {{"C", "C has a PhD and worked at Acme Corp."}, {"D", "D holds a master degree."}}, tagger, dicts, none, "p", 2017);
  CHECK(mixed.degree_level == TeamManualFeatures::phd);
  CHECK(mixed.known_company);
  CHECK(mixed.jobs_3yr == 0.5);

  CHECK(degree_from_token("MSc") == TeamManualFeatures::master);
  CHECK(degree_from_token("BSc") == TeamManualFeatures::bachelor);
  CHECK(degree_from_token("degree") == TeamManualFeatures::none);
}

TEST_CASE("founder index flags people seen in another project") {
  ProjectDossier a, b;
  a.id = "a";
  b.id = "b";
  a.team_bios = {{"Jane  Doe", ""}};
  b.team_bios = {{"jane doe", ""}, {"Solo Person", ""}};
  const FounderIndex index({a, b});
  CHECK(index.involved_elsewhere("Jane Doe", "a"));
  CHECK_FALSE(index.involved_elsewhere("Solo Person", "b"));
  const auto f = extract_team_manual_features(b.team_bios, rule_tagger({}), {}, index, "b", 2017);
  CHECK(f.other_icos);
  CHECK_FALSE(f.has_bio);
}

TEST_CASE("platform vocabulary ranks by frequency then name") {
  std::vector<ProjectDossier> corpus(5);
  const std::vector<std::string> names = {"waves", "neo", "waves", "ethereum", "neo"};
  for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].platform = names[i];
  CHECK(platform_vocabulary(corpus, 20) == std::vector<std::string>{"neo", "waves", "ethereum"});
  CHECK(platform_vocabulary(corpus, 1) == std::vector<std::string>{"neo"});
}

TEST_CASE("featurizing fills each span from its own source") {
  const Fixture fx;
  const auto d = full_dossier();
  const auto fv = fx.run(d);
  CHECK(fv.spans.tiles());
  CHECK(fv.values.size() == fv.spans.total());
  const Index D = 4;

  const auto wp = fv.values.segment(fv.spans.find(Aspect::whitepaper)->start, D + 2);
  CHECK(wp.tail(2).sum() == doctest::Approx(1.0));
  CHECK(wp.head(D).norm() > 0.0);

  const auto gh = fv.values.segment(fv.spans.find(Aspect::github)->start, D + 5);
  CHECK(gh(D) == 1.0);
  CHECK(gh(D + 1) == doctest::Approx(std::log(3.0)));
  CHECK(gh(D + 2) == doctest::Approx(std::log(100.0)));
  CHECK(gh(D + 4) == doctest::Approx(std::log(10.0)));

  const auto team = fv.values.segment(fv.spans.find(Aspect::team)->start, D + TeamManualFeatures::kDim);
  CHECK(team(D + 1) == 2.0);  // master
  CHECK(team(D + 3) == 27.0);

  const auto other = fv.values.segment(fv.spans.find(Aspect::other)->start, 4);
  CHECK(other(0) == 1.0);  // ethereum is the only observed platform
  CHECK(other(1) == 0.0);
  CHECK(other(2) == doctest::Approx(std::log1p(1e6)));
  CHECK(other(3) == 1.0);

  auto unseen = d;
  unseen.platform = "stellar";
  CHECK(fx.run(unseen).values(fv.spans.find(Aspect::other)->start + 1) == 1.0);
}

TEST_CASE("featurizing is deterministic and aspect-local") {
  const Fixture fx;
  const auto d = full_dossier();
  const auto fv = fx.run(d);
  CHECK(fx.run(d).values == fv.values);

  auto site = d;
  site.website_text = "A completely different pitch with new words.";
  CHECK(only_span_differs(fv, fx.run(site), Aspect::website));

  auto repo = d;
  repo.github->n_commits = 5;
  CHECK(only_span_differs(fv, fx.run(repo), Aspect::github));
}

TEST_CASE("a missing aspect equals the erased span") {
  const Fixture fx;
  const auto d = full_dossier();
  const auto fv = fx.run(d);

  auto no_site = d;
  no_site.website_text.reset();
  const auto without = fx.run(no_site);
  const auto s = *fv.spans.find(Aspect::website);
  CHECK(without.values.segment(s.start, s.length) == Vector::Zero(s.length));
  CHECK(erase_aspect(fv.values, fv.spans, Aspect::website) == without.values);

  auto no_repo = d;
  no_repo.github.reset();
  CHECK(erase_aspect(fv.values, fv.spans, Aspect::github) == fx.run(no_repo).values);

  auto no_paper = d;
  no_paper.white_paper.reset();
  CHECK(erase_aspect(fv.values, fv.spans, Aspect::whitepaper) == fx.run(no_paper).values);
}

TEST_CASE("a white paper outside the topic vocabulary gets the prior mean mixture") {
  const Fixture fx;
  auto d = full_dossier();
  d.white_paper = "Nothing here matches.";
  const auto fv = fx.run(d);
  const auto s = *fv.spans.find(Aspect::whitepaper);
  CHECK(fv.values.segment(s.start + 4, 2) == Vector::Constant(2, 0.5));
}

TEST_CASE("untrained component models are rejected") {
  const Fixture fx;
  const auto d = full_dossier();
  CHECK_THROWS_AS(featurize_project(d, TopicModel{}, fx.encoder, fx.tagger, fx.context), InvalidInput);
  CHECK_THROWS_AS(featurize_project(d, fx.topics, EncoderStack{}, fx.tagger, fx.context), InvalidInput);
  CHECK_THROWS_AS(featurize_project(d, fx.topics, fx.encoder, TaggerModel{}, fx.context), InvalidInput);
}

TEST_CASE("aspect selection and serialization") {
  const Fixture fx;
  const auto fv = fx.run(full_dossier());
  const auto sub = select_aspects(fv, {Aspect::other, Aspect::github});
  REQUIRE(sub.spans.spans.size() == 2);
  CHECK(sub.spans.spans[0].first == Aspect::github);
  CHECK(sub.spans.spans[0].second.start == 0);
  CHECK(sub.spans.tiles());
  CHECK(sub.spans.topic_count == 0);
  const auto gh = *fv.spans.find(Aspect::github);
  CHECK(sub.values.head(gh.length) == fv.values.segment(gh.start, gh.length));

  const auto back = feature_vector_from_json(feature_vector_to_json(fv));
  CHECK(back.dossier_id == fv.dossier_id);
  CHECK(back.values == fv.values);
  CHECK(back.spans == fv.spans);

  const auto path = (testing::scratch_dir("features") / "features.jsonl").string();
  save_feature_vectors(path, {fv, sub});
  const auto loaded = load_feature_vectors(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[1].values == sub.values);
  CHECK(loaded[1].spans == sub.spans);
}
