#include <doctest.h>

#include <cstring>

#include "../support/files.hpp"
#include "../support/topic_match.hpp"
#include "icorate/topics.hpp"

using namespace icorate;

namespace {

std::vector<TokenizedDoc> planted_docs(std::size_t n, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_projects = n;
  cfg.n_bio_sequences = 1;
  return testing::white_papers(generate_synthetic(cfg, seed));
}

LdaOptions two_topics(int iterations = 100) {
  LdaOptions o;
  o.topics = 2;
  o.iterations = iterations;
  o.seed = 3;
  return o;
}

TokenizedDoc words_doc(const std::vector<std::string>& words) {
  TokenizedDoc d;
  d.sentences.push_back(words);
  return d;
}

}  // namespace

TEST_CASE("defaults follow the documented priors") {
  LdaOptions o;
  CHECK(o.topics == 50);
  CHECK(o.iterations == 100);
  CHECK(o.beta == 0.01);
  CHECK(stopwords().size() == 300);
}

TEST_CASE("vocabulary is lowercased, sorted and filtered") {
  const auto docs = std::vector<TokenizedDoc>{words_doc({"Token", "token", "TOKEN", "rare", "the", "the", "the"}),
                                              words_doc({"chain", "chain", "chain"})};
  const auto vocab = build_vocabulary(docs, VocabularyOptions{});
  CHECK(vocab == std::vector<std::string>{"chain", "token"});
  VocabularyOptions keep_all{1, false};
  CHECK(build_vocabulary(docs, keep_all) == std::vector<std::string>{"chain", "rare", "the", "token"});
}

TEST_CASE("a one-word corpus puts every topic's mass on that word") {
  const auto model = fit_lda({words_doc({"token", "token", "token", "token"})}, two_topics(10));
  REQUIRE(model.vocab_size() == 1);
  CHECK(model.phi.isApprox(Matrix::Ones(2, 1)));
  CHECK_THROWS_AS(fit_lda({words_doc({"the", "of", "and"})}, two_topics()), InvalidInput);
  LdaOptions one = two_topics();
  one.topics = 1;
  CHECK_THROWS_AS(fit_lda({words_doc({"token", "token", "token"})}, one), InvalidInput);
}

TEST_CASE("Gibbs counts stay exact tallies after every sweep") {
  int sweeps = 0;
  bool consistent = true;
  const auto docs = planted_docs(40, 2);
  const auto model = fit_lda(docs, two_topics(20), [&](const GibbsSampler& s, int) {
    ++sweeps;
    consistent = consistent && s.counts_consistent();
    // Per-document topic counts sum to the document length; topic-word rows sum to n(k).
    for (Index d = 0; d < s.doc_topic().rows(); ++d)
      consistent = consistent && s.doc_topic().row(d).sum() == static_cast<std::int64_t>(s.assignments()[d].size());
    for (Index k = 0; k < s.topic_word().rows(); ++k)
      consistent = consistent && s.topic_word().row(k).sum() == s.topic_totals()(k);
  });
  CHECK(sweeps == 20);
  CHECK(consistent);
  for (Index k = 0; k < model.topics(); ++k) CHECK(model.phi.row(k).sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((model.phi.array() > 0.0).all());
  for (Index d = 0; d < model.theta.rows(); ++d) CHECK(model.theta.row(d).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("planted topics are recovered and fold-in finds them") {
  SyntheticConfig cfg;
  cfg.n_projects = 200;
  cfg.n_bio_sequences = 1;
  const auto data = generate_synthetic(cfg, 8);
  const auto model = fit_lda(testing::white_papers(data), two_topics());
  const auto match = testing::match_topics(model, cfg.topics, 20);
  CHECK(match.purity >= 0.9);

  // Its 20 planted words fill the top 20 slots of the matched topic.
  for (Index k = 0; k < 2; ++k) {
    const auto& planted = cfg.topics[static_cast<std::size_t>(match.planted_for_topic[static_cast<std::size_t>(k)])];
    const std::set<std::string> words(planted.words.begin(), planted.words.end());
    for (const auto& w : top_words(model, k, 20)) CHECK(words.contains(w));
  }

  const auto& a = cfg.topics[0].words;
  // Long enough that the 50/K prior does not dominate the counts.
  std::vector<std::string> words;
  for (int r = 0; r < 10; ++r) words.insert(words.end(), a.begin(), a.end());
  const auto doc = words_doc(words);
  const Vector theta = infer_mixture(model, doc, 50, 4);
  const auto topic_a = static_cast<Index>(
      std::find(match.planted_for_topic.begin(), match.planted_for_topic.end(), 0) - match.planted_for_topic.begin());
  CHECK(theta(topic_a) >= 0.8);
  CHECK(theta.sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(infer_mixture(model, doc, 50, 4) == theta);
  CHECK_THROWS_AS(infer_mixture(model, words_doc({"unrelated", "words"}), 50, 4), InvalidInput);
}

TEST_CASE("fold-in under a uniform phi gives a near-uniform mixture") {
  TopicModel m;
  m.vocab = {"alpha", "beta"};
  m.phi = Matrix::Constant(2, 2, 0.5);
  m.alpha = 25.0;
  m.beta = 0.01;
  m.index_vocab();
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) words.push_back(i % 2 ? "alpha" : "beta");
  double mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Vector theta = infer_mixture(m, words_doc(words), 50, seed);
    CHECK(std::abs(theta(0) - 0.5) < 0.15);
    mean += theta(0) / 10.0;
  }
  CHECK(std::abs(mean - 0.5) < 0.05);
}

TEST_CASE("top_words ranks by phi with ties to the lower index") {
  TopicModel m;
  m.vocab = {"a", "b", "c"};
  m.phi.resize(2, 3);
  m.phi << 0.2, 0.6, 0.2, 0.4, 0.2, 0.4;
  m.index_vocab();
  CHECK(top_words(m, 0, 1) == std::vector<std::string>{"b"});
  CHECK(top_words(m, 1, 3) == std::vector<std::string>{"a", "c", "b"});
  CHECK_THROWS_AS(top_words(m, 2, 1), InvalidInput);
  CHECK_THROWS_AS(top_words(m, 0, 4), InvalidInput);
}

TEST_CASE("permuting the corpus yields the same topics up to relabeling") {
  auto docs = planted_docs(80, 12);
  const auto a = fit_lda(docs, two_topics(60));
  std::reverse(docs.begin(), docs.end());
  const auto b = fit_lda(docs, two_topics(60));
  auto top_set = [](const TopicModel& m, Index k) {
    const auto w = top_words(m, k, 20);
    return std::set<std::string>(w.begin(), w.end());
  };
  const bool same = top_set(a, 0) == top_set(b, 0) && top_set(a, 1) == top_set(b, 1);
  const bool swapped = top_set(a, 0) == top_set(b, 1) && top_set(a, 1) == top_set(b, 0);
  CHECK((same || swapped));
}

TEST_CASE("topic model round-trips bit-exactly") {
  const auto model = fit_lda(planted_docs(30, 1), two_topics(10));
  const auto path = (testing::scratch_dir("lda") / "lda.bin").string();
  save_topic_model(model, path);
  const auto loaded = load_topic_model(path);
  CHECK(loaded.vocab == model.vocab);
  CHECK(std::memcmp(loaded.phi.data(), model.phi.data(), sizeof(double) * static_cast<std::size_t>(model.phi.size())) == 0);
  CHECK(loaded.alpha == model.alpha);
  CHECK(loaded.n_train_docs == model.n_train_docs);
  const auto doc = planted_docs(1, 77).front();
  CHECK(infer_mixture(loaded, doc, 20, 5) == infer_mixture(model, doc, 20, 5));
}
