#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/files.hpp"
#include "icorate/corpus.hpp"
#include "icorate/synthetic.hpp"

using namespace icorate;
using icorate::testing::read_file;
using icorate::testing::scratch_dir;
using icorate::testing::write_file;

namespace {

const char* kRecordA =
    R"({"id":"a","white_paper":"We build a chain.","team_bios":[["Ann Lee","Ann was born in 1980."]],)"
    R"("cap_unlimited":false,"price_series":{"ico_price":2.0,"price_at":{"365":1.0}}})";
const char* kRecordB =
    R"({"id":"b","team_bios":[],"website_text":"Join us.","github":{"n_branches":2,"n_commits":10,)"
    R"("loc_total":500,"n_files":7},"platform":"ethereum","total_supply":1000,"cap_unlimited":true,)"
    R"("price_series":{"ico_price":1.0,"price_at":{"180":0.5,"365":0.25}}})";

PriceSeries series(double ratio) {
  PriceSeries s;
  s.ico_price = 2.0;
  s.price_at[365] = 2.0 * ratio;
  return s;
}

TokenizedDoc doc_with_words(std::size_t n) {
  TokenizedDoc d;
  d.sentences.push_back(Sentence(n, "w"));
  return d;
}

}  // namespace

TEST_CASE("load_corpus reads records and keeps absent fields absent") {
  const auto dir = scratch_dir("corpus_load");
  write_file(dir / "c.jsonl", std::string(kRecordA) + "\n" + kRecordB + "\n");
  const auto corpus = load_corpus((dir / "c.jsonl").string());
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].white_paper.has_value());
  CHECK_FALSE(corpus[1].white_paper.has_value());
  CHECK_FALSE(corpus[0].github.has_value());
  CHECK(corpus[1].github->n_commits == 10);
  CHECK(corpus[0].team_bios.at(0).name == "Ann Lee");
  CHECK(corpus[1].price_series.ratio(365) == doctest::Approx(0.25));
  CHECK(*corpus[1].total_supply == 1000.0);
}

TEST_CASE("load_corpus rejects bad records with the line number") {
  const auto dir = scratch_dir("corpus_bad");
  auto expect_line = [&](const std::string& body, const std::string& needle) {
    write_file(dir / "c.jsonl", body);
    try {
      load_corpus((dir / "c.jsonl").string());
      FAIL("expected an error");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  std::string zero_price = kRecordA;
  zero_price.replace(zero_price.find("\"ico_price\":2.0"), 15, "\"ico_price\":0");
  expect_line(std::string(kRecordB) + "\n" + zero_price + "\n", ":2:");
  expect_line(std::string(kRecordA) + "\n{not json\n", ":2:");
  expect_line(std::string(kRecordA) + "\n" + kRecordA + "\n", "duplicate");
  std::string negative_supply = kRecordB;
  negative_supply.replace(negative_supply.find("\"total_supply\":1000"), 19, "\"total_supply\":-1");
  expect_line(negative_supply + "\n", ":1:");
}

TEST_CASE("dossiers survive a save and load") {
  const auto dir = scratch_dir("corpus_roundtrip");
  write_file(dir / "c.jsonl", std::string(kRecordA) + "\n" + kRecordB + "\n");
  const auto corpus = load_corpus((dir / "c.jsonl").string());
  save_corpus((dir / "d.jsonl").string(), corpus);
  const auto again = load_corpus((dir / "d.jsonl").string());
  for (std::size_t i = 0; i < corpus.size(); ++i) CHECK(dossier_to_json(again[i]) == dossier_to_json(corpus[i]));
}

TEST_CASE("tokenize splits sentences and tokens") {
  const auto d = tokenize("Hello world. Bye.");
  CHECK(d.sentence_lengths() == std::vector<std::size_t>{2, 1});
  CHECK(d.sentences[0][0] == "Hello");

  const auto one = tokenize("one");
  CHECK(one.n_sentences() == 1);
  CHECK(one.n_tokens() == 1);

  CHECK_THROWS_AS(tokenize(""), InvalidInput);
  CHECK_THROWS_AS(tokenize("  \n\t"), InvalidInput);

  // Terminal punctuation needs trailing whitespace, so "3.5" does not end a sentence.
  const auto nums = tokenize("Version 3.5 is out! Really? yes");
  CHECK(nums.sentence_lengths() == std::vector<std::size_t>{5, 1, 1});
  CHECK(tokenize("Mixed CASE").lowercased_tokens() == std::vector<std::string>{"mixed", "case"});
}

TEST_CASE("derive_target in log and literal modes") {
  CHECK(derive_target(series(1.0), 365) == doctest::Approx(0.5));
  CHECK(derive_target(series(0.01), 365) == doctest::Approx(0.00990).epsilon(1e-3));
  CHECK(derive_target(series(1.0), 365, TargetMode::literal) == doctest::Approx(0.7311).epsilon(1e-4));
  CHECK_THROWS_AS(derive_target(series(1.0), 180), InvalidInput);

  // Strictly increasing, and r and 1/r map to c and 1 - c.
  double prev = 0.0;
  for (double r : {0.001, 0.1, 0.7, 1.0, 3.0, 90.0}) {
    const double c = derive_target(series(r), 365);
    CHECK(c > prev);
    CHECK(c + derive_target(series(1.0 / r), 365) == doctest::Approx(1.0).epsilon(1e-12));
    prev = c;
  }
}

TEST_CASE("derive_label is the inclusive indicator and monotone in m") {
  CHECK(derive_label(series(0.005), 365, 0.01) == 1);
  CHECK(derive_label(series(0.5), 365, 0.1) == 0);
  CHECK(derive_label(series(1.0), 365, 1.0) == 1);
  CHECK_THROWS_AS(derive_label(series(1.0), 30, 1.0), InvalidInput);
  CHECK_THROWS_AS(derive_label(series(1.0), 365, 0.0), InvalidInput);
  for (double r : {0.001, 0.05, 0.3, 1.0, 2.0}) {
    int prev = 0;
    for (double m : {0.01, 0.1, 0.5, 1.0, 5.0}) {
      const int y = derive_label(series(r), 365, m);
      CHECK(y == (r <= m ? 1 : 0));
      CHECK(y >= prev);
      prev = y;
    }
  }
}

TEST_CASE("split_dataset sizes, determinism and partition") {
  auto counts = [](const std::vector<Split>& s) {
    std::array<std::size_t, 3> c{};
    for (auto x : s) ++c[static_cast<std::size_t>(x)];
    return c;
  };
  CHECK(counts(split_dataset(100, 3)) == std::array<std::size_t, 3>{80, 10, 10});
  CHECK(counts(split_dataset(10, 3)) == std::array<std::size_t, 3>{8, 1, 1});
  CHECK(counts(split_dataset(37, 3)) == std::array<std::size_t, 3>{29, 3, 5});
  CHECK(split_dataset(50, 9) == split_dataset(50, 9));
  CHECK(split_dataset(50, 9) != split_dataset(50, 10));
  CHECK_THROWS_AS(split_dataset(9, 1), InvalidInput);

  std::vector<LabeledExample> ex(20);
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i].dossier_id = "p" + std::to_string(i);
  split_dataset(ex, 4);
  std::set<std::string> ids;
  for (const auto& e : ex) ids.insert(e.dossier_id);
  CHECK(ids.size() == 20);
}

TEST_CASE("corpus_stats uses the population standard deviation") {
  const auto s = corpus_stats({doc_with_words(2), doc_with_words(4), doc_with_words(6)});
  CHECK(s.n_docs == 3);
  CHECK(s.words.mean == doctest::Approx(4.0));
  CHECK(s.words.std == doctest::Approx(1.633).epsilon(1e-3));
  CHECK(s.words.max == 6);
  CHECK(s.words.min == 2);
  CHECK(s.words.mean * static_cast<double>(s.n_docs) == static_cast<double>(s.words.total));

  const auto one = corpus_stats({doc_with_words(5)});
  CHECK(one.words.mean == 5.0);
  CHECK(one.words.std == 0.0);
  CHECK_THROWS_AS(corpus_stats({}), InvalidInput);

  const auto table = format_stats_table(s);
  CHECK(table.find("Ave Word") != std::string::npos);
  CHECK(table.find("population") != std::string::npos);
}

TEST_CASE("generate_synthetic validates its config and is deterministic") {
  SyntheticConfig cfg;
  cfg.n_projects = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg, 1), InvalidInput);

  cfg.n_projects = 30;
  cfg.n_bio_sequences = 20;
  const auto a = write_synthetic(generate_synthetic(cfg, 5), scratch_dir("synth_a").string());
  const auto b = write_synthetic(generate_synthetic(cfg, 5), scratch_dir("synth_b").string());
  for (auto [x, y] : {std::pair{a.corpus, b.corpus}, {a.truth, b.truth}, {a.bios, b.bios},
                      {a.companies, b.companies}, {a.universities, b.universities}})
    CHECK(read_file(x) == read_file(y));
  const auto c = write_synthetic(generate_synthetic(cfg, 6), scratch_dir("synth_c").string());
  CHECK(read_file(a.corpus) != read_file(c.corpus));

  const auto corpus = load_corpus(a.corpus);
  CHECK(corpus.size() == 30);
}

TEST_CASE("synthetic white papers use only planted words and prices follow the planted signal") {
  SyntheticConfig cfg;
  cfg.n_projects = 200;
  const auto data = generate_synthetic(cfg, 11);
  std::set<std::string> planted;
  for (const auto& t : cfg.topics)
    for (const auto& w : t.words) planted.insert(w);
  for (const auto& d : data.dossiers)
    for (const auto& w : tokenize(*d.white_paper).lowercased_tokens()) CHECK(planted.contains(w));

  auto correlation = [](const SyntheticCorpus& s) {
    std::vector<double> x, y;
    for (const auto& p : s.truth) {
      x.push_back(p.topic_mixture[s.config.scam_topic]);
      y.push_back(p.log_ratio);
    }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  CHECK(correlation(data) < -0.6);
  cfg.signal_strength = 0.0;
  CHECK(std::abs(correlation(generate_synthetic(cfg, 11))) < 0.2);
}

TEST_CASE("synthetic bios cover all five categories with valid BIO labels") {
  const auto bios = generate_bio_sequences(500, 3);
  CHECK(bios.size() == 500);
  std::set<int> seen;
  for (const auto& b : bios) {
    CHECK(b.labels.size() == b.seq.size());
    CHECK(is_valid_bio(b.labels));
    seen.insert(b.labels.begin(), b.labels.end());
  }
  // Degrees are always single tokens, so I-degree never appears.
  for (int l = 0; l < static_cast<int>(kNumLabels); ++l)
    if (l != inside_label(BioCategory::degree)) CHECK_MESSAGE(seen.contains(l), label_to_string(l));
}
