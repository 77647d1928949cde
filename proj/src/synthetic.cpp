#include "icorate/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icorate/random.hpp"

namespace icorate {

namespace {

const std::vector<std::string> kFirstNames = {"Alice", "Bob",   "Carol", "David", "Elena", "Farid", "Grace",
                                              "Hiro",  "Irene", "Jonas", "Kavya", "Liam",  "Mei",   "Nikolai",
                                              "Olga",  "Pedro", "Quinn", "Rosa",  "Sven",  "Tariq"};
const std::vector<std::string> kLastNames = {"Smith",  "Chen",    "Garcia", "Kowalski", "Nakamura", "Okafor",
                                             "Petrov", "Rossi",   "Schmidt", "Tanaka",  "Usman",    "Varga",
                                             "Wang",   "Yilmaz",  "Zhou",    "Moreau",  "Larsen",   "Haddad"};

using Phrase = std::vector<std::string>;

const std::vector<Phrase> kUniversities = {
    {"University", "of", "Pennsylvania"}, {"Peking", "University"},  {"Stanford", "University"},
    {"MIT"},                              {"Tsinghua", "University"}, {"University", "of", "Oxford"},
    {"ETH", "Zurich"},                    {"Harvard", "University"},  {"University", "of", "Toronto"},
    {"National", "University", "of", "Singapore"}};
const std::vector<Phrase> kKnownCompanies = {{"Goldman", "Sachs"}, {"Google"},          {"IBM"},
                                             {"Microsoft"},        {"Deloitte"},        {"JPMorgan"},
                                             {"Samsung"},          {"Accenture"},       {"Barclays"},
                                             {"Tencent"}};
// Not in the company dictionary, so known_company varies across teams.
const std::vector<Phrase> kUnknownCompanies = {{"Bluefin", "Labs"}, {"Nimbus", "Ventures"}, {"Orbit", "Systems"},
                                               {"Quarry", "Digital"}, {"Helix", "Works"}};
const std::vector<std::string> kDegrees = {"bachelor", "master", "PhD", "MBA", "BSc", "MSc"};
const std::vector<Phrase> kAwards = {{"Turing", "Award"},     {"Nobel", "Prize"},        {"Webby", "Award"},
                                     {"Thiel", "Fellowship"}, {"Forbes", "30", "Under", "30"}, {"Gold", "Medal"}};
const std::vector<std::string> kMonths = {"January", "March", "May", "July", "September", "November"};
const std::vector<std::string> kRoles = {"CEO", "CTO", "engineer", "analyst", "director", "advisor"};

const std::vector<std::string> kWebsiteWords = {
    "join",   "community", "token",  "sale",    "roadmap", "whitelist", "partners", "launch", "wallet",   "team",
    "news",   "contact",   "faq",    "mission", "vision",  "platform",  "users",    "global", "ecosystem", "register"};
const std::vector<std::string> kReadmeWords = {
    "install", "build",   "node",    "contract", "deploy", "test",   "config", "script", "module", "api",
    "docs",    "license", "release", "compile",  "client", "server", "docker", "npm",    "run",    "setup"};
const std::vector<std::string> kPlatforms = {"ethereum", "waves", "neo", "stellar", "own"};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.below(items.size())];
}

struct Clause {
  std::vector<std::string> tokens;
  std::vector<int> labels;

  void outside(std::initializer_list<std::string> words) {
    for (const auto& w : words) {
      tokens.push_back(w);
      labels.push_back(kOutside);
    }
  }
  void span(const Phrase& words, BioCategory c) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      tokens.push_back(words[i]);
      labels.push_back(i == 0 ? begin_label(c) : inside_label(c));
    }
  }
  void append(const Clause& other) {
    tokens.insert(tokens.end(), other.tokens.begin(), other.tokens.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
  }
};

Phrase company(Rng& rng) {
  return rng.uniform() < 0.7 ? pick(rng, kKnownCompanies) : pick(rng, kUnknownCompanies);
}

Clause born_clause(Rng& rng) {
  Clause c;
  const std::string year = std::to_string(1950 + rng.below(50));
  switch (rng.below(3)) {
    case 0:
      c.outside({"was", "born", "in"});
      c.span({year}, BioCategory::born_date);
      break;
    case 1:
      c.outside({"was", "born", "on"});
      c.span({std::to_string(1 + rng.below(28)), pick(rng, kMonths), year}, BioCategory::born_date);
      break;
    default:
      c.outside({"born", "in"});
      c.span({year}, BioCategory::born_date);
      break;
  }
  return c;
}

Clause education_clause(Rng& rng) {
  Clause c;
  const Phrase degree = {pick(rng, kDegrees)};
  const Phrase& uni = pick(rng, kUniversities);
  switch (rng.below(3)) {
    case 0:
      c.outside({"holds", "a"});
      c.span(degree, BioCategory::degree);
      c.outside({"from"});
      c.span(uni, BioCategory::university);
      break;
    case 1:
      c.outside({"graduated", "from"});
      c.span(uni, BioCategory::university);
      c.outside({"with", "a"});
      c.span(degree, BioCategory::degree);
      c.outside({"degree"});
      break;
    default:
      c.outside({"received", "a"});
      c.span(degree, BioCategory::degree);
      c.outside({"of"});
      c.span(uni, BioCategory::university);
      break;
  }
  return c;
}

Clause work_clause(Rng& rng) {
  Clause c;
  switch (rng.below(3)) {
    case 0:
      c.outside({"worked", "at"});
      c.span(company(rng), BioCategory::company);
      break;
    case 1:
      c.outside({"served", "as"});
      c.outside({pick(rng, kRoles)});
      c.outside({"of"});
      c.span(company(rng), BioCategory::company);
      break;
    default:
      c.outside({"previously", "joined"});
      c.span(company(rng), BioCategory::company);
      break;
  }
  return c;
}

Clause award_clause(Rng& rng) {
  Clause c;
  c.outside({rng.below(2) == 0 ? "won" : "received", "the"});
  c.span(pick(rng, kAwards), BioCategory::award);
  return c;
}

Clause bio_sentence(Rng& rng, const std::string& first, const std::string& last) {
  using Maker = Clause (*)(Rng&);
  static const std::vector<Maker> makers = {born_clause, education_clause, work_clause, award_clause};
  Clause s;
  s.outside({first, last});
  const std::size_t n = 1 + rng.below(2);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) s.outside({"and"});
    s.append(makers[rng.below(makers.size())](rng));
  }
  return s;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string bag_text(Rng& rng, const std::vector<std::string>& vocab, std::size_t sentences, std::size_t words) {
  std::string text;
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> tokens;
    for (std::size_t w = 0; w < words; ++w) tokens.push_back(pick(rng, vocab));
    if (!text.empty()) text += ' ';
    text += join(tokens) + '.';
  }
  return text;
}

}  // namespace

std::vector<PlantedTopic> default_planted_topics() {
  return {{"gambling",
           {"bet", "casino", "poker", "jackpot", "wager", "roulette", "lottery", "dice", "slots", "blackjack",
            "payout", "odds", "gamble", "bettors", "croupier", "tournament", "sportsbook", "prize", "spin",
            "bonus"}},
          {"supply chain",
           {"logistics", "shipment", "supplier", "warehouse", "freight", "inventory", "provenance", "cargo",
            "tracking", "manufacturer", "retailer", "customs", "container", "procurement", "distribution", "pallet",
            "invoice", "audit", "sourcing", "fleet"}}};
}

Dictionaries synthetic_dictionaries() {
  Dictionaries d;
  for (const auto& p : kKnownCompanies) d.companies.add(normalize_phrase(p, 0, p.size()));
  for (const auto& p : kUniversities) d.universities.add(normalize_phrase(p, 0, p.size()));
  return d;
}

std::vector<LabeledSequence> generate_bio_sequences(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSequence> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Clause c = bio_sentence(rng, pick(rng, kFirstNames), pick(rng, kLastNames));
    out.push_back({TokenSequence{c.tokens, std::nullopt, std::nullopt}, c.labels});
  }
  return out;
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  require(config.n_projects > 0, "synthetic corpus needs at least one project");
  require(config.topics.size() >= 2, "synthetic corpus needs at least two planted topics");
  require(config.scam_topic < config.topics.size(), "scam topic index out of range");
  require(config.signal_strength >= 0.0, "signal strength must be >= 0");
  require(config.noise >= 0.0, "noise must be >= 0");
  require(config.sentences_min >= 1 && config.sentences_min <= config.sentences_max, "bad sentence range");
  require(config.words_per_sentence >= 1, "words per sentence must be >= 1");
  for (const auto& t : config.topics) require(!t.words.empty(), "planted topic '" + t.name + "' has no words");

  SyntheticCorpus data;
  data.config = config;
  data.seed = seed;
  data.dictionaries = synthetic_dictionaries();
  data.bios = generate_bio_sequences(config.n_bio_sequences, fnv1a64("bios", seed));

  Rng rng(seed);
  const std::size_t T = config.topics.size();
  for (std::size_t p = 0; p < config.n_projects; ++p) {
    PlantedProject truth;
    ProjectDossier d;
    d.id = "syn-" + std::to_string(p);
    truth.id = d.id;

    // Scam share uniform on [0,1]; the rest split by random weights.
    std::vector<double> mix(T, 0.0);
    mix[config.scam_topic] = rng.uniform();
    std::vector<double> rest(T, 0.0);
    double rest_sum = 0.0;
    for (std::size_t k = 0; k < T; ++k) {
      if (k == config.scam_topic) continue;
      rest[k] = rng.uniform(0.1, 1.0);
      rest_sum += rest[k];
    }
    for (std::size_t k = 0; k < T; ++k)
      if (k != config.scam_topic) mix[k] = (1.0 - mix[config.scam_topic]) * rest[k] / rest_sum;
    truth.topic_mixture = mix;

    const std::size_t n_sent =
        config.sentences_min + rng.below(config.sentences_max - config.sentences_min + 1);
    std::string paper;
    for (std::size_t s = 0; s < n_sent; ++s) {
      std::vector<std::string> tokens;
      for (std::size_t w = 0; w < config.words_per_sentence; ++w) {
        const auto k = rng.categorical(mix);
        tokens.push_back(pick(rng, config.topics[k].words));
      }
      tokens.front()[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(tokens.front()[0])));
      if (!paper.empty()) paper += ' ';
      paper += join(tokens) + '.';
    }
    d.white_paper = paper;

    truth.github_signal = rng.uniform(-1.0, 1.0);
    if (rng.uniform() < 0.9) {
      // Activity lives in commits per file, so it carries no intercept: ln(commits / files) = a.
      GithubMeta g;
      const double a = truth.github_signal;
      g.n_commits = static_cast<std::int64_t>(std::round(std::exp(4.0 + 0.5 * a + 0.02 * rng.normal())));
      g.n_files = static_cast<std::int64_t>(std::round(std::exp(4.0 - 0.5 * a + 0.02 * rng.normal())));
      g.n_branches = static_cast<std::int64_t>(std::round(std::exp(rng.uniform(0.5, 2.5))));
      g.loc_total = static_cast<std::int64_t>(std::round(std::exp(rng.uniform(7.0, 10.0))));
      g.readme_text = bag_text(rng, kReadmeWords, 2 + rng.below(3), 6);
      d.github = g;
    } else {
      // Nothing observable, so nothing planted.
      truth.github_signal = 0.0;
    }

    const std::size_t members = rng.below(4);
    for (std::size_t m = 0; m < members; ++m) {
      const std::string first = pick(rng, kFirstNames), last = pick(rng, kLastNames);
      std::string bio;
      const std::size_t sentences = 1 + rng.below(3);
      for (std::size_t s = 0; s < sentences; ++s) {
        if (!bio.empty()) bio += ' ';
        bio += join(bio_sentence(rng, first, last).tokens) + '.';
      }
      d.team_bios.push_back({first + " " + last, bio});
    }

    if (rng.uniform() < 0.85) d.website_text = bag_text(rng, kWebsiteWords, 2 + rng.below(4), 7);
    if (rng.uniform() < 0.9) d.platform = pick(rng, kPlatforms);
    if (rng.uniform() < 0.8) d.total_supply = std::round(std::pow(10.0, rng.uniform(6.0, 10.0)));
    d.cap_unlimited = rng.uniform() < 0.2;
    d.ico_year = 2014 + static_cast<int>(rng.below(5));

    const double scam_share = mix[config.scam_topic];
    truth.log_ratio =
        config.signal_strength * (1.5 * truth.github_signal - 3.0 * (scam_share - 0.5)) + config.noise * rng.normal();
    d.price_series.ico_price = std::pow(10.0, rng.uniform(-2.0, 1.0));
    d.price_series.price_at[config.horizon_days] = d.price_series.ico_price * std::exp(truth.log_ratio);

    data.dossiers.push_back(std::move(d));
    data.truth.push_back(std::move(truth));
  }
  return data;
}

std::string synthetic_truth_json(const SyntheticCorpus& data) {
  nlohmann::json j;
  j["seed"] = data.seed;
  const auto& c = data.config;
  j["config"] = {{"n_projects", c.n_projects},
                 {"scam_topic", c.scam_topic},
                 {"signal_strength", c.signal_strength},
                 {"noise", c.noise},
                 {"words_per_sentence", c.words_per_sentence},
                 {"sentences_min", c.sentences_min},
                 {"sentences_max", c.sentences_max},
                 {"n_bio_sequences", c.n_bio_sequences},
                 {"horizon_days", c.horizon_days}};
  nlohmann::json topics = nlohmann::json::array();
  for (const auto& t : c.topics) topics.push_back({{"name", t.name}, {"words", t.words}});
  j["topics"] = topics;
  j["price_model"] = "ln ratio = strength * (1.5 * github_signal - 3 * (scam_share - 0.5)) + noise * N(0,1)";
  nlohmann::json projects = nlohmann::json::array();
  for (const auto& p : data.truth) {
    projects.push_back({{"id", p.id},
                        {"topic_mixture", p.topic_mixture},
                        {"github_signal", p.github_signal},
                        {"log_ratio", p.log_ratio}});
  }
  j["projects"] = projects;
  return j.dump(2) + "\n";
}

SyntheticFiles write_synthetic(const SyntheticCorpus& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  SyntheticFiles f{(root / "corpus.jsonl").string(), (root / "truth.json").string(), (root / "bios.tsv").string(),
                   (root / "companies.txt").string(), (root / "universities.txt").string()};
  save_corpus(f.corpus, data.dossiers);
  {
    std::ofstream out(f.truth, std::ios::binary);
    if (!out) throw Error("cannot write '" + f.truth + "'");
    out << synthetic_truth_json(data);
  }
  write_labeled_sequences(f.bios, data.bios);
  save_dictionary(data.dictionaries.companies, f.companies);
  save_dictionary(data.dictionaries.universities, f.universities);
  return f;
}

}  // namespace icorate
