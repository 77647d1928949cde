#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icorate/corpus.hpp"
#include "icorate/tagger.hpp"

namespace icorate {

struct PlantedTopic {
  std::string name;
  std::vector<std::string> words;
};

/// Two disjoint 20-word topics: a gambling-style one and a supply-chain one.
std::vector<PlantedTopic> default_planted_topics();

struct SyntheticConfig {
  std::size_t n_projects = 200;
  std::vector<PlantedTopic> topics = default_planted_topics();
  std::size_t scam_topic = 0;      // share of this topic lowers the price ratio
  double signal_strength = 1.0;    // 0 makes prices independent of every feature
  double noise = 0.15;             // sd of the log-ratio noise
  std::size_t sentences_min = 8, sentences_max = 14;
  std::size_t words_per_sentence = 8;
  std::size_t n_bio_sequences = 500;
  int horizon_days = 365;
};

struct PlantedProject {
  std::string id;
  std::vector<double> topic_mixture;
  double github_signal = 0.0;  // in [-1, 1]; higher means more repository activity
  double log_ratio = 0.0;      // ln(price(t) / price(0))
};

struct SyntheticCorpus {
  SyntheticConfig config;
  std::uint64_t seed = 0;
  std::vector<ProjectDossier> dossiers;
  std::vector<PlantedProject> truth;
  std::vector<LabeledSequence> bios;
  Dictionaries dictionaries;
};

/// Planted structure: white papers are bags of planted-topic words mixed per project; the
/// price log-ratio is strength * (1.5 * github_signal - 3 * (scam share - 1/2)) + noise, where
/// github_signal = ln(commits / files) up to rounding. Both planted terms are intercept-free in
/// the features (topic shares sum to one).
/// Team, website and other fields are drawn independently of the price.
SyntheticCorpus generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

/// Annotated bio sentences from fixed patterns covering all five categories.
std::vector<LabeledSequence> generate_bio_sequences(std::size_t n, std::uint64_t seed);
Dictionaries synthetic_dictionaries();

struct SyntheticFiles {
  std::string corpus, truth, bios, companies, universities;
};

/// Writes corpus.jsonl, truth.json, bios.tsv, companies.txt and universities.txt into dir.
SyntheticFiles write_synthetic(const SyntheticCorpus& data, const std::string& dir);

std::string synthetic_truth_json(const SyntheticCorpus& data);

}  // namespace icorate
