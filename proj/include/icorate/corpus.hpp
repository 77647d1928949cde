#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icorate/common.hpp"

namespace icorate {

struct GithubMeta {
  std::optional<std::string> readme_text;
  std::int64_t n_branches = 0;
  std::int64_t n_commits = 0;
  std::int64_t loc_total = 0;
  std::int64_t n_files = 0;
};

/// Listing price and later prices keyed by days since the ICO.
struct PriceSeries {
  double ico_price = 1.0;
  std::map<int, double> price_at;

  /// price(t) / price(0); throws when the horizon is not recorded.
  double ratio(int horizon_days) const;
};

struct TeamBio {
  std::string name;
  std::string bio;
};

struct ProjectDossier {
  std::string id;
  std::optional<std::string> white_paper;
  std::vector<TeamBio> team_bios;
  std::optional<std::string> website_text;
  std::optional<GithubMeta> github;
  std::optional<std::string> platform;
  std::optional<double> total_supply;
  bool cap_unlimited = false;
  PriceSeries price_series;
  /// Calendar year of the ICO; used to turn a tagged birth year into an age.
  std::optional<int> ico_year;
};

using Sentence = std::vector<std::string>;

/// Sentences of tokens, original casing preserved. Never holds an empty sentence.
struct TokenizedDoc {
  std::vector<Sentence> sentences;

  std::size_t n_sentences() const { return sentences.size(); }
  std::size_t n_tokens() const;
  std::vector<std::size_t> sentence_lengths() const;
  /// All tokens in reading order, lowercased.
  std::vector<std::string> lowercased_tokens() const;
};

enum class Split { train, dev, test };
enum class TargetMode { log, literal };

struct LabeledExample {
  std::string dossier_id;
  double target = 0.5;  // c
  int label = 0;        // y
  Split split = Split::train;
};

struct LengthStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation (divides by n)
  std::size_t max = 0;
  std::size_t min = 0;
  std::size_t total = 0;
};

struct CorpusStats {
  std::size_t n_docs = 0;
  LengthStats words;
  LengthStats sentences;
};

std::string to_string(Split s);
Split split_from_string(const std::string& s);
std::string to_string(TargetMode m);
TargetMode target_mode_from_string(const std::string& s);

std::string to_lower(std::string s);

/// One JSON record per line. Errors carry the 1-based line number.
std::vector<ProjectDossier> load_corpus(const std::string& path);
ProjectDossier parse_dossier(const std::string& json_line);
std::string dossier_to_json(const ProjectDossier& d);
void save_corpus(const std::string& path, const std::vector<ProjectDossier>& corpus);

/// Sentences end at '.', '!' or '?' followed by whitespace (or end of text). Tokens are maximal
/// runs of letters/digits (bytes >= 0x80 count as letters so UTF-8 words stay whole);
/// punctuation is dropped. Abbreviations are not special-cased.
TokenizedDoc tokenize(const std::string& text);

double transform_ratio(double ratio, TargetMode mode);
double derive_target(const PriceSeries& series, int horizon_days, TargetMode mode = TargetMode::log);
int derive_label(const PriceSeries& series, int horizon_days, double scam_bar);

/// Deterministic 0.8 / 0.1 / remainder split of n >= 10 items.
std::vector<Split> split_dataset(std::size_t n, std::uint64_t seed);
void split_dataset(std::vector<LabeledExample>& examples, std::uint64_t seed);

CorpusStats corpus_stats(const std::vector<TokenizedDoc>& docs);
std::string format_stats_table(const CorpusStats& stats);

}  // namespace icorate
