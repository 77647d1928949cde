#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "icorate/common.hpp"

namespace icorate {

// ---------------------------------------------------------------------------------------------
// Tag scheme: O plus B-/I- pairs for five bio categories, in this canonical order.

enum class BioCategory { born_date, university, degree, company, award };

inline constexpr std::size_t kNumCategories = 5;
inline constexpr Index kNumLabels = 11;
inline constexpr int kOutside = 0;

const std::array<std::string, kNumCategories>& category_names();
const std::vector<std::string>& label_names();

int label_from_string(const std::string& name);
const std::string& label_to_string(int label);
int begin_label(BioCategory c);
int inside_label(BioCategory c);
/// Category of a B-/I- label; empty for O.
std::optional<BioCategory> label_category(int label);
/// True when every I-x directly follows B-x or I-x.
bool is_valid_bio(const std::vector<int>& labels);

struct TokenSequence {
  std::vector<std::string> tokens;
  std::optional<std::vector<std::string>> pos;
  std::optional<std::vector<std::string>> ner;

  std::size_t size() const { return tokens.size(); }
};

struct LabeledSequence {
  TokenSequence seq;
  std::vector<int> labels;
};

/// One file format for annotated bios: "token<TAB>pos<TAB>ner<TAB>label" per line, blank line
/// between sequences. A column that is "_" on every line of a sequence is treated as absent.
std::vector<LabeledSequence> read_labeled_sequences(const std::string& path);
void write_labeled_sequences(const std::string& path, const std::vector<LabeledSequence>& data);

// ---------------------------------------------------------------------------------------------
// Gazetteers.

struct Dictionary {
  std::string name;
  std::set<std::string> entries;  // lowercased, tokens joined by single spaces
  std::size_t max_tokens = 0;

  void add(const std::string& entry);
  bool contains(const std::string& normalized) const { return entries.contains(normalized); }
};

Dictionary load_dictionary(const std::string& path, const std::string& name);
void save_dictionary(const Dictionary& dict, const std::string& path);
std::string normalize_phrase(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end);

struct Dictionaries {
  Dictionary companies{"companies", {}, 0};
  Dictionary universities{"universities", {}, 0};
};

struct DictionaryMatch {
  std::string dictionary;  // empty when the token is not covered
  bool begins = false;
};

/// Greedy left-to-right longest match over both dictionaries, case-insensitive.
std::vector<DictionaryMatch> match_dictionaries(const std::vector<std::string>& tokens,
                                                const Dictionaries& dicts);

// ---------------------------------------------------------------------------------------------
// Feature templates.

struct LetterShape {
  bool starts_capital = false;
  bool all_capitals = false;
  bool all_lower = false;
  bool non_initial_capital = false;
  bool has_digit = false;
  bool all_digits = false;
};

LetterShape letter_shape(const std::string& token);

/// Feature strings for one position: unigram, bigrams, window of 3, POS/NER when present,
/// letter predicates, 1-3 character affixes, dictionary flags.
std::vector<std::string> extract_features(const TokenSequence& seq, std::size_t position,
                                          const Dictionaries& dicts);
std::vector<std::vector<std::string>> extract_sequence_features(const TokenSequence& seq,
                                                                const Dictionaries& dicts);

// ---------------------------------------------------------------------------------------------
// Linear-chain CRF.

struct TaggerModel {
  std::vector<std::string> features;  // index = feature id
  Matrix emission;                    // features x labels
  Matrix transition;                  // labels x labels, [previous, next]
  double l2 = 0.0;
  Dictionaries dictionaries;

  Index feature_id(const std::string& f) const;
  void index_features();

private:
  std::unordered_map<std::string, Index> lookup_;
};

/// Per position, the ids of the model's features that fire (unknown features dropped).
using CompiledSequence = std::vector<std::vector<Index>>;

CompiledSequence compile(const TaggerModel& model, const TokenSequence& seq);

/// n x L matrix of per-position label scores.
Matrix node_scores(const TaggerModel& model, const CompiledSequence& seq);

// Lattice algorithms over node scores (n x L) and transitions (L x L).
double forward_log_partition(const Matrix& node, const Matrix& transition, Matrix* alpha = nullptr);
double backward_log_partition(const Matrix& node, const Matrix& transition, Matrix* beta = nullptr);
std::vector<int> viterbi(const Matrix& node, const Matrix& transition);
double path_score(const Matrix& node, const Matrix& transition, const std::vector<int>& labels);

std::vector<int> decode(const TaggerModel& model, const TokenSequence& seq);
double sequence_log_likelihood(const TaggerModel& model, const TokenSequence& seq,
                               const std::vector<int>& labels);

struct CrfGradient {
  Matrix emission;
  Matrix transition;
};

/// Log-likelihood of the labels and its gradient with respect to all weights (no penalty).
double log_likelihood_gradient(const TaggerModel& model, const CompiledSequence& seq,
                               const std::vector<int>& labels, CrfGradient& grad);

struct CrfTrainOptions {
  double l2 = 1e-4;
  double step = 0.1;
  std::size_t batch_size = 8;
  int max_epochs = 60;
  int patience = 5;
  std::uint64_t seed = 1;
};

/// Minibatch gradient ascent on the L2-penalized conditional log-likelihood. Stops once dev
/// token accuracy has not improved for `patience` epochs and returns the best-dev weights.
TaggerModel train_crf(const std::vector<LabeledSequence>& train, const std::vector<LabeledSequence>& dev,
                      const Dictionaries& dicts, const CrfTrainOptions& options);

struct CategoryAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct TaggerReport {
  std::array<CategoryAccuracy, kNumCategories> categories;
  CategoryAccuracy overall;
};

TaggerReport evaluate_tagger(const TaggerModel& model, const std::vector<LabeledSequence>& test);
TaggerReport score_predictions(const std::vector<std::vector<int>>& gold,
                               const std::vector<std::vector<int>>& predicted);
std::string format_tagger_report(const TaggerReport& report);

struct TaggedSpan {
  BioCategory category;
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::string text;     // original tokens joined by spaces
};

/// Groups B-/I- runs into spans. A stray I-x opens a new span.
std::vector<TaggedSpan> extract_spans(const std::vector<std::string>& tokens, const std::vector<int>& labels);

void save_tagger_model(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger_model(const std::string& path);

}  // namespace icorate
