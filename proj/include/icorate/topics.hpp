#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "icorate/common.hpp"
#include "icorate/corpus.hpp"
#include "icorate/random.hpp"

namespace icorate {

using CountMatrix = Mat<std::int64_t>;

/// Vocabulary filter applied before topic modelling: tokens are lowercased, then rare words and
/// stopwords are dropped.
struct VocabularyOptions {
  int min_count = 3;
  bool drop_stopwords = true;
};

/// The shipped English stopword list (300 entries, lowercase).
const std::vector<std::string>& stopwords();

struct LdaOptions {
  int topics = 50;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
  int iterations = 100;
  std::uint64_t seed = 1;
  VocabularyOptions vocabulary;
};

/// Trained topic-word distributions. Immutable after fitting; safe for concurrent reads.
struct TopicModel {
  std::vector<std::string> vocab;  // sorted; index = word id
  Matrix phi;                      // K x V, rows sum to 1
  Matrix theta;                    // M x K mixtures of the training documents
  double alpha = 0.0;
  double beta = 0.0;
  std::int64_t n_train_docs = 0;   // M

  Index topics() const { return phi.rows(); }
  Index vocab_size() const { return phi.cols(); }
  /// Word id, or -1 when out of vocabulary. Expects a lowercased token.
  Index word_id(const std::string& token) const;
  /// Builds the lookup table; called by fit and load.
  void index_vocab();

private:
  std::unordered_map<std::string, Index> lookup_;
};

/// Collapsed Gibbs sampler over word-id documents. One chain is strictly sequential.
class GibbsSampler {
public:
  GibbsSampler(std::vector<std::vector<Index>> docs, Index topics, Index vocab_size, double alpha,
               double beta, std::uint64_t seed);

  /// One full pass resampling every token's topic.
  void sweep();

  /// Recounts all tallies from the assignments and compares them with the running counts.
  bool counts_consistent() const;

  const std::vector<std::vector<Index>>& assignments() const { return z_; }
  const CountMatrix& doc_topic() const { return n_dk_; }
  const CountMatrix& topic_word() const { return n_kw_; }
  const Vec<std::int64_t>& topic_totals() const { return n_k_; }

  /// phi[k][v] = (n(k,v) + beta) / (n(k) + V beta)
  Matrix phi() const;
  /// theta[d][k] = (n(d,k) + alpha) / (n(d) + K alpha)
  Matrix theta() const;

private:
  std::vector<std::vector<Index>> docs_;
  std::vector<std::vector<Index>> z_;
  CountMatrix n_dk_;
  CountMatrix n_kw_;
  Vec<std::int64_t> n_k_;
  double alpha_;
  double beta_;
  Rng rng_;
  std::vector<double> weights_;
};

using SweepObserver = std::function<void(const GibbsSampler&, int sweep)>;

/// Builds the sorted vocabulary of lowercased tokens surviving the filter.
std::vector<std::string> build_vocabulary(const std::vector<TokenizedDoc>& docs,
                                          const VocabularyOptions& options);

TopicModel fit_lda(const std::vector<TokenizedDoc>& docs, const LdaOptions& options,
                   const SweepObserver& observer = {});

/// Fold-in: samples topic assignments for a new document with phi held fixed.
Vector infer_mixture(const TopicModel& model, const TokenizedDoc& doc, int fold_in_iterations,
                     std::uint64_t seed);

/// The n highest-probability words of topic k; ties go to the lower vocabulary index.
std::vector<std::string> top_words(const TopicModel& model, Index topic, std::size_t n);

void save_topic_model(const TopicModel& model, const std::string& path);
TopicModel load_topic_model(const std::string& path);

}  // namespace icorate
