#include "icorate/topics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "icorate/binary_io.hpp"

namespace icorate {

namespace {

constexpr std::string_view kMagic = "ICRLDA";
constexpr std::uint32_t kVersion = 1;

std::vector<std::vector<Index>> to_word_ids(const TopicModel& model, const std::vector<TokenizedDoc>& docs) {
  std::vector<std::vector<Index>> out;
  out.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::vector<Index> ids;
    for (const auto& tok : docs[d].lowercased_tokens()) {
      const Index id = model.word_id(tok);
      if (id >= 0) ids.push_back(id);
    }
    if (ids.empty()) {
      throw InvalidInput("document " + std::to_string(d) + " is empty after vocabulary filtering");
    }
    out.push_back(std::move(ids));
  }
  return out;
}

}  // namespace

Index TopicModel::word_id(const std::string& token) const {
  const auto it = lookup_.find(token);
  return it == lookup_.end() ? -1 : it->second;
}

void TopicModel::index_vocab() {
  lookup_.clear();
  for (std::size_t i = 0; i < vocab.size(); ++i) lookup_.emplace(vocab[i], static_cast<Index>(i));
}

GibbsSampler::GibbsSampler(std::vector<std::vector<Index>> docs, Index topics, Index vocab_size,
                           double alpha, double beta, std::uint64_t seed)
    : docs_(std::move(docs)),
      n_dk_(CountMatrix::Zero(static_cast<Index>(docs_.size()), topics)),
      n_kw_(CountMatrix::Zero(topics, vocab_size)),
      n_k_(Vec<std::int64_t>::Zero(topics)),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      weights_(static_cast<std::size_t>(topics)) {
  z_.resize(docs_.size());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    z_[d].resize(docs_[d].size());
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const auto k = static_cast<Index>(rng_.below(static_cast<std::uint64_t>(topics)));
      z_[d][i] = k;
      ++n_dk_(static_cast<Index>(d), k);
      ++n_kw_(k, docs_[d][i]);
      ++n_k_(k);
    }
  }
}

void GibbsSampler::sweep() {
  const Index K = n_k_.size();
  const double vbeta = static_cast<double>(n_kw_.cols()) * beta_;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const auto di = static_cast<Index>(d);
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const Index w = docs_[d][i];
      Index k = z_[d][i];
      --n_dk_(di, k);
      --n_kw_(k, w);
      --n_k_(k);
      for (Index t = 0; t < K; ++t) {
        weights_[static_cast<std::size_t>(t)] = (static_cast<double>(n_dk_(di, t)) + alpha_) *
                                                (static_cast<double>(n_kw_(t, w)) + beta_) /
                                                (static_cast<double>(n_k_(t)) + vbeta);
      }
      k = static_cast<Index>(rng_.categorical(weights_));
      z_[d][i] = k;
      ++n_dk_(di, k);
      ++n_kw_(k, w);
      ++n_k_(k);
    }
  }
}

bool GibbsSampler::counts_consistent() const {
  CountMatrix dk = CountMatrix::Zero(n_dk_.rows(), n_dk_.cols());
  CountMatrix kw = CountMatrix::Zero(n_kw_.rows(), n_kw_.cols());
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      ++dk(static_cast<Index>(d), z_[d][i]);
      ++kw(z_[d][i], docs_[d][i]);
    }
  }
  if (dk != n_dk_ || kw != n_kw_) return false;
  if (kw.rowwise().sum() != n_k_) return false;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    if (n_dk_.row(static_cast<Index>(d)).sum() != static_cast<std::int64_t>(docs_[d].size())) return false;
  }
  return true;
}

Matrix GibbsSampler::phi() const {
  const double vbeta = static_cast<double>(n_kw_.cols()) * beta_;
  Matrix phi = (n_kw_.cast<double>().array() + beta_).matrix();
  for (Index k = 0; k < phi.rows(); ++k) phi.row(k) /= static_cast<double>(n_k_(k)) + vbeta;
  return phi;
}

Matrix GibbsSampler::theta() const {
  const double kalpha = static_cast<double>(n_dk_.cols()) * alpha_;
  Matrix theta = (n_dk_.cast<double>().array() + alpha_).matrix();
  for (Index d = 0; d < theta.rows(); ++d) {
    theta.row(d) /= static_cast<double>(docs_[static_cast<std::size_t>(d)].size()) + kalpha;
  }
  return theta;
}

std::vector<std::string> build_vocabulary(const std::vector<TokenizedDoc>& docs,
                                          const VocabularyOptions& options) {
  std::map<std::string, int> counts;
  for (const auto& doc : docs)
    for (const auto& tok : doc.lowercased_tokens()) ++counts[tok];
  std::set<std::string> stop;
  if (options.drop_stopwords) stop.insert(stopwords().begin(), stopwords().end());
  std::vector<std::string> vocab;
  for (const auto& [tok, n] : counts) {
    if (n >= options.min_count && !stop.contains(tok)) vocab.push_back(tok);
  }
  return vocab;  // std::map iteration keeps it sorted
}

TopicModel fit_lda(const std::vector<TokenizedDoc>& docs, const LdaOptions& options,
                   const SweepObserver& observer) {
  require(options.topics >= 2, "LDA needs at least 2 topics");
  require(options.beta > 0.0, "beta must be > 0");
  require(options.iterations >= 0, "iterations must be >= 0");
  require(!docs.empty(), "LDA needs at least one document");
  const double alpha = options.alpha.value_or(50.0 / options.topics);
  require(alpha > 0.0, "alpha must be > 0");

  TopicModel model;
  model.vocab = build_vocabulary(docs, options.vocabulary);
  if (model.vocab.empty()) throw InvalidInput("vocabulary is empty after filtering");
  model.index_vocab();
  model.alpha = alpha;
  model.beta = options.beta;
  model.n_train_docs = static_cast<std::int64_t>(docs.size());

  GibbsSampler sampler(to_word_ids(model, docs), options.topics, static_cast<Index>(model.vocab.size()),
                       alpha, options.beta, options.seed);
  for (int it = 0; it < options.iterations; ++it) {
    sampler.sweep();
    if (observer) observer(sampler, it + 1);
  }
  model.phi = sampler.phi();
  model.theta = sampler.theta();
  return model;
}

Vector infer_mixture(const TopicModel& model, const TokenizedDoc& doc, int fold_in_iterations,
                     std::uint64_t seed) {
  std::vector<Index> words;
  for (const auto& tok : doc.lowercased_tokens()) {
    const Index id = model.word_id(tok);
    if (id >= 0) words.push_back(id);
  }
  if (words.empty()) throw InvalidInput("document shares no token with the topic vocabulary");
  require(fold_in_iterations >= 0, "fold-in iterations must be >= 0");

  const Index K = model.topics();
  Rng rng(seed);
  std::vector<Index> z(words.size());
  Vec<std::int64_t> n_k = Vec<std::int64_t>::Zero(K);
  for (auto& k : z) {
    k = static_cast<Index>(rng.below(static_cast<std::uint64_t>(K)));
    ++n_k(k);
  }
  std::vector<double> weights(static_cast<std::size_t>(K));
  // Counts are averaged over the second half of the sweeps.
  const int burn_in = fold_in_iterations / 2;
  Vector acc = Vector::Zero(K);
  int kept = 0;
  for (int it = 0; it < fold_in_iterations; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --n_k(z[i]);
      for (Index t = 0; t < K; ++t) {
        weights[static_cast<std::size_t>(t)] =
            (static_cast<double>(n_k(t)) + model.alpha) * model.phi(t, words[i]);
      }
      z[i] = static_cast<Index>(rng.categorical(weights));
      ++n_k(z[i]);
    }
    if (it >= burn_in) {
      acc += n_k.cast<double>();
      ++kept;
    }
  }
  const Vector counts = kept > 0 ? Vector(acc / kept) : Vector(n_k.cast<double>());
  Vector theta = (counts.array() + model.alpha).matrix();
  theta /= static_cast<double>(words.size()) + static_cast<double>(K) * model.alpha;
  return theta;
}

std::vector<std::string> top_words(const TopicModel& model, Index topic, std::size_t n) {
  if (topic < 0 || topic >= model.topics()) {
    throw InvalidInput("topic index " + std::to_string(topic) + " out of range [0, " +
                       std::to_string(model.topics()) + ")");
  }
  if (n > static_cast<std::size_t>(model.vocab_size())) {
    throw InvalidInput("requested " + std::to_string(n) + " words from a vocabulary of " +
                       std::to_string(model.vocab_size()));
  }
  std::vector<Index> order(static_cast<std::size_t>(model.vocab_size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return model.phi(topic, a) > model.phi(topic, b); });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(model.vocab[static_cast<std::size_t>(order[i])]);
  return out;
}

void save_topic_model(const TopicModel& model, const std::string& path) {
  BinaryWriter w(path, kMagic, kVersion);
  w.u64(static_cast<std::uint64_t>(model.topics()));
  w.u64(static_cast<std::uint64_t>(model.vocab_size()));
  w.i64(model.n_train_docs);
  w.f64(model.alpha);
  w.f64(model.beta);
  w.strings(model.vocab);
  w.matrix(model.phi);
  w.matrix(model.theta);
  w.close();
}

TopicModel load_topic_model(const std::string& path) {
  BinaryReader r(path, kMagic, kVersion);
  TopicModel model;
  const auto K = r.u64();
  const auto V = r.u64();
  model.n_train_docs = r.i64();
  model.alpha = r.f64();
  model.beta = r.f64();
  model.vocab = r.strings();
  model.phi = r.matrix();
  model.theta = r.matrix();
  if (static_cast<std::uint64_t>(model.phi.rows()) != K || static_cast<std::uint64_t>(model.phi.cols()) != V ||
      model.vocab.size() != V) {
    throw InvalidInput("inconsistent topic model artifact '" + path + "'");
  }
  model.index_vocab();
  return model;
}

}  // namespace icorate
