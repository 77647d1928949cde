#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icorate/common.hpp"
#include "icorate/corpus.hpp"

namespace icorate {

/// Word vectors keyed by lowercased token. Lookups are total: a token without a stored vector
/// gets uniform(-0.05, 0.05) entries drawn from a generator seeded by (seed, token), so the
/// same token always maps to the same vector.
struct WordEmbeddingTable {
  Index dim = 0;
  std::uint64_t oov_seed = 0;
  std::map<std::string, Vector> vectors;

  Vector lookup(const std::string& token) const;
  Vector oov_vector(const std::string& token) const;
};

/// Reads "word v1 ... v_dim" lines (GloVe text format).
WordEmbeddingTable load_embeddings(const std::string& path, Index dim, std::uint64_t seed);

// ---------------------------------------------------------------------------------------------
// LSTM cell without bias terms:
//   [i; f; o; l] = [sigma; sigma; sigma; tanh](W [h_prev; x]),   W is 4K x 2K
//   c = f .* c_prev + i .* l
//   h = o .* c            (or o .* tanh(c) with output_tanh)

template <class Scalar>
struct LstmState {
  Vec<Scalar> h, c, i, f, o, l;
};

template <class Scalar>
LstmState<Scalar> lstm_step(const Mat<Scalar>& W, const Vec<Scalar>& h_prev, const Vec<Scalar>& c_prev,
                            const Vec<Scalar>& x, bool output_tanh = false) {
  const Index K = h_prev.size();
  require_dims(c_prev.size() == K && x.size() == K, "lstm_step: h, c and input must all have length K");
  require_dims(W.rows() == 4 * K && W.cols() == 2 * K, "lstm_step: W must be 4K x 2K");
  Vec<Scalar> hx(2 * K);
  hx << h_prev, x;
  const Vec<Scalar> a = W * hx;
  LstmState<Scalar> s;
  s.i = sigmoid(a.segment(0, K));
  s.f = sigmoid(a.segment(K, K));
  s.o = sigmoid(a.segment(2 * K, K));
  s.l = a.segment(3 * K, K).array().tanh().matrix();
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.l);
  s.h = output_tanh ? Vec<Scalar>(s.o.cwiseProduct(s.c.array().tanh().matrix())) : Vec<Scalar>(s.o.cwiseProduct(s.c));
  return s;
}

struct EncoderConfig {
  Index hidden = 300;
  int layers = 4;
  bool output_tanh = false;
  std::uint64_t seed = 1;
};

/// Embedding table, optional input projection (K x dim, present only when dim != K) and the
/// stacked LSTM weights. Immutable once trained; encode_* are safe to call concurrently.
struct EncoderStack {
  WordEmbeddingTable embeddings;
  std::optional<Matrix> projection;
  std::vector<Matrix> layers;
  bool output_tanh = false;

  Index hidden() const { return layers.empty() ? 0 : layers.front().cols() / 2; }
  /// Layer-1 input for a token: the (projected) embedding of its lowercased form.
  Vector input_vector(const std::string& token) const;
};

/// Weights drawn uniform(-1/sqrt(K), 1/sqrt(K)).
EncoderStack make_encoder(WordEmbeddingTable embeddings, const EncoderConfig& config);

/// Top layer's hidden state after the last token.
Vector encode_sentence(const EncoderStack& stack, const Sentence& tokens);
/// Mean of the sentence vectors.
Vector encode_document(const EncoderStack& stack, const TokenizedDoc& doc);
Vector mean_of(const std::vector<Vector>& vectors);

void save_encoder(const EncoderStack& stack, const std::string& path);
EncoderStack load_encoder(const std::string& path);

// ---------------------------------------------------------------------------------------------
// Skip-thought pretraining: the encoder's vector for sentence i seeds two single-layer LSTM
// decoders (initial hidden state) that predict the words of sentences i-1 and i+1 through a
// softmax over the vocabulary. Decoders are dropped after training.

struct SkipThoughtConfig {
  std::size_t max_vocab = 5000;
  std::size_t max_sentence_tokens = 30;
  int epochs = 5;
  double step = 0.1;
  double clip_norm = 5.0;
  std::size_t batch_size = 16;
  bool fine_tune_embeddings = true;
  std::uint64_t seed = 1;
};

struct PretrainReport {
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;  // mean per-word cross-entropy during each epoch
  double final_loss = 0.0;         // full-corpus loss after the last epoch
  std::size_t vocab_size = 0;
  std::size_t triples = 0;
};

EncoderStack pretrain_skipthought(const EncoderStack& stack, const std::vector<TokenizedDoc>& corpus,
                                  const SkipThoughtConfig& config, PretrainReport* report = nullptr);

namespace skipthought {

/// Every trainable tensor of the encoder-decoder. Word columns of `embedding` are indexed by
/// the pretraining vocabulary (index 0 is the unknown word).
struct Params {
  Matrix embedding;                // dim x V
  std::optional<Matrix> projection;  // K x dim
  std::vector<Matrix> encoder;     // 4K x 2K each
  Matrix decoder_prev, decoder_next;  // 4K x 2K
  Matrix out_prev, out_next;          // V x K
  Matrix bias_prev, bias_next;        // V x 1
  bool output_tanh = false;

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  /// Same shapes, all zero.
  Params zeros_like() const;
};

struct Triple {
  std::vector<int> current;
  std::optional<std::vector<int>> previous;
  std::optional<std::vector<int>> next;
};

/// Sum of cross-entropies of every neighbor word divided by the number of predicted words.
/// When `grad` is non-null it receives the exact gradient (it must be zeros_like(params)).
double loss_and_gradient(const Params& params, const std::vector<Triple>& triples, Params* grad);

/// u . mean_s(encode(s)) for a document given as word-id sentences; exercises the full
/// sentence and document encoder path. Used for gradient checking.
double document_probe(const Params& params, const std::vector<std::vector<int>>& sentences, const Vector& u,
                      Params* grad);

Params random_params(Index embedding_dim, Index hidden, Index vocab, int layers, bool output_tanh,
                     std::uint64_t seed);

}  // namespace skipthought

}  // namespace icorate
