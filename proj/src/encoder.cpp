#include "icorate/encoder.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "icorate/binary_io.hpp"
#include "icorate/random.hpp"

namespace icorate {

namespace {

constexpr std::string_view kMagic = "ICRENC";
constexpr std::uint32_t kVersion = 1;

Matrix uniform_matrix(Index rows, Index cols, double bound, Rng& rng) {
  Matrix m(rows, cols);
  // Column-major fill order fixes the stream position of every entry.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-bound, bound);
  return m;
}

}  // namespace

Vector WordEmbeddingTable::oov_vector(const std::string& token) const {
  Rng rng(fnv1a64(token, oov_seed ^ 0x9e3779b97f4a7c15ULL));
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.uniform(-0.05, 0.05);
  return v;
}

Vector WordEmbeddingTable::lookup(const std::string& token) const {
  const auto it = vectors.find(token);
  return it == vectors.end() ? oov_vector(token) : it->second;
}

WordEmbeddingTable load_embeddings(const std::string& path, Index dim, std::uint64_t seed) {
  require(dim > 0, "embedding dimension must be > 0");
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open embedding file '" + path + "'");
  WordEmbeddingTable table;
  table.dim = dim;
  table.oov_seed = seed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream is(line);
    std::string word;
    if (!(is >> word)) continue;
    std::vector<double> values;
    for (std::string tok; is >> tok;) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw InvalidInput(path + ":" + std::to_string(line_no) + ": '" + tok + "' is not a number");
      }
    }
    if (static_cast<Index>(values.size()) != dim) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                         " values, found " + std::to_string(values.size()));
    }
    table.vectors[word] = Eigen::Map<const Vector>(values.data(), dim);
  }
  return table;
}

Vector EncoderStack::input_vector(const std::string& token) const {
  Vector e = embeddings.lookup(to_lower(token));
  if (projection) return *projection * e;
  return e;
}

EncoderStack make_encoder(WordEmbeddingTable embeddings, const EncoderConfig& config) {
  require(config.hidden > 0, "hidden size must be > 0");
  require(config.layers >= 1, "encoder needs at least one layer");
  require(embeddings.dim > 0, "embedding table has no dimension");
  EncoderStack stack;
  const Index K = config.hidden;
  const double bound = 1.0 / std::sqrt(static_cast<double>(K));
  Rng rng(config.seed);
  if (embeddings.dim != K) stack.projection = uniform_matrix(K, embeddings.dim, bound, rng);
  for (int n = 0; n < config.layers; ++n) stack.layers.push_back(uniform_matrix(4 * K, 2 * K, bound, rng));
  stack.embeddings = std::move(embeddings);
  stack.output_tanh = config.output_tanh;
  return stack;
}

Vector encode_sentence(const EncoderStack& stack, const Sentence& tokens) {
  if (tokens.empty()) throw InvalidInput("cannot encode an empty sentence");
  require(!stack.layers.empty(), "encoder has no layers");
  const Index K = stack.hidden();
  std::vector<Vector> inputs;
  inputs.reserve(tokens.size());
  for (const auto& t : tokens) inputs.push_back(stack.input_vector(t));
  for (const auto& W : stack.layers) {
    Vector h = Vector::Zero(K), c = Vector::Zero(K);
    for (auto& x : inputs) {
      auto s = lstm_step<double>(W, h, c, x, stack.output_tanh);
      h = std::move(s.h);
      c = std::move(s.c);
      x = h;  // becomes the next layer's input at this time step
    }
  }
  return inputs.back();
}

Vector mean_of(const std::vector<Vector>& vectors) {
  require(!vectors.empty(), "mean of an empty set of vectors");
  Vector sum = Vector::Zero(vectors.front().size());
  for (const auto& v : vectors) sum += v;
  return sum / static_cast<double>(vectors.size());
}

Vector encode_document(const EncoderStack& stack, const TokenizedDoc& doc) {
  if (doc.sentences.empty()) throw InvalidInput("cannot encode an empty document");
  std::vector<Vector> sentences;
  sentences.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) sentences.push_back(encode_sentence(stack, s));
  return mean_of(sentences);
}

void save_encoder(const EncoderStack& stack, const std::string& path) {
  BinaryWriter w(path, kMagic, kVersion);
  w.u64(static_cast<std::uint64_t>(stack.embeddings.dim));
  w.u64(static_cast<std::uint64_t>(stack.hidden()));
  w.u64(stack.embeddings.oov_seed);
  w.u32(stack.output_tanh ? 1U : 0U);
  w.u32(stack.projection ? 1U : 0U);
  if (stack.projection) w.matrix(*stack.projection);
  w.u64(stack.layers.size());
  for (const auto& W : stack.layers) w.matrix(W);
  w.u64(stack.embeddings.vectors.size());
  for (const auto& [word, vec] : stack.embeddings.vectors) {
    w.str(word);
    w.vector(vec);
  }
  w.close();
}

EncoderStack load_encoder(const std::string& path) {
  BinaryReader r(path, kMagic, kVersion);
  EncoderStack s;
  s.embeddings.dim = static_cast<Index>(r.u64());
  const auto K = static_cast<Index>(r.u64());
  s.embeddings.oov_seed = r.u64();
  s.output_tanh = r.u32() != 0;
  if (r.u32() != 0) s.projection = r.matrix();
  const auto n_layers = r.u64();
  for (std::uint64_t i = 0; i < n_layers; ++i) s.layers.push_back(r.matrix());
  const auto n_words = r.u64();
  for (std::uint64_t i = 0; i < n_words; ++i) {
    auto word = r.str();
    s.embeddings.vectors.emplace(std::move(word), r.vector());
  }
  for (const auto& W : s.layers) {
    if (W.rows() != 4 * K || W.cols() != 2 * K) throw InvalidInput("inconsistent encoder artifact '" + path + "'");
  }
  return s;
}

// ---------------------------------------------------------------------------------------------

namespace skipthought {

std::vector<Matrix*> Params::tensors() {
  std::vector<Matrix*> out = {&embedding};
  if (projection) out.push_back(&*projection);
  for (auto& W : encoder) out.push_back(&W);
  for (Matrix* m : {&decoder_prev, &decoder_next, &out_prev, &out_next, &bias_prev, &bias_next}) out.push_back(m);
  return out;
}

std::vector<const Matrix*> Params::tensors() const {
  std::vector<const Matrix*> out;
  for (Matrix* m : const_cast<Params*>(this)->tensors()) out.push_back(m);
  return out;
}

Params Params::zeros_like() const {
  Params z = *this;
  for (Matrix* m : z.tensors()) m->setZero();
  return z;
}

namespace {

/// Forward record of one LSTM layer over T steps. Columns of h and c start with the initial
/// state (column 0); gate columns are 0-based time steps.
struct LayerTrace {
  Matrix x, h, c, i, f, o, l;
};

LayerTrace run_layer(const Matrix& W, const Matrix& X, const Vector& h0, const Vector& c0, bool output_tanh) {
  const Index K = h0.size(), T = X.cols();
  LayerTrace tr;
  tr.x = X;
  tr.h.resize(K, T + 1);
  tr.c.resize(K, T + 1);
  tr.i.resize(K, T);
  tr.f.resize(K, T);
  tr.o.resize(K, T);
  tr.l.resize(K, T);
  tr.h.col(0) = h0;
  tr.c.col(0) = c0;
  for (Index t = 0; t < T; ++t) {
    auto s = lstm_step<double>(W, tr.h.col(t), tr.c.col(t), X.col(t), output_tanh);
    tr.h.col(t + 1) = s.h;
    tr.c.col(t + 1) = s.c;
    tr.i.col(t) = s.i;
    tr.f.col(t) = s.f;
    tr.o.col(t) = s.o;
    tr.l.col(t) = s.l;
  }
  return tr;
}

/// Backpropagation through time for one layer. dH holds the gradient arriving at h_1..h_T from
/// outside the recurrence. Accumulates into dW; returns the gradient on the inputs and writes
/// the gradient on the initial hidden state.
Matrix backprop_layer(const Matrix& W, const LayerTrace& tr, const Matrix& dH, bool output_tanh, Matrix& dW,
                      Vector* dh0) {
  const Index K = tr.h.rows(), T = tr.x.cols();
  Matrix dX(K, T);
  Vector dh_next = Vector::Zero(K), dc_next = Vector::Zero(K);
  Vector da(4 * K), hx(2 * K);
  for (Index t = T - 1; t >= 0; --t) {
    const Vector dh = dH.col(t) + dh_next;
    const auto c = tr.c.col(t + 1).array();
    const auto i = tr.i.col(t).array(), f = tr.f.col(t).array(), o = tr.o.col(t).array(), l = tr.l.col(t).array();
    Eigen::ArrayXd dc, dout;
    if (output_tanh) {
      const Eigen::ArrayXd tc = c.tanh();
      dout = dh.array() * tc;
      dc = dc_next.array() + dh.array() * o * (1.0 - tc.square());
    } else {
      dout = dh.array() * c;
      dc = dc_next.array() + dh.array() * o;
    }
    da.segment(0, K) = (dc * l * i * (1.0 - i)).matrix();
    da.segment(K, K) = (dc * tr.c.col(t).array() * f * (1.0 - f)).matrix();
    da.segment(2 * K, K) = (dout * o * (1.0 - o)).matrix();
    da.segment(3 * K, K) = (dc * i * (1.0 - l.square())).matrix();
    dc_next = (dc * f).matrix();
    hx << tr.h.col(t), tr.x.col(t);
    dW.noalias() += da * hx.transpose();
    const Vector dhx = W.transpose() * da;
    dh_next = dhx.head(K);
    dX.col(t) = dhx.tail(K);
  }
  if (dh0) *dh0 = dh_next;
  return dX;
}

Matrix embed(const Params& p, const std::vector<int>& ids) {
  Matrix E(p.embedding.rows(), static_cast<Index>(ids.size()));
  for (std::size_t t = 0; t < ids.size(); ++t) E.col(static_cast<Index>(t)) = p.embedding.col(ids[t]);
  if (p.projection) return *p.projection * E;
  return E;
}

/// Sends input gradients back through the projection into the embedding columns.
void backprop_inputs(const Params& p, const std::vector<int>& ids, const Matrix& dX, Params& g, Index first_col = 0) {
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const Index col = first_col + static_cast<Index>(t);
    if (p.projection) {
      g.projection->noalias() += dX.col(col) * p.embedding.col(ids[t]).transpose();
      g.embedding.col(ids[t]).noalias() += p.projection->transpose() * dX.col(col);
    } else {
      g.embedding.col(ids[t]) += dX.col(col);
    }
  }
}

struct EncoderTrace {
  std::vector<LayerTrace> layers;
};

Vector encode_ids(const Params& p, const std::vector<int>& ids, EncoderTrace& trace) {
  const Index K = p.encoder.front().cols() / 2;
  Matrix X = embed(p, ids);
  trace.layers.clear();
  for (const auto& W : p.encoder) {
    trace.layers.push_back(run_layer(W, X, Vector::Zero(K), Vector::Zero(K), p.output_tanh));
    X = trace.layers.back().h.rightCols(X.cols());
  }
  return trace.layers.back().h.col(X.cols());
}

void backprop_encoder(const Params& p, const std::vector<int>& ids, const EncoderTrace& trace, const Vector& d_es,
                      Params& g) {
  const Index K = d_es.size(), T = static_cast<Index>(ids.size());
  Matrix dH = Matrix::Zero(K, T);
  dH.col(T - 1) = d_es;
  for (std::size_t n = p.encoder.size(); n-- > 0;) {
    dH = backprop_layer(p.encoder[n], trace.layers[n], dH, p.output_tanh, g.encoder[n], nullptr);
  }
  backprop_inputs(p, ids, dH, g);
}

/// Cross-entropy of the target words given the sentence vector; adds gradients (scaled by
/// `scale`) and returns the unscaled loss.
double decode_loss(const Params& p, const Matrix& W, const Matrix& U, const Matrix& b, const Vector& es,
                   const std::vector<int>& target, Params* g, Matrix* dW, Matrix* dU, Matrix* db, Vector* d_es,
                   double scale) {
  const Index K = es.size(), T = static_cast<Index>(target.size());
  Matrix X = Matrix::Zero(K, T);
  if (T > 1) {
    std::vector<int> shifted(target.begin(), target.end() - 1);
    X.rightCols(T - 1) = embed(p, shifted);
  }
  const LayerTrace tr = run_layer(W, X, es, Vector::Zero(K), p.output_tanh);
  double loss = 0.0;
  Matrix dH(K, T);
  for (Index t = 0; t < T; ++t) {
    Vector logits = U * tr.h.col(t + 1) + b.col(0);
    const double mx = logits.maxCoeff();
    Vector probs = (logits.array() - mx).exp().matrix();
    const double z = probs.sum();
    const int y = target[static_cast<std::size_t>(t)];
    loss += std::log(z) + mx - logits(y);
    if (g) {
      probs /= z;
      probs(y) -= 1.0;
      probs *= scale;
      dU->noalias() += probs * tr.h.col(t + 1).transpose();
      db->col(0) += probs;
      dH.col(t).noalias() = U.transpose() * probs;
    }
  }
  if (g) {
    Vector dh0;
    const Matrix dX = backprop_layer(W, tr, dH, p.output_tanh, *dW, &dh0);
    *d_es += dh0;
    if (T > 1) {
      std::vector<int> shifted(target.begin(), target.end() - 1);
      backprop_inputs(p, shifted, dX, *g, 1);
    }
  }
  return loss;
}

}  // namespace

double loss_and_gradient(const Params& params, const std::vector<Triple>& triples, Params* grad) {
  std::size_t words = 0;
  for (const auto& tr : triples) {
    if (tr.previous) words += tr.previous->size();
    if (tr.next) words += tr.next->size();
  }
  require(words > 0, "skip-thought batch has no neighbor words");
  const double scale = 1.0 / static_cast<double>(words);
  double loss = 0.0;
  EncoderTrace trace;
  for (const auto& tr : triples) {
    require(!tr.current.empty(), "skip-thought sentence is empty");
    const Vector es = encode_ids(params, tr.current, trace);
    Vector d_es = Vector::Zero(es.size());
    if (tr.previous && !tr.previous->empty()) {
      loss += decode_loss(params, params.decoder_prev, params.out_prev, params.bias_prev, es, *tr.previous, grad,
                          grad ? &grad->decoder_prev : nullptr, grad ? &grad->out_prev : nullptr,
                          grad ? &grad->bias_prev : nullptr, &d_es, scale);
    }
    if (tr.next && !tr.next->empty()) {
      loss += decode_loss(params, params.decoder_next, params.out_next, params.bias_next, es, *tr.next, grad,
                          grad ? &grad->decoder_next : nullptr, grad ? &grad->out_next : nullptr,
                          grad ? &grad->bias_next : nullptr, &d_es, scale);
    }
    if (grad) backprop_encoder(params, tr.current, trace, d_es, *grad);
  }
  return loss * scale;
}

double document_probe(const Params& params, const std::vector<std::vector<int>>& sentences, const Vector& u,
                      Params* grad) {
  require(!sentences.empty(), "document has no sentences");
  const double inv_n = 1.0 / static_cast<double>(sentences.size());
  EncoderTrace trace;
  double value = 0.0;
  for (const auto& s : sentences) {
    const Vector es = encode_ids(params, s, trace);
    value += inv_n * u.dot(es);
    if (grad) backprop_encoder(params, s, trace, inv_n * u, *grad);
  }
  return value;
}

Params random_params(Index embedding_dim, Index hidden, Index vocab, int layers, bool output_tanh,
                     std::uint64_t seed) {
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  Params p;
  p.output_tanh = output_tanh;
  p.embedding = uniform_matrix(embedding_dim, vocab, 0.5, rng);
  if (embedding_dim != hidden) p.projection = uniform_matrix(hidden, embedding_dim, bound, rng);
  for (int n = 0; n < layers; ++n) p.encoder.push_back(uniform_matrix(4 * hidden, 2 * hidden, bound, rng));
  p.decoder_prev = uniform_matrix(4 * hidden, 2 * hidden, bound, rng);
  p.decoder_next = uniform_matrix(4 * hidden, 2 * hidden, bound, rng);
  p.out_prev = uniform_matrix(vocab, hidden, bound, rng);
  p.out_next = uniform_matrix(vocab, hidden, bound, rng);
  p.bias_prev = uniform_matrix(vocab, 1, 0.1, rng);
  p.bias_next = uniform_matrix(vocab, 1, 0.1, rng);
  return p;
}

}  // namespace skipthought

namespace {

struct PretrainVocab {
  std::vector<std::string> words;  // words[0] == "<unk>"
  std::unordered_map<std::string, int> index;

  int id(const std::string& lower) const {
    const auto it = index.find(lower);
    return it == index.end() ? 0 : it->second;
  }
};

PretrainVocab build_pretrain_vocab(const std::vector<TokenizedDoc>& corpus, std::size_t max_vocab) {
  std::map<std::string, std::size_t> counts;
  for (const auto& d : corpus)
    for (const auto& t : d.lowercased_tokens()) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  PretrainVocab v;
  v.words.push_back("<unk>");
  for (const auto& [w, _] : ranked) {
    if (v.words.size() >= std::max<std::size_t>(max_vocab, 2)) break;
    v.words.push_back(w);
  }
  for (std::size_t i = 0; i < v.words.size(); ++i) v.index.emplace(v.words[i], static_cast<int>(i));
  return v;
}

double global_norm(const skipthought::Params& g) {
  double ss = 0.0;
  for (const Matrix* m : g.tensors()) ss += m->squaredNorm();
  return std::sqrt(ss);
}

}  // namespace

EncoderStack pretrain_skipthought(const EncoderStack& stack, const std::vector<TokenizedDoc>& corpus,
                                  const SkipThoughtConfig& config, PretrainReport* report) {
  require(!stack.layers.empty(), "encoder has no layers");
  require(config.batch_size > 0 && config.max_sentence_tokens > 0, "invalid skip-thought configuration");
  const PretrainVocab vocab = build_pretrain_vocab(corpus, config.max_vocab);

  std::vector<skipthought::Triple> triples;
  for (const auto& doc : corpus) {
    if (doc.sentences.size() < 2) continue;
    std::vector<std::vector<int>> ids;
    for (const auto& s : doc.sentences) {
      std::vector<int> row;
      for (std::size_t t = 0; t < s.size() && t < config.max_sentence_tokens; ++t) row.push_back(vocab.id(to_lower(s[t])));
      ids.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      skipthought::Triple tr;
      tr.current = ids[i];
      if (i > 0) tr.previous = ids[i - 1];
      if (i + 1 < ids.size()) tr.next = ids[i + 1];
      triples.push_back(std::move(tr));
    }
  }
  if (triples.empty()) throw InvalidInput("skip-thought pretraining needs a document with at least 2 sentences");

  const Index K = stack.hidden();
  const auto V = static_cast<Index>(vocab.words.size());
  Rng rng(config.seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(K));
  skipthought::Params p;
  p.output_tanh = stack.output_tanh;
  p.embedding.resize(stack.embeddings.dim, V);
  for (Index v = 0; v < V; ++v) p.embedding.col(v) = stack.embeddings.lookup(vocab.words[static_cast<std::size_t>(v)]);
  p.projection = stack.projection;
  p.encoder = stack.layers;
  p.decoder_prev = uniform_matrix(4 * K, 2 * K, bound, rng);
  p.decoder_next = uniform_matrix(4 * K, 2 * K, bound, rng);
  p.out_prev = uniform_matrix(V, K, bound, rng);
  p.out_next = uniform_matrix(V, K, bound, rng);
  p.bias_prev = Matrix::Zero(V, 1);
  p.bias_next = Matrix::Zero(V, 1);

  PretrainReport rep;
  rep.vocab_size = vocab.words.size();
  rep.triples = triples.size();
  rep.initial_loss = skipthought::loss_and_gradient(p, triples, nullptr);

  std::vector<std::size_t> order(triples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  double step = config.step;
  double best = rep.initial_loss;
  std::vector<skipthought::Triple> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t word_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      batch.clear();
      std::size_t words = 0;
      for (std::size_t b = start; b < std::min(order.size(), start + config.batch_size); ++b) {
        batch.push_back(triples[order[b]]);
        words += (batch.back().previous ? batch.back().previous->size() : 0) +
                 (batch.back().next ? batch.back().next->size() : 0);
      }
      skipthought::Params g = p.zeros_like();
      loss_sum += skipthought::loss_and_gradient(p, batch, &g) * static_cast<double>(words);
      word_sum += words;
      const double norm = global_norm(g);
      const double factor = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
      auto params = p.tensors();
      auto grads = g.tensors();
      for (std::size_t k = 0; k < params.size(); ++k) {
        if (k == 0 && !config.fine_tune_embeddings) continue;
        *params[k] -= (step * factor) * *grads[k];
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(word_sum);
    rep.epoch_loss.push_back(epoch_loss);
    if (epoch_loss >= best) {
      step *= 0.5;
    } else {
      best = epoch_loss;
    }
  }
  rep.final_loss = skipthought::loss_and_gradient(p, triples, nullptr);
  if (report) *report = rep;

  EncoderStack out = stack;
  out.layers = p.encoder;
  out.projection = p.projection;
  if (config.fine_tune_embeddings) {
    for (Index v = 1; v < V; ++v) out.embeddings.vectors[vocab.words[static_cast<std::size_t>(v)]] = p.embedding.col(v);
  }
  return out;
}

}  // namespace icorate
