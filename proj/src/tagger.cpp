#include "icorate/tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "icorate/binary_io.hpp"
#include "icorate/corpus.hpp"
#include "icorate/random.hpp"

namespace icorate {

namespace {

constexpr std::string_view kMagic = "ICRCRF";
constexpr std::uint32_t kVersion = 1;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string rstrip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

}  // namespace

const std::array<std::string, kNumCategories>& category_names() {
  static const std::array<std::string, kNumCategories> names = {"born-date", "university", "degree",
                                                                "company", "award"};
  return names;
}

const std::vector<std::string>& label_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out = {"O"};
    for (const auto& c : category_names()) {
      out.push_back("B-" + c);
      out.push_back("I-" + c);
    }
    return out;
  }();
  return names;
}

int label_from_string(const std::string& name) {
  const auto& names = label_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InvalidInput("label '" + name + "' is not in the tag scheme");
  return static_cast<int>(it - names.begin());
}

const std::string& label_to_string(int label) {
  require(label >= 0 && label < kNumLabels, "label index out of range");
  return label_names()[static_cast<std::size_t>(label)];
}

int begin_label(BioCategory c) { return 1 + 2 * static_cast<int>(c); }
int inside_label(BioCategory c) { return 2 + 2 * static_cast<int>(c); }

std::optional<BioCategory> label_category(int label) {
  if (label <= 0 || label >= kNumLabels) return std::nullopt;
  return static_cast<BioCategory>((label - 1) / 2);
}

bool is_valid_bio(const std::vector<int>& labels) {
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const int l = labels[t];
    if (l > 0 && l % 2 == 0) {  // I-x
      if (t == 0) return false;
      const int prev = labels[t - 1];
      if (prev != l && prev != l - 1) return false;
    }
  }
  return true;
}

std::vector<LabeledSequence> read_labeled_sequences(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open labeled-sequence file '" + path + "'");
  std::vector<LabeledSequence> out;
  std::vector<std::string> toks, pos, ner;
  std::vector<int> labels;
  auto flush = [&] {
    if (toks.empty()) return;
    LabeledSequence ls;
    ls.seq.tokens = toks;
    if (std::any_of(pos.begin(), pos.end(), [](const auto& p) { return p != "_"; })) ls.seq.pos = pos;
    if (std::any_of(ner.begin(), ner.end(), [](const auto& n) { return n != "_"; })) ls.seq.ner = ner;
    ls.labels = labels;
    out.push_back(std::move(ls));
    toks.clear();
    pos.clear();
    ner.clear();
    labels.clear();
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = rstrip(line);
    if (line.empty()) {
      flush();
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != 4 || cols[0].empty()) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": expected token<TAB>pos<TAB>ner<TAB>label");
    }
    try {
      labels.push_back(label_from_string(cols[3]));
    } catch (const InvalidInput& e) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    toks.push_back(cols[0]);
    pos.push_back(cols[1].empty() ? "_" : cols[1]);
    ner.push_back(cols[2].empty() ? "_" : cols[2]);
  }
  flush();
  return out;
}

void write_labeled_sequences(const std::string& path, const std::vector<LabeledSequence>& data) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& ls : data) {
    for (std::size_t t = 0; t < ls.seq.size(); ++t) {
      out << ls.seq.tokens[t] << '\t' << (ls.seq.pos ? (*ls.seq.pos)[t] : "_") << '\t'
          << (ls.seq.ner ? (*ls.seq.ner)[t] : "_") << '\t' << label_to_string(ls.labels[t]) << '\n';
    }
    out << '\n';
  }
}

std::string normalize_phrase(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += to_lower(tokens[i]);
  }
  return out;
}

void Dictionary::add(const std::string& entry) {
  std::vector<std::string> toks;
  std::istringstream is(entry);
  for (std::string t; is >> t;) toks.push_back(t);
  if (toks.empty()) return;
  entries.insert(normalize_phrase(toks, 0, toks.size()));
  max_tokens = std::max(max_tokens, toks.size());
}

Dictionary load_dictionary(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open dictionary '" + path + "'");
  Dictionary d;
  d.name = name;
  for (std::string line; std::getline(in, line);) d.add(rstrip(line));
  return d;
}

void save_dictionary(const Dictionary& dict, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& e : dict.entries) out << e << '\n';
}

std::vector<DictionaryMatch> match_dictionaries(const std::vector<std::string>& tokens,
                                                const Dictionaries& dicts) {
  std::vector<DictionaryMatch> out(tokens.size());
  const std::array<const Dictionary*, 2> all = {&dicts.companies, &dicts.universities};
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t best_len = 0;
    const Dictionary* best = nullptr;
    for (const Dictionary* d : all) {
      const std::size_t longest = std::min(d->max_tokens, tokens.size() - i);
      for (std::size_t len = longest; len > best_len; --len) {
        if (d->contains(normalize_phrase(tokens, i, i + len))) {
          best_len = len;
          best = d;
          break;
        }
      }
    }
    if (best == nullptr) {
      ++i;
      continue;
    }
    for (std::size_t j = i; j < i + best_len; ++j) out[j] = {best->name, j == i};
    i += best_len;
  }
  return out;
}

LetterShape letter_shape(const std::string& token) {
  LetterShape s;
  if (token.empty()) return s;
  bool any_upper = false, any_lower = false, non_initial_upper = false, all_digit = true, any_digit = false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const auto ch = static_cast<unsigned char>(token[i]);
    const bool upper = std::isupper(ch) != 0;
    const bool lower = std::islower(ch) != 0;
    const bool digit = std::isdigit(ch) != 0;
    any_upper |= upper;
    any_lower |= lower;
    any_digit |= digit;
    all_digit &= digit;
    if (i > 0 && upper) non_initial_upper = true;
  }
  s.starts_capital = std::isupper(static_cast<unsigned char>(token[0])) != 0;
  s.all_capitals = any_upper && !any_lower;
  s.all_lower = any_lower && !any_upper;
  s.non_initial_capital = non_initial_upper;
  s.has_digit = any_digit;
  s.all_digits = all_digit;
  return s;
}

namespace {

void letter_features(const std::string& token, std::vector<std::string>& out) {
  const auto s = letter_shape(token);
  auto flag = [&](const char* name, bool v) { out.push_back(std::string(name) + (v ? "=1" : "=0")); };
  flag("starts_capital", s.starts_capital);
  flag("all_capitals", s.all_capitals);
  flag("all_lower", s.all_lower);
  flag("non_initial_capital", s.non_initial_capital);
  flag("has_digit", s.has_digit);
  flag("all_digits", s.all_digits);
  const std::string lower = to_lower(token);
  for (std::size_t n = 1; n <= 3 && n <= lower.size(); ++n) {
    out.push_back("prefix" + std::to_string(n) + "=" + lower.substr(0, n));
    out.push_back("suffix" + std::to_string(n) + "=" + lower.substr(lower.size() - n));
  }
}

std::vector<std::string> position_features(const TokenSequence& seq, std::size_t t,
                                           const std::vector<std::string>& lower,
                                           const std::vector<DictionaryMatch>& matches) {
  const std::size_t n = seq.size();
  const std::string prev = t > 0 ? lower[t - 1] : "<s>";
  const std::string next = t + 1 < n ? lower[t + 1] : "</s>";
  std::vector<std::string> f;
  f.reserve(32);
  f.push_back("bias");
  f.push_back("w[0]=" + lower[t]);
  f.push_back("w[-1]=" + prev);
  f.push_back("w[+1]=" + next);
  f.push_back("w[-1,0]=" + prev + "|" + lower[t]);
  f.push_back("w[0,+1]=" + lower[t] + "|" + next);
  if (seq.pos) {
    const auto& p = *seq.pos;
    f.push_back("pos[0]=" + p[t]);
    f.push_back("pos[-1]=" + (t > 0 ? p[t - 1] : std::string("<s>")));
    f.push_back("pos[+1]=" + (t + 1 < n ? p[t + 1] : std::string("</s>")));
  }
  if (seq.ner) f.push_back("ner[0]=" + (*seq.ner)[t]);
  letter_features(seq.tokens[t], f);
  if (!matches[t].dictionary.empty()) {
    f.push_back("dict_" + matches[t].dictionary);
    f.push_back("dict_" + matches[t].dictionary + (matches[t].begins ? "=B" : "=I"));
  }
  return f;
}

void check_columns(const TokenSequence& seq) {
  require(!seq.pos || seq.pos->size() == seq.size(), "POS column length differs from token count");
  require(!seq.ner || seq.ner->size() == seq.size(), "NER column length differs from token count");
}

}  // namespace

std::vector<std::vector<std::string>> extract_sequence_features(const TokenSequence& seq,
                                                                const Dictionaries& dicts) {
  check_columns(seq);
  std::vector<std::string> lower;
  lower.reserve(seq.size());
  for (const auto& t : seq.tokens) lower.push_back(to_lower(t));
  const auto matches = match_dictionaries(seq.tokens, dicts);
  std::vector<std::vector<std::string>> out;
  out.reserve(seq.size());
  for (std::size_t t = 0; t < seq.size(); ++t) out.push_back(position_features(seq, t, lower, matches));
  return out;
}

std::vector<std::string> extract_features(const TokenSequence& seq, std::size_t position,
                                          const Dictionaries& dicts) {
  if (position >= seq.size()) {
    throw InvalidInput("position " + std::to_string(position) + " out of range for a sequence of " +
                       std::to_string(seq.size()) + " tokens");
  }
  check_columns(seq);
  std::vector<std::string> lower;
  for (const auto& t : seq.tokens) lower.push_back(to_lower(t));
  return position_features(seq, position, lower, match_dictionaries(seq.tokens, dicts));
}

Index TaggerModel::feature_id(const std::string& f) const {
  const auto it = lookup_.find(f);
  return it == lookup_.end() ? -1 : it->second;
}

void TaggerModel::index_features() {
  lookup_.clear();
  lookup_.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!lookup_.emplace(features[i], static_cast<Index>(i)).second) {
      throw InvalidInput("duplicate feature '" + features[i] + "' in tagger model");
    }
  }
}

CompiledSequence compile(const TaggerModel& model, const TokenSequence& seq) {
  CompiledSequence out;
  for (const auto& feats : extract_sequence_features(seq, model.dictionaries)) {
    std::vector<Index> ids;
    for (const auto& f : feats) {
      const Index id = model.feature_id(f);
      if (id >= 0) ids.push_back(id);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

Matrix node_scores(const TaggerModel& model, const CompiledSequence& seq) {
  Matrix node = Matrix::Zero(static_cast<Index>(seq.size()), kNumLabels);
  for (std::size_t t = 0; t < seq.size(); ++t)
    for (Index f : seq[t]) node.row(static_cast<Index>(t)) += model.emission.row(f);
  return node;
}

double forward_log_partition(const Matrix& node, const Matrix& transition, Matrix* alpha_out) {
  const Index n = node.rows(), L = node.cols();
  require(n > 0, "empty sequence");
  Matrix alpha(n, L);
  alpha.row(0) = node.row(0);
  for (Index t = 1; t < n; ++t) {
    for (Index l = 0; l < L; ++l) {
      double acc = -INFINITY;
      for (Index p = 0; p < L; ++p) acc = log_sum_exp(acc, alpha(t - 1, p) + transition(p, l));
      alpha(t, l) = node(t, l) + acc;
    }
  }
  double z = -INFINITY;
  for (Index l = 0; l < L; ++l) z = log_sum_exp(z, alpha(n - 1, l));
  if (alpha_out) *alpha_out = std::move(alpha);
  return z;
}

double backward_log_partition(const Matrix& node, const Matrix& transition, Matrix* beta_out) {
  const Index n = node.rows(), L = node.cols();
  require(n > 0, "empty sequence");
  Matrix beta = Matrix::Zero(n, L);
  for (Index t = n - 2; t >= 0; --t) {
    for (Index l = 0; l < L; ++l) {
      double acc = -INFINITY;
      for (Index q = 0; q < L; ++q) acc = log_sum_exp(acc, transition(l, q) + node(t + 1, q) + beta(t + 1, q));
      beta(t, l) = acc;
    }
  }
  double z = -INFINITY;
  for (Index l = 0; l < L; ++l) z = log_sum_exp(z, node(0, l) + beta(0, l));
  if (beta_out) *beta_out = std::move(beta);
  return z;
}

std::vector<int> viterbi(const Matrix& node, const Matrix& transition) {
  const Index n = node.rows(), L = node.cols();
  require(n > 0, "empty sequence");
  Matrix best(n, L);
  Mat<int> back = Mat<int>::Zero(n, L);
  best.row(0) = node.row(0);
  for (Index t = 1; t < n; ++t) {
    for (Index l = 0; l < L; ++l) {
      double top = best(t - 1, 0) + transition(0, l);
      int arg = 0;
      for (Index p = 1; p < L; ++p) {
        const double s = best(t - 1, p) + transition(p, l);
        if (s > top) {
          top = s;
          arg = static_cast<int>(p);
        }
      }
      best(t, l) = top + node(t, l);
      back(t, l) = arg;
    }
  }
  std::vector<int> out(static_cast<std::size_t>(n));
  Index last = 0;
  for (Index l = 1; l < L; ++l)
    if (best(n - 1, l) > best(n - 1, last)) last = l;
  out.back() = static_cast<int>(last);
  for (Index t = n - 1; t > 0; --t) out[static_cast<std::size_t>(t - 1)] = back(t, out[static_cast<std::size_t>(t)]);
  return out;
}

double path_score(const Matrix& node, const Matrix& transition, const std::vector<int>& labels) {
  require(static_cast<Index>(labels.size()) == node.rows(), "label count differs from sequence length");
  double s = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    s += node(static_cast<Index>(t), labels[t]);
    if (t > 0) s += transition(labels[t - 1], labels[t]);
  }
  return s;
}

std::vector<int> decode(const TaggerModel& model, const TokenSequence& seq) {
  if (seq.size() == 0) throw InvalidInput("cannot decode an empty sequence");
  return viterbi(node_scores(model, compile(model, seq)), model.transition);
}

double sequence_log_likelihood(const TaggerModel& model, const TokenSequence& seq,
                               const std::vector<int>& labels) {
  if (labels.size() != seq.size()) {
    throw InvalidInput("label count " + std::to_string(labels.size()) + " differs from token count " +
                       std::to_string(seq.size()));
  }
  require(seq.size() > 0, "empty sequence");
  for (int l : labels) require(l >= 0 && l < kNumLabels, "label index out of range");
  const Matrix node = node_scores(model, compile(model, seq));
  return path_score(node, model.transition, labels) - forward_log_partition(node, model.transition);
}

double log_likelihood_gradient(const TaggerModel& model, const CompiledSequence& seq,
                               const std::vector<int>& labels, CrfGradient& grad) {
  const Matrix node = node_scores(model, seq);
  Matrix alpha, beta;
  const double log_z = forward_log_partition(node, model.transition, &alpha);
  backward_log_partition(node, model.transition, &beta);
  const Index n = node.rows();

  for (Index t = 0; t < n; ++t) {
    const Eigen::RowVectorXd marginal = (alpha.row(t) + beta.row(t)).array().unaryExpr(
        [log_z](double v) { return std::exp(v - log_z); });
    const int gold = labels[static_cast<std::size_t>(t)];
    for (Index f : seq[static_cast<std::size_t>(t)]) {
      grad.emission.row(f) -= marginal;
      grad.emission(f, gold) += 1.0;
    }
    if (t > 0) {
      for (Index p = 0; p < kNumLabels; ++p) {
        for (Index q = 0; q < kNumLabels; ++q) {
          grad.transition(p, q) -=
              std::exp(alpha(t - 1, p) + model.transition(p, q) + node(t, q) + beta(t, q) - log_z);
        }
      }
      grad.transition(labels[static_cast<std::size_t>(t - 1)], gold) += 1.0;
    }
  }
  return path_score(node, model.transition, labels) - log_z;
}

namespace {

struct Prepared {
  CompiledSequence compiled;
  std::vector<int> labels;
};

double token_accuracy(const TaggerModel& model, const std::vector<Prepared>& data) {
  std::size_t correct = 0, total = 0;
  for (const auto& p : data) {
    const auto pred = viterbi(node_scores(model, p.compiled), model.transition);
    for (std::size_t t = 0; t < pred.size(); ++t) correct += pred[t] == p.labels[t];
    total += pred.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

void check_labeled(const LabeledSequence& ls) {
  require(ls.seq.size() > 0, "labeled sequence is empty");
  require(ls.labels.size() == ls.seq.size(), "label count differs from token count");
  for (int l : ls.labels) {
    if (l < 0 || l >= kNumLabels) throw InvalidInput("label index " + std::to_string(l) + " is outside the tag scheme");
  }
}

}  // namespace

TaggerModel train_crf(const std::vector<LabeledSequence>& train, const std::vector<LabeledSequence>& dev,
                      const Dictionaries& dicts, const CrfTrainOptions& options) {
  require(!train.empty(), "CRF training needs at least one labeled sequence");
  require(options.batch_size > 0, "batch size must be > 0");
  for (const auto& ls : train) check_labeled(ls);
  for (const auto& ls : dev) check_labeled(ls);

  TaggerModel model;
  model.l2 = options.l2;
  model.dictionaries = dicts;
  {
    std::map<std::string, int> seen;
    for (const auto& ls : train)
      for (const auto& feats : extract_sequence_features(ls.seq, dicts))
        for (const auto& f : feats) seen.emplace(f, 0);
    for (const auto& [f, _] : seen) model.features.push_back(f);
  }
  model.index_features();
  const auto F = static_cast<Index>(model.features.size());
  model.emission = Matrix::Zero(F, kNumLabels);
  model.transition = Matrix::Zero(kNumLabels, kNumLabels);

  auto prepare = [&](const std::vector<LabeledSequence>& data) {
    std::vector<Prepared> out;
    out.reserve(data.size());
    for (const auto& ls : data) out.push_back({compile(model, ls.seq), ls.labels});
    return out;
  };
  const auto train_set = prepare(train);
  const auto dev_set = dev.empty() ? train_set : prepare(dev);

  Rng rng(options.seed);
  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  CrfGradient grad{Matrix::Zero(F, kNumLabels), Matrix::Zero(kNumLabels, kNumLabels)};
  TaggerModel best = model;
  double best_acc = -1.0;
  int since_best = 0;
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    rng.shuffle(order);
    const double eta = options.step / std::sqrt(static_cast<double>(epoch));
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      grad.emission.setZero();
      grad.transition.setZero();
      for (std::size_t b = start; b < stop; ++b) {
        const auto& ex = train_set[order[b]];
        log_likelihood_gradient(model, ex.compiled, ex.labels, grad);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      model.emission += eta * (scale * grad.emission - options.l2 * model.emission);
      model.transition += eta * (scale * grad.transition - options.l2 * model.transition);
    }
    const double acc = token_accuracy(model, dev_set);
    if (acc > best_acc) {
      best_acc = acc;
      best.emission = model.emission;
      best.transition = model.transition;
      since_best = 0;
    } else if (++since_best >= options.patience) {
      break;
    }
  }
  return best;
}

TaggerReport score_predictions(const std::vector<std::vector<int>>& gold,
                               const std::vector<std::vector<int>>& predicted) {
  require(!gold.empty(), "evaluation set is empty");
  require(gold.size() == predicted.size(), "prediction count differs from gold count");
  TaggerReport r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    require(gold[s].size() == predicted[s].size(), "prediction length differs from gold length");
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      const bool ok = gold[s][t] == predicted[s][t];
      ++r.overall.total;
      r.overall.correct += ok;
      if (const auto c = label_category(gold[s][t])) {
        auto& cat = r.categories[static_cast<std::size_t>(*c)];
        ++cat.total;
        cat.correct += ok;
      }
    }
  }
  return r;
}

TaggerReport evaluate_tagger(const TaggerModel& model, const std::vector<LabeledSequence>& test) {
  require(!test.empty(), "evaluation set is empty");
  std::vector<std::vector<int>> gold, pred;
  for (const auto& ls : test) {
    check_labeled(ls);
    gold.push_back(ls.labels);
    pred.push_back(decode(model, ls.seq));
  }
  return score_predictions(gold, pred);
}

std::string format_tagger_report(const TaggerReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "category\taccuracy\ttokens\n";
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    const auto& cat = report.categories[c];
    os << category_names()[c] << '\t';
    if (cat.total == 0) {
      os << "n/a";
    } else {
      os << cat.accuracy();
    }
    os << '\t' << cat.total << '\n';
  }
  os << "all\t" << report.overall.accuracy() << '\t' << report.overall.total << '\n';
  return os.str();
}

std::vector<TaggedSpan> extract_spans(const std::vector<std::string>& tokens, const std::vector<int>& labels) {
  require(tokens.size() == labels.size(), "label count differs from token count");
  std::vector<TaggedSpan> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const auto cat = label_category(labels[t]);
    if (!cat) continue;
    const bool inside = labels[t] % 2 == 0;
    const bool continues = inside && !out.empty() && out.back().end == t && out.back().category == *cat;
    if (continues) {
      out.back().end = t + 1;
      out.back().text += " " + tokens[t];
    } else {
      out.push_back({*cat, t, t + 1, tokens[t]});
    }
  }
  return out;
}

void save_tagger_model(const TaggerModel& model, const std::string& path) {
  BinaryWriter w(path, kMagic, kVersion);
  w.f64(model.l2);
  w.strings(model.features);
  w.matrix(model.emission);
  w.matrix(model.transition);
  for (const Dictionary* d : {&model.dictionaries.companies, &model.dictionaries.universities}) {
    w.str(d->name);
    w.strings(std::vector<std::string>(d->entries.begin(), d->entries.end()));
  }
  w.close();
}

TaggerModel load_tagger_model(const std::string& path) {
  BinaryReader r(path, kMagic, kVersion);
  TaggerModel m;
  m.l2 = r.f64();
  m.features = r.strings();
  m.emission = r.matrix();
  m.transition = r.matrix();
  for (Dictionary* d : {&m.dictionaries.companies, &m.dictionaries.universities}) {
    d->name = r.str();
    d->entries.clear();
    d->max_tokens = 0;
    for (const auto& e : r.strings()) d->add(e);
  }
  if (m.emission.rows() != static_cast<Index>(m.features.size()) || m.emission.cols() != kNumLabels ||
      m.transition.rows() != kNumLabels || m.transition.cols() != kNumLabels) {
    throw InvalidInput("inconsistent tagger artifact '" + path + "'");
  }
  m.index_features();
  return m;
}

}  // namespace icorate
