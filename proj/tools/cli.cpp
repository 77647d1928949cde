#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "icorate/corpus.hpp"
#include "icorate/encoder.hpp"
#include "icorate/explain.hpp"
#include "icorate/features.hpp"
#include "icorate/model.hpp"
#include "icorate/synthetic.hpp"
#include "icorate/tagger.hpp"
#include "icorate/topics.hpp"

namespace icorate::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

class ConfigError : public Error {
public:
  ConfigError(std::string field, const std::string& message) : Error(message), field(std::move(field)) {}
  std::string field;
};

class MissingPrerequisite : public Error {
public:
  MissingPrerequisite(std::string stage, const std::string& file)
      : Error("missing prerequisite: run '" + stage + "' first (" + file + " not found)"), stage(std::move(stage)) {}
  std::string stage;
};

// ---------------------------------------------------------------------------------------------
// Config

bool same_kind(const json& def, const json& val) {
  if (def.is_number()) return val.is_number();
  if (def.is_null()) return val.is_null() || val.is_number() || val.is_string();
  return def.type() == val.type();
}

void merge_into(json& target, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
  for (const auto& [key, value] : user.items()) {
    const std::string field = path + "/" + key;
    if (!target.contains(key)) throw ConfigError(field, "unknown config key");
    json& slot = target[key];
    if (slot.is_object()) {
      merge_into(slot, value, field);
    } else if (!same_kind(slot, value)) {
      throw ConfigError(field, "expected " + std::string(slot.is_null() ? "number, string or null" : slot.type_name()) +
                                   ", got " + value.type_name());
    } else {
      slot = value;
    }
  }
}

void check_positive_int(const json& cfg, const std::string& pointer, long long min = 1) {
  const auto& v = cfg.at(json::json_pointer(pointer));
  if (!v.is_number_integer() || v.get<long long>() < min)
    throw ConfigError(pointer, "expected an integer >= " + std::to_string(min));
}

void check_positive(const json& cfg, const std::string& pointer, bool allow_zero = false) {
  const double v = cfg.at(json::json_pointer(pointer)).get<double>();
  if (allow_zero ? v < 0.0 : v <= 0.0) throw ConfigError(pointer, allow_zero ? "must be >= 0" : "must be > 0");
}

// ---------------------------------------------------------------------------------------------
// Run context

struct Context {
  json cfg;
  fs::path base;  // directory that relative config paths are resolved against
  fs::path out;
  std::uint64_t seed = 1;
  std::string config_hash;

  std::uint64_t stage_seed(const std::string& stage) const { return fnv1a64(stage, seed); }

  std::optional<fs::path> input_path(const std::string& key) const {
    const auto& v = cfg["paths"][key];
    if (v.is_null()) return std::nullopt;
    fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
  }

  fs::path require_input(const std::string& key) const {
    const auto p = input_path(key);
    if (!p) throw ConfigError("/paths/" + key, "path is required for this subcommand");
    if (!fs::exists(*p)) throw ConfigError("/paths/" + key, "file not found: " + p->string());
    return *p;
  }

  fs::path artifact(const std::string& name) const { return out / name; }

  fs::path prerequisite(const std::string& name, const std::string& stage) const {
    const auto p = artifact(name);
    if (!fs::exists(p)) throw MissingPrerequisite(stage, p.string());
    return p;
  }
};

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_manifest(const Context& ctx, const std::string& stage, const std::vector<std::string>& outputs) {
  json m;
  m["stage"] = stage;
  m["version"] = kVersion;
  m["seed"] = ctx.seed;
  m["stage_seed"] = ctx.stage_seed(stage);
  m["config_hash"] = ctx.config_hash;
  json files = json::object();
  for (const auto& name : outputs) files[name] = hex64(fnv1a64(read_text(ctx.artifact(name))));
  m["outputs"] = files;
  write_text(ctx.artifact(stage + ".manifest.json"), m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------------
// Dataset records written by ingest

struct Record {
  std::string id;
  double ratio = 1.0;
  double target = 0.5;
  Split split = Split::train;
};

std::vector<Record> load_dataset(const Context& ctx) {
  std::ifstream in(ctx.prerequisite("dataset.jsonl", "ingest"));
  std::vector<Record> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    out.push_back({j.at("id"), j.at("ratio"), j.at("target"), split_from_string(j.at("split"))});
  }
  return out;
}

std::vector<ProjectDossier> load_ingested(const Context& ctx) {
  return load_corpus(ctx.prerequisite("corpus.jsonl", "ingest").string());
}

std::vector<TokenizedDoc> texts_of(const std::vector<ProjectDossier>& corpus, const std::set<std::string>& ids,
                                   bool include_website) {
  std::vector<TokenizedDoc> docs;
  auto add = [&](const std::optional<std::string>& text) {
    if (!text) return;
    if (text->find_first_not_of(" \t\r\n") == std::string::npos) return;
    docs.push_back(tokenize(*text));
  };
  for (const auto& d : corpus) {
    if (!ids.contains(d.id)) continue;
    add(d.white_paper);
    if (include_website) add(d.website_text);
  }
  return docs;
}

std::set<std::string> ids_in(const std::vector<Record>& data, Split split) {
  std::set<std::string> out;
  for (const auto& r : data)
    if (r.split == split) out.insert(r.id);
  return out;
}

TrainOptions train_options(const Context& ctx) {
  const auto& m = ctx.cfg["model"];
  TrainOptions o;
  o.lambda = m["lambda"];
  o.learning_rate = m["learning_rate"];
  o.batch_size = m["batch_size"];
  o.max_epochs = m["max_epochs"];
  o.seed = ctx.stage_seed("train");
  o.target_mode = target_mode_from_string(ctx.cfg["target_mode"]);
  o.horizon_days = ctx.cfg["horizon_days"];
  return o;
}

struct FeatureSet {
  std::vector<FeatureVector> vectors;
  std::map<std::string, std::size_t> index;
};

FeatureSet load_features(const Context& ctx) {
  FeatureSet fs;
  fs.vectors = load_feature_vectors(ctx.prerequisite("features.jsonl", "featurize").string());
  for (std::size_t i = 0; i < fs.vectors.size(); ++i) fs.index[fs.vectors[i].dossier_id] = i;
  return fs;
}

const FeatureVector& features_for(const FeatureSet& fs, const std::string& id) {
  const auto it = fs.index.find(id);
  if (it == fs.index.end()) throw InvalidInput("no feature vector for dossier '" + id + "'; rerun featurize");
  return fs.vectors[it->second];
}

std::vector<double> scam_bars(const Context& ctx) { return ctx.cfg["scam_bars"].get<std::vector<double>>(); }

// ---------------------------------------------------------------------------------------------
// Stages

void stage_ingest(const Context& ctx, std::ostream& out) {
  const auto corpus = load_corpus(ctx.require_input("corpus").string());
  const int horizon = ctx.cfg["horizon_days"];
  const auto mode = target_mode_from_string(ctx.cfg["target_mode"]);
  const auto splits = split_dataset(corpus.size(), ctx.stage_seed("ingest"));
  std::string lines;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& d = corpus[i];
    json j;
    j["id"] = d.id;
    j["ratio"] = d.price_series.ratio(horizon);
    j["target"] = derive_target(d.price_series, horizon, mode);
    j["split"] = to_string(splits[i]);
    lines += j.dump() + "\n";
  }
  save_corpus(ctx.artifact("corpus.jsonl").string(), corpus);
  write_text(ctx.artifact("dataset.jsonl"), lines);
  write_manifest(ctx, "ingest", {"corpus.jsonl", "dataset.jsonl"});
  out << "ingested " << corpus.size() << " dossiers\n";
}

void stage_stats(const Context& ctx, std::ostream& out) {
  const auto corpus = load_ingested(ctx);
  std::vector<TokenizedDoc> docs;
  for (const auto& d : corpus)
    if (d.white_paper && d.white_paper->find_first_not_of(" \t\r\n") != std::string::npos)
      docs.push_back(tokenize(*d.white_paper));
  const auto table = format_stats_table(corpus_stats(docs));
  write_text(ctx.artifact("stats.txt"), table);
  write_manifest(ctx, "stats", {"stats.txt"});
  out << table;
}

void stage_train_lda(const Context& ctx, std::ostream& out) {
  const auto corpus = load_ingested(ctx);
  const auto data = load_dataset(ctx);
  const auto& c = ctx.cfg["lda"];
  LdaOptions o;
  o.topics = c["topics"];
  if (!c["alpha"].is_null()) o.alpha = c["alpha"].get<double>();
  o.beta = c["beta"];
  o.iterations = c["iterations"];
  o.vocabulary.min_count = c["min_count"];
  o.seed = ctx.stage_seed("train-lda");
  const auto model = fit_lda(texts_of(corpus, ids_in(data, Split::train), false), o);
  save_topic_model(model, ctx.artifact("lda.bin").string());
  write_manifest(ctx, "train-lda", {"lda.bin"});
  out << "trained " << model.topics() << " topics over " << model.vocab_size() << " words\n";
}

std::string topic_label(const TopicModel& model, Index k) {
  const auto words = top_words(model, k, std::min<std::size_t>(3, model.vocab.size()));
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : "/") + w;
  return s;
}

void stage_topics(const Context& ctx, std::ostream& out) {
  const auto model = load_topic_model(ctx.prerequisite("lda.bin", "train-lda").string());
  std::ostringstream os;
  const std::size_t n = std::min<std::size_t>(10, model.vocab.size());
  for (Index k = 0; k < model.topics(); ++k) {
    os << "topic " << k << ":";
    for (const auto& w : top_words(model, k, n)) os << ' ' << w;
    os << '\n';
  }
  write_text(ctx.artifact("topics.txt"), os.str());
  write_manifest(ctx, "topics", {"topics.txt"});
  out << os.str();
}

Dictionaries load_dictionaries(const Context& ctx) {
  Dictionaries d;
  if (ctx.input_path("companies")) d.companies = load_dictionary(ctx.require_input("companies").string(), "companies");
  if (ctx.input_path("universities"))
    d.universities = load_dictionary(ctx.require_input("universities").string(), "universities");
  return d;
}

void stage_train_tagger(const Context& ctx, std::ostream& out) {
  const auto data = read_labeled_sequences(ctx.require_input("bios").string());
  const auto dicts = load_dictionaries(ctx);
  const auto& c = ctx.cfg["tagger"];
  CrfTrainOptions o;
  o.l2 = c["l2"];
  o.step = c["step"];
  o.batch_size = c["batch_size"];
  o.max_epochs = c["max_epochs"];
  o.patience = c["patience"];
  o.seed = ctx.stage_seed("train-tagger");
  const auto splits = split_dataset(data.size(), o.seed);
  std::vector<LabeledSequence> train, dev, test;
  for (std::size_t i = 0; i < data.size(); ++i)
    (splits[i] == Split::train ? train : splits[i] == Split::dev ? dev : test).push_back(data[i]);
  const auto model = train_crf(train, dev, dicts, o);
  save_tagger_model(model, ctx.artifact("tagger.bin").string());
  const auto report = format_tagger_report(evaluate_tagger(model, test));
  write_text(ctx.artifact("tagger_report.txt"), report);
  write_manifest(ctx, "train-tagger", {"tagger.bin", "tagger_report.txt"});
  out << report;
}

json tag_json(const TaggerModel& model, const std::string& text) {
  json sentences = json::array();
  const auto doc = tokenize(text);
  for (const auto& s : doc.sentences) {
    const auto labels = decode(model, TokenSequence{s, std::nullopt, std::nullopt});
    json tokens = json::array();
    for (std::size_t i = 0; i < s.size(); ++i) tokens.push_back({s[i], label_to_string(labels[i])});
    sentences.push_back(tokens);
  }
  return sentences;
}

void stage_tag(const Context& ctx, const std::optional<std::string>& text, std::ostream& out) {
  const auto model = load_tagger_model(ctx.prerequisite("tagger.bin", "train-tagger").string());
  if (text) {
    out << tag_json(model, *text).dump() << '\n';
    return;
  }
  const auto corpus = load_ingested(ctx);
  std::string lines;
  for (const auto& d : corpus) {
    json members = json::array();
    for (const auto& b : d.team_bios) {
      if (b.bio.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      members.push_back({{"name", b.name}, {"sentences", tag_json(model, b.bio)}});
    }
    lines += json{{"id", d.id}, {"team", members}}.dump() + "\n";
  }
  write_text(ctx.artifact("tags.jsonl"), lines);
  write_manifest(ctx, "tag", {"tags.jsonl"});
  out << "tagged bios of " << corpus.size() << " dossiers\n";
}

void stage_pretrain_encoder(const Context& ctx, std::ostream& out) {
  const auto corpus = load_ingested(ctx);
  const auto data = load_dataset(ctx);
  const auto& c = ctx.cfg["encoder"];
  const Index dim = c["dim"];
  WordEmbeddingTable table;
  const std::uint64_t seed = ctx.stage_seed("pretrain-encoder");
  if (ctx.input_path("embeddings")) {
    table = load_embeddings(ctx.require_input("embeddings").string(), dim, seed);
  } else {
    table.dim = dim;
    table.oov_seed = seed;
  }
  EncoderConfig ec;
  ec.hidden = c["hidden"];
  ec.layers = c["layers"];
  ec.output_tanh = c["output_tanh"];
  ec.seed = seed;
  const auto stack = make_encoder(std::move(table), ec);
  SkipThoughtConfig sc;
  sc.epochs = c["epochs"];
  sc.step = c["step"];
  sc.clip_norm = c["clip_norm"];
  sc.batch_size = c["batch_size"];
  sc.max_vocab = c["max_vocab"];
  sc.max_sentence_tokens = c["max_sentence_tokens"];
  sc.fine_tune_embeddings = c["fine_tune_embeddings"];
  sc.seed = seed;
  PretrainReport report;
  const auto trained = pretrain_skipthought(stack, texts_of(corpus, ids_in(data, Split::train), true), sc, &report);
  save_encoder(trained, ctx.artifact("encoder.bin").string());
  json r{{"initial_loss", report.initial_loss},
         {"epoch_loss", report.epoch_loss},
         {"final_loss", report.final_loss},
         {"vocab_size", report.vocab_size},
         {"triples", report.triples}};
  write_text(ctx.artifact("pretrain_report.json"), r.dump(2) + "\n");
  write_manifest(ctx, "pretrain-encoder", {"encoder.bin", "pretrain_report.json"});
  out << "skip-thought loss " << report.initial_loss << " -> " << report.final_loss << '\n';
}

void stage_featurize(const Context& ctx, std::ostream& out) {
  const auto corpus = load_ingested(ctx);
  const auto topics = load_topic_model(ctx.prerequisite("lda.bin", "train-lda").string());
  const auto tagger = load_tagger_model(ctx.prerequisite("tagger.bin", "train-tagger").string());
  const auto encoder = load_encoder(ctx.prerequisite("encoder.bin", "pretrain-encoder").string());
  FeatureConfig fc;
  fc.fold_in_iterations = ctx.cfg["lda"]["fold_in_iterations"];
  fc.seed = ctx.stage_seed("featurize");
  fc.default_ico_year = ctx.cfg["features"]["default_ico_year"];
  fc.max_platforms = ctx.cfg["features"]["max_platforms"];
  const auto context = make_feature_context(corpus, fc);
  std::vector<FeatureVector> vectors(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    vectors[i] = featurize_project(corpus[i], topics, encoder, tagger, context);
  save_feature_vectors(ctx.artifact("features.jsonl").string(), vectors);
  write_manifest(ctx, "featurize", {"features.jsonl"});
  out << "featurized " << vectors.size() << " dossiers, dimension "
      << (vectors.empty() ? 0 : vectors.front().values.size()) << '\n';
}

std::vector<LabeledFeatures> labeled(const std::vector<Record>& data, const FeatureSet& fs, Split split) {
  std::vector<LabeledFeatures> out;
  for (const auto& r : data) {
    if (r.split != split) continue;
    LabeledFeatures lf;
    lf.features = features_for(fs, r.id);
    lf.target = r.target;
    lf.ratio = r.ratio;
    out.push_back(std::move(lf));
  }
  return out;
}

std::vector<RegressionExample> regression(const std::vector<LabeledFeatures>& data) {
  std::vector<RegressionExample> out;
  for (const auto& lf : data) out.push_back({lf.features.values, lf.target});
  return out;
}

void stage_train(const Context& ctx, std::ostream& out) {
  const auto data = load_dataset(ctx);
  const auto fs = load_features(ctx);
  const auto train_set = labeled(data, fs, Split::train);
  const auto dev_set = labeled(data, fs, Split::dev);
  require(!train_set.empty(), "training split is empty");
  TrainHistory history;
  const auto model = train(regression(train_set), regression(dev_set), train_set.front().features.spans,
                           train_options(ctx), &history);
  save_rating_model(model, ctx.artifact("model.bin").string());
  json h{{"train_loss", history.train_loss}, {"dev_loss", history.dev_loss}, {"best_epoch", model.best_epoch}};
  write_text(ctx.artifact("train_history.json"), h.dump(2) + "\n");
  write_manifest(ctx, "train", {"model.bin", "train_history.json"});
  out << "trained rating model; best dev epoch " << model.best_epoch << " of " << model.epochs_run << '\n';
}

void stage_evaluate(const Context& ctx, std::ostream& out) {
  const auto data = load_dataset(ctx);
  const auto fs = load_features(ctx);
  const auto tables = run_ablation(labeled(data, fs, Split::train), labeled(data, fs, Split::dev),
                                   labeled(data, fs, Split::test), scam_bars(ctx), train_options(ctx));
  write_text(ctx.artifact("report.json"), ablation_tables_to_json(tables) + "\n");
  const auto text = format_ablation_tables(tables);
  write_text(ctx.artifact("report.txt"), text);
  write_manifest(ctx, "evaluate", {"report.json", "report.txt"});
  out << text;
}

RatingModel load_trained(const Context& ctx) {
  return load_rating_model(ctx.prerequisite("model.bin", "train").string());
}

void stage_predict(const Context& ctx, std::ostream& out) {
  const auto model = load_trained(ctx);
  const auto data = load_dataset(ctx);
  const auto fs = load_features(ctx);
  const auto bars = scam_bars(ctx);
  std::string lines;
  for (const auto& r : data) {
    const auto& fv = features_for(fs, r.id);
    json j;
    j["id"] = r.id;
    j["split"] = to_string(r.split);
    j["score"] = predict_score(model, fv.values);
    json labels = json::object();
    for (double m : bars) {
      std::ostringstream key;
      key << m;
      labels[key.str()] = classify(model, fv.values, m);
    }
    j["scam"] = labels;
    lines += j.dump() + "\n";
  }
  write_text(ctx.artifact("predictions.jsonl"), lines);
  write_manifest(ctx, "predict", {"predictions.jsonl"});
  out << "wrote predictions for " << data.size() << " dossiers\n";
}

void stage_explain(const Context& ctx, std::ostream& out) {
  const auto model = load_trained(ctx);
  const auto topics = load_topic_model(ctx.prerequisite("lda.bin", "train-lda").string());
  const auto data = load_dataset(ctx);
  const auto fs = load_features(ctx);
  std::string lines;
  std::vector<FeatureVector> test;
  for (const auto& r : data) {
    if (r.split != Split::test) continue;
    const auto& fv = features_for(fs, r.id);
    test.push_back(fv);
    lines += explanation_to_json(saliency(model, fv), erasure_report(model, fv), scam_score(model, fv.values)) + "\n";
  }
  std::vector<std::string> names;
  for (Index k = 0; k < topics.topics(); ++k) names.push_back(topic_label(topics, k));
  const auto ranking = topic_risk_ranking(model, fs.vectors, names);
  write_text(ctx.artifact("explanations.jsonl"), lines);
  write_text(ctx.artifact("topic_ranking.json"), topic_ranking_to_json(ranking) + "\n");
  write_manifest(ctx, "explain", {"explanations.jsonl", "topic_ranking.json"});
  out << "topic scam ranking (positive raises the scam score):\n";
  for (const auto& t : ranking) out << "  " << std::setw(3) << t.topic << "  " << t.score << "  " << t.name << '\n';
}

void stage_synth(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.cfg["synth"];
  SyntheticConfig sc;
  sc.n_projects = c["projects"];
  sc.signal_strength = c["signal_strength"];
  sc.noise = c["noise"];
  sc.n_bio_sequences = c["bio_sequences"];
  sc.horizon_days = ctx.cfg["horizon_days"];
  const auto data = generate_synthetic(sc, ctx.stage_seed("synth"));
  write_synthetic(data, ctx.out.string());
  write_manifest(ctx, "synth", {"corpus.jsonl", "truth.json", "bios.tsv", "companies.txt", "universities.txt"});
  out << "wrote synthetic corpus of " << data.dossiers.size() << " dossiers to " << ctx.out.string() << '\n';
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message, const json& extra = {}) {
  json j{{"error", kind}, {"message", message}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) j[k] = v;
  err << j.dump() << '\n';
}

}  // namespace

json default_config() {
  return json::parse(R"({
    "paths": {"corpus": null, "bios": null, "companies": null, "universities": null, "embeddings": null},
    "seed": 1,
    "horizon_days": 365,
    "target_mode": "log",
    "scam_bars": [0.01, 0.1, 1],
    "lda": {"topics": 50, "alpha": null, "beta": 0.01, "iterations": 100, "min_count": 3, "fold_in_iterations": 50},
    "tagger": {"l2": 0.0001, "step": 0.1, "batch_size": 8, "max_epochs": 60, "patience": 5},
    "encoder": {"dim": 300, "hidden": 300, "layers": 4, "output_tanh": false, "epochs": 5, "step": 0.1,
                "clip_norm": 5.0, "batch_size": 16, "max_vocab": 5000, "max_sentence_tokens": 30,
                "fine_tune_embeddings": true},
    "features": {"max_platforms": 20, "default_ico_year": 2017},
    "model": {"lambda": 0.001, "learning_rate": 0.05, "batch_size": 30, "max_epochs": 200},
    "synth": {"projects": 200, "signal_strength": 1.0, "noise": 0.15, "bio_sequences": 500}
  })");
}

json resolve_config(const json& user) {
  json cfg = default_config();
  merge_into(cfg, user, "");
  for (const auto& key : {"corpus", "bios", "companies", "universities", "embeddings"}) {
    const auto& v = cfg["paths"][key];
    if (!v.is_null() && !v.is_string()) throw ConfigError(std::string("/paths/") + key, "expected a string path");
  }
  if (!cfg["lda"]["alpha"].is_null() && !cfg["lda"]["alpha"].is_number())
    throw ConfigError("/lda/alpha", "expected a number or null");
  if (!cfg["seed"].is_number_unsigned()) throw ConfigError("/seed", "expected a nonnegative integer");
  check_positive_int(cfg, "/horizon_days");
  try {
    target_mode_from_string(cfg["target_mode"]);
  } catch (const Error&) {
    throw ConfigError("/target_mode", "expected \"log\" or \"literal\"");
  }
  const auto& bars = cfg["scam_bars"];
  if (bars.empty()) throw ConfigError("/scam_bars", "at least one scam bar m is required");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (!bars[i].is_number() || bars[i].get<double>() <= 0.0)
      throw ConfigError("/scam_bars/" + std::to_string(i), "scam bar m must be a number > 0");
  }
  check_positive_int(cfg, "/lda/topics", 2);
  if (cfg["lda"]["alpha"].is_number()) check_positive(cfg, "/lda/alpha");
  check_positive(cfg, "/lda/beta");
  check_positive_int(cfg, "/lda/iterations", 0);
  check_positive_int(cfg, "/lda/min_count");
  check_positive_int(cfg, "/lda/fold_in_iterations", 0);
  check_positive(cfg, "/tagger/l2", true);
  check_positive(cfg, "/tagger/step");
  check_positive_int(cfg, "/tagger/batch_size");
  check_positive_int(cfg, "/tagger/max_epochs");
  check_positive_int(cfg, "/tagger/patience");
  check_positive_int(cfg, "/encoder/dim");
  check_positive_int(cfg, "/encoder/hidden");
  check_positive_int(cfg, "/encoder/layers");
  check_positive_int(cfg, "/encoder/epochs", 0);
  check_positive(cfg, "/encoder/step");
  check_positive(cfg, "/encoder/clip_norm");
  check_positive_int(cfg, "/encoder/batch_size");
  check_positive_int(cfg, "/encoder/max_vocab");
  check_positive_int(cfg, "/encoder/max_sentence_tokens");
  check_positive_int(cfg, "/features/max_platforms", 0);
  check_positive_int(cfg, "/features/default_ico_year");
  check_positive(cfg, "/model/lambda", true);
  check_positive(cfg, "/model/learning_rate");
  check_positive_int(cfg, "/model/batch_size");
  check_positive_int(cfg, "/model/max_epochs");
  check_positive_int(cfg, "/synth/projects");
  check_positive(cfg, "/synth/signal_strength", true);
  check_positive(cfg, "/synth/noise", true);
  check_positive_int(cfg, "/synth/bio_sequences");
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ICO risk scoring pipeline", "icorate"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = "artifacts";
  std::optional<std::string> tag_text;
  app.add_option("--config", config_path, "Pipeline config (JSON)");
  app.add_option("--seed", seed_override, "Override the config seed");
  app.add_option("--out", out_dir, "Artifact directory");
  app.add_flag_callback("--version", [&] { throw CLI::Success(); }, "Print the version");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "Load and validate the corpus, derive targets and splits"},
      {"stats", "White-paper length statistics"},
      {"train-lda", "Fit the topic model"},
      {"topics", "List top words per topic"},
      {"train-tagger", "Train the bio tagger"},
      {"tag", "Tag team bios (or --text)"},
      {"pretrain-encoder", "Skip-thought pretraining of the document encoder"},
      {"featurize", "Fuse per-aspect feature vectors"},
      {"train", "Train the rating regressor"},
      {"evaluate", "Ablation report for every scam bar m"},
      {"predict", "Scores and scam labels"},
      {"explain", "Saliency, erasure and topic risk ranking"},
      {"synth", "Generate a synthetic corpus into --out"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "tag") sub->add_option("--text", tag_text, "Tag this text instead of the corpus bios");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::Success&) {
    out << "icorate " << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Context ctx;
    json user = json::object();
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw ConfigError("", "config file not found: " + config_path);
      try {
        user = json::parse(read_text(config_path));
      } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
      }
      ctx.base = fs::absolute(config_path).parent_path();
    } else {
      ctx.base = fs::current_path();
    }
    ctx.cfg = resolve_config(user);
    if (seed_override) ctx.cfg["seed"] = *seed_override;
    ctx.seed = ctx.cfg["seed"];
    ctx.config_hash = hex64(fnv1a64(ctx.cfg.dump()));
    ctx.out = out_dir;
    fs::create_directories(ctx.out);

    if (command == "ingest") stage_ingest(ctx, out);
    else if (command == "stats") stage_stats(ctx, out);
    else if (command == "train-lda") stage_train_lda(ctx, out);
    else if (command == "topics") stage_topics(ctx, out);
    else if (command == "train-tagger") stage_train_tagger(ctx, out);
    else if (command == "tag") stage_tag(ctx, tag_text, out);
    else if (command == "pretrain-encoder") stage_pretrain_encoder(ctx, out);
    else if (command == "featurize") stage_featurize(ctx, out);
    else if (command == "train") stage_train(ctx, out);
    else if (command == "evaluate") stage_evaluate(ctx, out);
    else if (command == "predict") stage_predict(ctx, out);
    else if (command == "explain") stage_explain(ctx, out);
    else if (command == "synth") stage_synth(ctx, out);
    return 0;
  } catch (const ConfigError& e) {
    print_error(err, "config", e.what(), {{"field", e.field}});
    return 2;
  } catch (const MissingPrerequisite& e) {
    print_error(err, "missing_prerequisite", e.what(), {{"stage", e.stage}});
    return 3;
  } catch (const DimensionMismatch& e) {
    print_error(err, "dimension_mismatch", e.what());
  } catch (const InvalidInput& e) {
    print_error(err, "invalid_input", e.what());
  } catch (const std::exception& e) {
    print_error(err, "error", e.what());
  }
  return 1;
}

}  // namespace icorate::cli
