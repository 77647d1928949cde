#include "icorate/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "icorate/random.hpp"

namespace icorate {

using json = nlohmann::json;

double PriceSeries::ratio(int horizon_days) const {
  const auto it = price_at.find(horizon_days);
  if (it == price_at.end()) {
    throw InvalidInput("price series has no price at horizon " + std::to_string(horizon_days) + " days");
  }
  return it->second / ico_price;
}

std::size_t TokenizedDoc::n_tokens() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<std::size_t> TokenizedDoc::sentence_lengths() const {
  std::vector<std::size_t> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.size());
  return out;
}

std::vector<std::string> TokenizedDoc::lowercased_tokens() const {
  std::vector<std::string> out;
  out.reserve(n_tokens());
  for (const auto& s : sentences)
    for (const auto& t : s) out.push_back(to_lower(t));
  return out;
}

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw InvalidInput("unknown split '" + s + "'");
}

std::string to_string(TargetMode m) { return m == TargetMode::log ? "log" : "literal"; }

TargetMode target_mode_from_string(const std::string& s) {
  if (s == "log") return TargetMode::log;
  if (s == "literal") return TargetMode::literal;
  throw InvalidInput("unknown target mode '" + s + "' (expected log or literal)");
}

std::string to_lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

namespace {

std::optional<std::string> optional_string(const json& rec, const char* key) {
  const auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InvalidInput(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::int64_t count_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return 0;
  if (!it->is_number_integer()) throw InvalidInput(std::string("field 'github.") + key + "' must be an integer");
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw InvalidInput(std::string("field 'github.") + key + "' must be nonnegative");
  return v;
}

const std::set<std::string>& known_fields() {
  static const std::set<std::string> fields = {
      "id",       "white_paper",  "team_bios",     "website_text", "github",
      "platform", "total_supply", "cap_unlimited", "price_series", "ico_year"};
  return fields;
}

}  // namespace

ProjectDossier parse_dossier(const std::string& json_line) {
  json rec;
  try {
    rec = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("invalid JSON: ") + e.what());
  }
  if (!rec.is_object()) throw InvalidInput("record is not a JSON object");
  for (const auto& [key, _] : rec.items()) {
    if (!known_fields().contains(key)) throw InvalidInput("unknown field '" + key + "'");
  }

  ProjectDossier d;
  const auto id = optional_string(rec, "id");
  if (!id || id->empty()) throw InvalidInput("field 'id' is required and must be nonempty");
  d.id = *id;
  d.white_paper = optional_string(rec, "white_paper");
  d.website_text = optional_string(rec, "website_text");
  d.platform = optional_string(rec, "platform");

  if (const auto it = rec.find("team_bios"); it != rec.end() && !it->is_null()) {
    if (!it->is_array()) throw InvalidInput("field 'team_bios' must be an array");
    for (const auto& entry : *it) {
      TeamBio bio;
      if (entry.is_array() && entry.size() == 2 && entry[0].is_string() && entry[1].is_string()) {
        bio.name = entry[0].get<std::string>();
        bio.bio = entry[1].get<std::string>();
      } else if (entry.is_object() && entry.contains("name") && entry.contains("bio")) {
        bio.name = entry.at("name").get<std::string>();
        bio.bio = entry.at("bio").get<std::string>();
      } else {
        throw InvalidInput("team_bios entries must be [name, bio] pairs");
      }
      d.team_bios.push_back(std::move(bio));
    }
  }

  if (const auto it = rec.find("github"); it != rec.end() && !it->is_null()) {
    if (!it->is_object()) throw InvalidInput("field 'github' must be an object");
    GithubMeta gh;
    gh.readme_text = optional_string(*it, "readme_text");
    gh.n_branches = count_field(*it, "n_branches");
    gh.n_commits = count_field(*it, "n_commits");
    gh.loc_total = count_field(*it, "loc_total");
    gh.n_files = count_field(*it, "n_files");
    d.github = std::move(gh);
  }

  if (const auto it = rec.find("total_supply"); it != rec.end() && !it->is_null()) {
    if (!it->is_number()) throw InvalidInput("field 'total_supply' must be a number");
    const double v = it->get<double>();
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("field 'total_supply' must be finite and >= 0");
    d.total_supply = v;
  }
  if (const auto it = rec.find("cap_unlimited"); it != rec.end() && !it->is_null()) {
    if (!it->is_boolean()) throw InvalidInput("field 'cap_unlimited' must be a boolean");
    d.cap_unlimited = it->get<bool>();
  }
  if (const auto it = rec.find("ico_year"); it != rec.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw InvalidInput("field 'ico_year' must be an integer");
    d.ico_year = it->get<int>();
  }

  const auto ps = rec.find("price_series");
  if (ps == rec.end() || !ps->is_object()) throw InvalidInput("field 'price_series' is required");
  if (!ps->contains("ico_price") || !ps->at("ico_price").is_number()) {
    throw InvalidInput("field 'price_series.ico_price' is required");
  }
  d.price_series.ico_price = ps->at("ico_price").get<double>();
  if (!(d.price_series.ico_price > 0.0) || !std::isfinite(d.price_series.ico_price)) {
    throw InvalidInput("price_series.ico_price must be > 0");
  }
  if (const auto it = ps->find("price_at"); it != ps->end() && !it->is_null()) {
    if (!it->is_object()) throw InvalidInput("field 'price_series.price_at' must be an object");
    for (const auto& [key, value] : it->items()) {
      int day = 0;
      std::size_t used = 0;
      try {
        day = std::stoi(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size() || key.empty()) {
        throw InvalidInput("price_series.price_at key '" + key + "' is not an integer day offset");
      }
      if (!value.is_number() || !(value.get<double>() > 0.0) || !std::isfinite(value.get<double>())) {
        throw InvalidInput("price_series.price_at[" + key + "] must be a positive number");
      }
      d.price_series.price_at[day] = value.get<double>();
    }
  }
  return d;
}

std::string dossier_to_json(const ProjectDossier& d) {
  json rec;
  rec["id"] = d.id;
  if (d.white_paper) rec["white_paper"] = *d.white_paper;
  json bios = json::array();
  for (const auto& b : d.team_bios) bios.push_back(json::array({b.name, b.bio}));
  rec["team_bios"] = bios;
  if (d.website_text) rec["website_text"] = *d.website_text;
  if (d.github) {
    json gh;
    if (d.github->readme_text) gh["readme_text"] = *d.github->readme_text;
    gh["n_branches"] = d.github->n_branches;
    gh["n_commits"] = d.github->n_commits;
    gh["loc_total"] = d.github->loc_total;
    gh["n_files"] = d.github->n_files;
    rec["github"] = gh;
  }
  if (d.platform) rec["platform"] = *d.platform;
  if (d.total_supply) rec["total_supply"] = *d.total_supply;
  rec["cap_unlimited"] = d.cap_unlimited;
  json prices = json::object();
  for (const auto& [day, price] : d.price_series.price_at) prices[std::to_string(day)] = price;
  rec["price_series"] = {{"ico_price", d.price_series.ico_price}, {"price_at", prices}};
  if (d.ico_year) rec["ico_year"] = *d.ico_year;
  return rec.dump();
}

std::vector<ProjectDossier> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open corpus file '" + path + "'");
  std::vector<ProjectDossier> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ProjectDossier d;
    try {
      d = parse_dossier(line);
    } catch (const InvalidInput& e) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(d.id).second) {
      throw InvalidInput(path + ":" + std::to_string(line_no) + ": duplicate id '" + d.id + "'");
    }
    out.push_back(std::move(d));
  }
  return out;
}

void save_corpus(const std::string& path, const std::vector<ProjectDossier>& corpus) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const auto& d : corpus) out << dossier_to_json(d) << '\n';
}

namespace {

bool is_word_byte(unsigned char ch) { return std::isalnum(ch) || ch >= 0x80; }

bool is_terminal(char ch) { return ch == '.' || ch == '!' || ch == '?'; }

}  // namespace

TokenizedDoc tokenize(const std::string& text) {
  if (text.find_first_not_of(" \t\r\n\f\v") == std::string::npos) {
    throw InvalidInput("cannot tokenize empty text");
  }
  TokenizedDoc doc;
  Sentence current;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) current.push_back(std::move(token));
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!current.empty()) doc.sentences.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto ch = static_cast<unsigned char>(text[i]);
    if (is_word_byte(ch)) {
      token.push_back(static_cast<char>(ch));
      continue;
    }
    flush_token();
    if (is_terminal(static_cast<char>(ch))) {
      const bool at_end = i + 1 == text.size();
      if (at_end || std::isspace(static_cast<unsigned char>(text[i + 1]))) flush_sentence();
    }
  }
  flush_sentence();
  if (doc.sentences.empty()) throw InvalidInput("text contains no word tokens");
  return doc;
}

double transform_ratio(double ratio, TargetMode mode) {
  if (mode == TargetMode::literal) return sigmoid(ratio);
  if (!(ratio > 0.0)) throw InvalidInput("log target mode needs a positive price ratio");
  return sigmoid(std::log(ratio));
}

double derive_target(const PriceSeries& series, int horizon_days, TargetMode mode) {
  return transform_ratio(series.ratio(horizon_days), mode);
}

int derive_label(const PriceSeries& series, int horizon_days, double scam_bar) {
  require(scam_bar > 0.0, "scam bar m must be > 0");
  return series.ratio(horizon_days) <= scam_bar ? 1 : 0;
}

std::vector<Split> split_dataset(std::size_t n, std::uint64_t seed) {
  require(n >= 10, "split_dataset needs at least 10 examples, got " + std::to_string(n));
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_dev = n / 10;
  Rng rng(seed);
  const auto order = rng.permutation(n);
  std::vector<Split> out(n, Split::test);
  for (std::size_t r = 0; r < n; ++r) {
    out[order[r]] = r < n_train ? Split::train : (r < n_train + n_dev ? Split::dev : Split::test);
  }
  return out;
}

void split_dataset(std::vector<LabeledExample>& examples, std::uint64_t seed) {
  const auto splits = split_dataset(examples.size(), seed);
  for (std::size_t i = 0; i < examples.size(); ++i) examples[i].split = splits[i];
}

namespace {

LengthStats length_stats(const std::vector<std::size_t>& counts) {
  LengthStats s;
  s.min = *std::min_element(counts.begin(), counts.end());
  s.max = *std::max_element(counts.begin(), counts.end());
  for (auto c : counts) s.total += c;
  const double n = static_cast<double>(counts.size());
  s.mean = static_cast<double>(s.total) / n;
  double ss = 0.0;
  for (auto c : counts) ss += (static_cast<double>(c) - s.mean) * (static_cast<double>(c) - s.mean);
  s.std = std::sqrt(ss / n);
  return s;
}

}  // namespace

CorpusStats corpus_stats(const std::vector<TokenizedDoc>& docs) {
  require(!docs.empty(), "corpus_stats needs at least one document");
  std::vector<std::size_t> words, sents;
  for (const auto& d : docs) {
    words.push_back(d.n_tokens());
    sents.push_back(d.n_sentences());
  }
  return {docs.size(), length_stats(words), length_stats(sents)};
}

std::string format_stats_table(const CorpusStats& s) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "#Doc\tAve Word\tStd Word\tMax Word\tMin Word\n"
     << s.n_docs << '\t' << s.words.mean << '\t' << s.words.std << '\t' << s.words.max << '\t'
     << s.words.min << '\n'
     << "#Doc\tAve Sent\tStd Sent\tMax Sent\tMin Sent\n"
     << s.n_docs << '\t' << s.sentences.mean << '\t' << s.sentences.std << '\t' << s.sentences.max
     << '\t' << s.sentences.min << '\n'
     << "(std is the population standard deviation)\n";
  return os.str();
}

}  // namespace icorate
