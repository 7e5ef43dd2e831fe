#include "semfield/report.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "semfield/corpus.hpp"
#include "semfield/doc_vectors.hpp"
#include "semfield/error.hpp"
#include "semfield/sem_field.hpp"
#include "semfield/stat_tests.hpp"
#include "text_io.hpp"

namespace semfield {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

template <class T>
T get_field(const json& obj, const char* key, const char* what) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::validation, fmt::format("config: '{}' must be {}", key, what));
  }
}

ChannelParams parse_channel(const json& item, std::uint64_t fallback_seed) {
  if (!item.is_object()) throw Error(ErrorKind::validation, "config: each synth channel must be an object");
  const auto kind_name = get_field<std::string>(item, "kind", "\"machine\" or \"human\"");
  auto kind = parse_translation_kind(kind_name);
  if (!kind || *kind == TranslationKind::source)
    throw Error(ErrorKind::validation, fmt::format("config: unknown channel kind '{}'", kind_name));
  ChannelParams p = *kind == TranslationKind::machine ? ChannelParams::machine_defaults(fallback_seed)
                                                      : ChannelParams::human_defaults(fallback_seed);
  if (item.contains("narrow_widen_factor")) p.narrow_widen_factor = get_field<double>(item, "narrow_widen_factor", "a number");
  if (item.contains("norm_pull")) p.norm_pull = get_field<double>(item, "norm_pull", "a number");
  if (item.contains("length_inflation")) p.length_inflation = get_field<double>(item, "length_inflation", "a number");
  if (item.contains("seed")) p.seed = get_field<std::uint64_t>(item, "seed", "an unsigned integer");
  return p;
}

}  // namespace

void apply_config_json(RunConfig& config, const std::string& json_text, const fs::path& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, fmt::format("config: invalid JSON: {}", e.what()));
  }
  if (!root.is_object()) throw Error(ErrorKind::validation, "config: top level must be an object");

  static const std::set<std::string> kKnown = {
      "manifest",      "source_language", "target_language", "lexicons", "lemma_dicts", "concept_map",
      "frequency_tables", "priority",     "grouping_factors", "alpha",   "output_dir",  "deviation_mode",
      "top_k",         "synth"};
  for (const auto& [key, value] : root.items()) {
    if (!kKnown.contains(key)) throw Error(ErrorKind::validation, fmt::format("config: unknown field '{}'", key));
  }

  if (root.contains("manifest")) config.manifest_path = resolve(base, get_field<std::string>(root, "manifest", "a path"));
  if (root.contains("source_language"))
    config.source_language = get_field<std::string>(root, "source_language", "a string");
  if (root.contains("target_language"))
    config.target_language = get_field<std::string>(root, "target_language", "a string");
  if (root.contains("lexicons")) {
    const auto& lex = root.at("lexicons");
    if (!lex.is_object()) throw Error(ErrorKind::validation, "config: 'lexicons' must be an object");
    for (const auto& [lang, spec] : lex.items()) {
      LexiconConfig lc;
      const json* paths = &spec;
      if (spec.is_object()) {
        if (!spec.contains("paths")) throw Error(ErrorKind::validation, fmt::format("config: lexicons.{} needs 'paths'", lang));
        paths = &spec.at("paths");
        if (spec.contains("attested")) lc.attested = get_field<bool>(spec, "attested", "a boolean");
      }
      if (!paths->is_array()) throw Error(ErrorKind::validation, fmt::format("config: lexicons.{} paths must be a list", lang));
      for (const auto& p : *paths) {
        if (!p.is_string()) throw Error(ErrorKind::validation, fmt::format("config: lexicons.{} paths must be strings", lang));
        lc.paths.push_back(resolve(base, p.get<std::string>()));
      }
      config.lexicons[lang] = std::move(lc);
    }
  }
  const auto read_path_map = [&](const char* key, std::map<std::string, fs::path>& out) {
    if (!root.contains(key)) return;
    const auto& obj = root.at(key);
    if (!obj.is_object()) throw Error(ErrorKind::validation, fmt::format("config: '{}' must be an object", key));
    for (const auto& [lang, p] : obj.items()) {
      if (!p.is_string()) throw Error(ErrorKind::validation, fmt::format("config: {}.{} must be a path", key, lang));
      out[lang] = resolve(base, p.get<std::string>());
    }
  };
  read_path_map("lemma_dicts", config.lemma_dicts);
  read_path_map("frequency_tables", config.frequency_tables);
  if (root.contains("concept_map"))
    config.concept_map_path = resolve(base, get_field<std::string>(root, "concept_map", "a path"));
  if (root.contains("priority")) {
    const auto names = get_field<std::vector<std::string>>(root, "priority", "a list of class names");
    try {
      config.priority = parse_priority(names);
    } catch (const Error& e) {
      throw Error(ErrorKind::validation, fmt::format("config: {}", e.what()));
    }
  }
  if (root.contains("grouping_factors"))
    config.grouping_factors = get_field<std::vector<std::string>>(root, "grouping_factors", "a list of strings");
  if (root.contains("alpha")) config.alpha = get_field<double>(root, "alpha", "a number");
  if (root.contains("output_dir")) config.output_dir = resolve(base, get_field<std::string>(root, "output_dir", "a path"));
  if (root.contains("deviation_mode")) {
    const auto name = get_field<std::string>(root, "deviation_mode", "\"difference\" or \"ratio\"");
    auto mode = parse_deviation_mode(name);
    if (!mode) throw Error(ErrorKind::validation, fmt::format("config: unknown deviation_mode '{}'", name));
    config.deviation_mode = *mode;
  }
  if (root.contains("top_k")) config.top_k = get_field<std::size_t>(root, "top_k", "a positive integer");
  if (root.contains("synth")) {
    const auto& s = root.at("synth");
    if (!s.is_object()) throw Error(ErrorKind::validation, "config: 'synth' must be an object");
    auto& synth = config.synth;
    if (s.contains("target_words")) synth.target_words = get_field<std::size_t>(s, "target_words", "a positive integer");
    if (s.contains("seed")) synth.seed = get_field<std::uint64_t>(s, "seed", "an unsigned integer");
    if (s.contains("concept_density")) synth.source.concept_density = get_field<double>(s, "concept_density", "a number");
    if (s.contains("words_per_document"))
      synth.source.words_per_document = get_field<std::size_t>(s, "words_per_document", "a positive integer");
    if (s.contains("budget")) synth.budget = get_field<std::map<std::string, double>>(s, "budget", "an object of weights");
    if (s.contains("channels")) {
      const auto& channels = s.at("channels");
      if (!channels.is_array()) throw Error(ErrorKind::validation, "config: synth.channels must be a list");
      synth.channels.clear();
      std::uint64_t i = 0;
      for (const auto& item : channels) synth.channels.push_back(parse_channel(item, synth.seed + ++i));
    }
  }
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig config;
  apply_config_json(config, detail::read_file(path), path.parent_path());
  return config;
}

// ---------------------------------------------------------------------------
// Validation

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

std::string ValidationReport::render() const {
  std::string out;
  for (const auto& issue : issues) {
    out += fmt::format("{}: [{}] {}: {}\n", issue.severity == Severity::error ? "error" : "warning", issue.category,
                       issue.location, issue.message);
  }
  out += fmt::format("{} errors, {} warnings\n", error_count(), warning_count());
  return out;
}

namespace {

SentimentLexicon build_lexicon(const std::string& language, const LexiconConfig& lc, const ClassPriority& priority) {
  const auto raws = load_lexicon_sources(lc.paths, language);
  SentimentLexicon lexicon = merge_disjoint(raws, priority, language);
  lexicon.set_attested(lc.attested && !raws.empty());
  return lexicon;
}

std::string class_list(const std::set<SentimentClass>& classes) {
  std::string out;
  for (auto cls : classes) {
    if (!out.empty()) out += ", ";
    out += to_string(cls);
  }
  return out;
}

}  // namespace

ValidationReport cmd_validate(const RunConfig& config) {
  ValidationReport report;
  const auto error = [&](std::string category, std::string location, std::string message) {
    report.issues.push_back({Severity::error, std::move(category), std::move(location), std::move(message)});
  };
  const auto warn = [&](std::string category, std::string location, std::string message) {
    report.issues.push_back({Severity::warning, std::move(category), std::move(location), std::move(message)});
  };

  if (!(config.alpha > 0.0 && config.alpha < 1.0)) error("config", "alpha", "alpha must be in (0, 1)");
  if (config.top_k == 0) error("config", "top_k", "top_k must be >= 1");
  try {
    check_priority(config.priority);
  } catch (const Error& e) {
    error("config", "priority", e.what());
  }

  std::map<std::string, LemmaDict> dicts;
  for (const auto& [lang, path] : config.lemma_dicts) {
    try {
      dicts.emplace(lang, LemmaDict::load(path, lang));
    } catch (const Error& e) {
      error("lemma_dict", path.string(), e.what());
    }
  }

  std::set<std::string> manifest_languages;
  std::vector<CorpusStratum> strata;
  if (config.manifest_path.empty()) {
    error("config", "manifest", "no manifest configured");
  } else {
    try {
      const Manifest manifest = read_manifest(config.manifest_path);
      const std::size_t errors_before = report.error_count();
      std::set<std::string> ids;
      for (const auto& entry : manifest.entries) {
        if (!builtin_profile(entry.language))
          error("manifest", entry.id, fmt::format("unknown language_code '{}'", entry.language));
        if (!ids.insert(entry.id).second) error("manifest", entry.id, "duplicate document id");
        std::error_code ec;
        if (!fs::is_regular_file(entry.path, ec)) error("manifest", entry.id, fmt::format("file not found: {}", entry.path.string()));
        manifest_languages.insert(entry.language);
      }
      for (const auto& [lang, path] : manifest.lemma_dicts) {
        if (dicts.contains(lang)) continue;
        try {
          LemmaDict::load(path, lang);
        } catch (const Error& e) {
          error("lemma_dict", path.string(), e.what());
        }
      }
      if (report.error_count() == errors_before) strata = load_corpus(config.manifest_path, dicts);
    } catch (const Error& e) {
      error("manifest", config.manifest_path.string(), e.what());
    }
  }

  std::map<std::string, SentimentLexicon> lexicons;
  for (const auto& [lang, lc] : config.lexicons) {
    try {
      SentimentLexicon lex = build_lexicon(lang, lc, config.priority);
      for (const auto& c : lex.conflicts()) {
        warn("lexicon", fmt::format("{}:{}", lang, c.lemma),
             fmt::format("lemma '{}' listed as {}; resolved to {}", c.lemma, class_list(c.claimed), to_string(c.resolved)));
      }
      for (auto cls : kAllClasses) {
        if (lex.list(cls).empty()) warn("lexicon", lang, fmt::format("{} list is empty", to_string(cls)));
      }
      lexicons.emplace(lang, std::move(lex));
    } catch (const Error& e) {
      error("lexicon", lang, e.what());
    }
  }
  for (const auto& lang : manifest_languages) {
    if (!config.lexicons.contains(lang)) error("lexicon", lang, "no lexicon configured for a manifest language");
  }

  if (config.concept_map_path) {
    auto src = lexicons.find(config.source_language);
    auto tgt = lexicons.find(config.target_language);
    if (src == lexicons.end() || tgt == lexicons.end()) {
      error("concept_map", config.concept_map_path->string(), "source and target lexicons must load first");
    } else {
      try {
        load_concept_map(*config.concept_map_path, src->second, tgt->second);
      } catch (const Error& e) {
        error("concept_map", config.concept_map_path->string(), e.what());
      }
    }
  }

  for (const auto& [lang, path] : config.frequency_tables) {
    try {
      FrequencyTable::load(path, lang);
    } catch (const Error& e) {
      error("frequency_table", path.string(), e.what());
    }
  }
  for (const auto& lang : manifest_languages) {
    if (!config.frequency_tables.contains(lang))
      warn("frequency_table", lang, "no reference table; expected-frequency deviation is skipped");
  }

  for (const auto& factor : config.grouping_factors) {
    std::size_t missing = 0;
    for (const auto& s : strata) missing += stratum_key(s, factor) ? 0 : 1;
    if (!strata.empty() && missing == strata.size()) {
      error("config", factor, "grouping factor absent from every stratum");
    } else if (missing > 0) {
      warn("config", factor, fmt::format("grouping factor absent from {} strata; they are left out of it", missing));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Analysis

std::string sha256_file(const fs::path& path) {
  const std::string data = detail::read_file(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::analysis, "sha256 failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

namespace {

std::string sha256_text(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

json jnum(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class Table {
 public:
  Table(std::string description, std::vector<std::string> header)
      : description_(std::move(description)), header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void note(std::string line) { notes_.push_back(std::move(line)); }

  std::string render(const std::string& name, const std::string& preamble) const {
    std::string out = fmt::format("# table: {}: {}\n{}", name, description_, preamble);
    for (const auto& n : notes_) out += "# " + n + "\n";
    const auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_field(cells[i]);
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::string description_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> notes_;
};

std::string join(const std::set<Lemma>& items, char sep) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += sep;
    out += item;
  }
  return out;
}

struct Inputs {
  std::vector<CorpusStratum> strata;
  std::map<std::string, SentimentLexicon> lexicons;
  std::optional<ConceptMap> concepts;
  std::map<std::string, FrequencyTable> refs;
  std::vector<std::pair<std::string, std::string>> checksums;  // path, sha256
  std::string combined_checksum;
};

Inputs load_inputs(const RunConfig& config) {
  Inputs in;
  std::set<fs::path> files;
  files.insert(config.manifest_path);

  std::map<std::string, LemmaDict> dicts;
  for (const auto& [lang, path] : config.lemma_dicts) {
    dicts.emplace(lang, LemmaDict::load(path, lang));
    files.insert(path);
  }
  const Manifest manifest = read_manifest(config.manifest_path);
  for (const auto& e : manifest.entries) files.insert(e.path);
  for (const auto& [lang, path] : manifest.lemma_dicts) {
    if (!dicts.contains(lang)) files.insert(path);
  }
  in.strata = load_corpus(config.manifest_path, dicts);
  for (const auto& stratum : in.strata) {
    if (stratum.total_word_count() == 0)
      throw Error(ErrorKind::analysis, fmt::format("stratum {} has no words", stratum.label()));
  }

  for (const auto& [lang, lc] : config.lexicons) {
    in.lexicons.emplace(lang, build_lexicon(lang, lc, config.priority));
    files.insert(lc.paths.begin(), lc.paths.end());
  }
  if (config.concept_map_path) {
    auto src = in.lexicons.find(config.source_language);
    auto tgt = in.lexicons.find(config.target_language);
    if (src == in.lexicons.end() || tgt == in.lexicons.end())
      throw Error(ErrorKind::validation, "concept map needs lexicons for the source and target languages");
    in.concepts = load_concept_map(*config.concept_map_path, src->second, tgt->second);
    files.insert(*config.concept_map_path);
  }
  for (const auto& [lang, path] : config.frequency_tables) {
    in.refs.emplace(lang, FrequencyTable::load(path, lang));
    files.insert(path);
  }

  std::string joined;
  for (const auto& f : files) {
    in.checksums.emplace_back(f.generic_string(), sha256_file(f));
    joined += in.checksums.back().first + '\t' + in.checksums.back().second + '\n';
  }
  in.combined_checksum = sha256_text(joined);
  return in;
}

/// A set of strata analysed together: the manifest strata, or the manifest
/// strata merged by one grouping factor within each (language, kind).
struct View {
  std::string name;
  std::string factor;  // empty for the base view
  std::vector<CorpusStratum> strata;
  std::vector<std::string> groups;  // group id per stratum, used to pair strata
  std::vector<std::string> notes;
};

std::string group_id(const CorpusStratum& s) {
  if (s.group_keys.empty()) return "all";
  std::string out;
  for (const auto& [k, v] : s.group_keys) {
    if (!out.empty()) out += ',';
    out += k + '=' + v;
  }
  return out;
}

using PartitionKey = std::pair<std::string, std::string>;  // language, kind

std::map<PartitionKey, std::vector<CorpusStratum>> partition_by_language_kind(const std::vector<CorpusStratum>& strata) {
  std::map<PartitionKey, std::vector<CorpusStratum>> out;
  for (const auto& s : strata) {
    out[{s.language_code, s.kind ? std::string(to_string(*s.kind)) : "mixed"}].push_back(s);
  }
  return out;
}

std::vector<View> build_views(const RunConfig& config, const std::vector<CorpusStratum>& strata) {
  std::vector<View> views;
  View base{"stratum", "", strata, {}, {}};
  for (const auto& s : strata) base.groups.push_back(group_id(s));
  views.push_back(std::move(base));

  for (const auto& factor : config.grouping_factors) {
    View view{"by_" + factor, factor, {}, {}, {}};
    for (const auto& [key, members] : partition_by_language_kind(strata)) {
      std::vector<CorpusStratum> present;
      for (const auto& s : members) {
        if (stratum_key(s, factor)) {
          present.push_back(s);
        } else {
          view.notes.push_back(fmt::format("stratum {} lacks '{}' and is left out", s.label(), factor));
        }
      }
      for (auto& [value, merged] : stratify(present, factor)) {
        view.groups.push_back(value);
        view.strata.push_back(std::move(merged));
      }
    }
    views.push_back(std::move(view));
  }
  return views;
}

std::optional<MapSide> side_for(const RunConfig& config, const Inputs& in, const std::string& language) {
  if (!in.concepts) return std::nullopt;
  if (language == config.source_language) return MapSide::source;
  if (language == config.target_language) return MapSide::target;
  return std::nullopt;
}

std::size_t unique_in_document(const Document& doc, const SentimentLexicon& lex, SentimentClass cls) {
  std::set<Lemma> seen;
  for (const auto& lemma : doc.lemmas) {
    if (lex.class_of(lemma) == cls) seen.insert(lemma);
  }
  return seen.size();
}

struct Analysis {
  std::map<std::string, Table> tables;
  json summary = json::object();
};

Table& table(Analysis& a, const std::string& name, std::string description, std::vector<std::string> header) {
  auto it = a.tables.find(name);
  if (it == a.tables.end()) it = a.tables.emplace(name, Table(std::move(description), std::move(header))).first;
  return it->second;
}

void analyze_frequency(const RunConfig& config, const Inputs& in, const View& view, Analysis& a, json& jview) {
  auto& strata_t = table(a, "strata.csv", "word counts per stratum",
                         {"view", "stratum", "language", "translation_kind", "documents", "total_words"});
  auto& unique_t = table(a, "unique_lemmas.csv", "unique lemmas, tokens, and tokens per lemma per sentiment list",
                         {"view", "stratum", "class", "unique_lemmas", "tokens", "mean_tokens_per_lemma"});
  auto& hist_t = table(a, "tokens_histogram.csv", "number of lemmas attested with each token count",
                       {"view", "stratum", "class", "tokens", "lemmas"});
  auto& dev_t = table(a, "deviation_summary.csv", "observed minus expected frequency per sentiment list",
                      {"view", "stratum", "class", "mode", "scored_lemmas", "uncovered_lemmas", "mean", "median"});
  auto& devl_t = table(a, "deviation_lemmas.csv", "per-lemma observed and expected frequency (percent)",
                       {"view", "stratum", "class", "lemma", "observed_pct", "expected_pct", "deviation"});
  auto& unc_t = table(a, "uncovered.csv", "attested lemmas missing from the reference table",
                      {"view", "stratum", "class", "lemma"});

  for (const auto& stratum : view.strata) {
    const std::string label = stratum.label();
    json js = json::object();
    js["language"] = stratum.language_code;
    js["translation_kind"] = stratum.kind ? std::string(to_string(*stratum.kind)) : "mixed";
    js["group_keys"] = stratum.group_keys;
    js["documents"] = stratum.documents.size();
    js["total_words"] = stratum.total_word_count();
    strata_t.add({view.name, label, stratum.language_code, js["translation_kind"].get<std::string>(),
                  std::to_string(stratum.documents.size()), std::to_string(stratum.total_word_count())});

    auto lex_it = in.lexicons.find(stratum.language_code);
    if (lex_it == in.lexicons.end()) {
      jview["strata"][label] = std::move(js);
      continue;
    }
    auto ref_it = in.refs.find(stratum.language_code);
    const FrequencyTable* ref = ref_it == in.refs.end() ? nullptr : &ref_it->second;
    const auto stats = stratum_sentiment_stats(stratum, lex_it->second, ref, config.deviation_mode);
    const auto tpl = tokens_per_lemma(stratum, lex_it->second);
    for (const auto& [cls, s] : stats) {
      const std::string cname(to_string(cls));
      unique_t.add({view.name, label, cname, std::to_string(s.unique_lemma_count), std::to_string(s.token_count),
                    num(s.mean_tokens_per_lemma)});
      json jc = json::object();
      jc["unique_lemmas"] = s.unique_lemma_count;
      jc["tokens"] = s.token_count;
      jc["mean_tokens_per_lemma"] = jnum(s.mean_tokens_per_lemma);
      json hist = json::object();
      for (const auto& [tokens, lemmas] : tpl.at(cls).histogram) {
        hist_t.add({view.name, label, cname, std::to_string(tokens), std::to_string(lemmas)});
        hist[std::to_string(tokens)] = lemmas;
      }
      jc["tokens_histogram"] = std::move(hist);
      if (s.deviation) {
        const auto& d = *s.deviation;
        dev_t.add({view.name, label, cname, std::string(to_string(d.mode)), std::to_string(d.per_lemma.size()),
                   std::to_string(d.uncovered.size()), num(d.mean_deviation), num(d.median_deviation)});
        for (const auto& [lemma, ld] : d.per_lemma) {
          devl_t.add({view.name, label, cname, lemma, num(ld.observed_pct), num(ld.expected_pct), num(ld.deviation)});
        }
        for (const auto& lemma : d.uncovered) unc_t.add({view.name, label, cname, lemma});
        jc["deviation"] = {{"mode", std::string(to_string(d.mode))},
                           {"mean", jnum(d.mean_deviation)},
                           {"median", jnum(d.median_deviation)},
                           {"scored_lemmas", d.per_lemma.size()},
                           {"uncovered", d.uncovered}};
      }
      js["classes"][cname] = std::move(jc);
    }
    jview["strata"][label] = std::move(js);
  }
}

void analyze_field(const RunConfig& config, const Inputs& in, const View& view, Analysis& a, json& jview) {
  if (!in.concepts) return;
  auto& var_t = table(a, "variants.csv", "translation variants attested per concept (manifest strata)",
                      {"stratum", "concept_id", "class", "variant_count", "token_total", "variants_list"});
  auto& top_t = table(a, "top_k.csv", "highest-token concepts per sentiment list",
                      {"view", "stratum", "class", "rank", "concept_id", "token_total", "variant_count", "variants_list"});
  auto& width_t = table(a, "field_width.csv", "mean attested variants per concept against the source baseline",
                        {"view", "group", "stratum", "baseline", "mean_variants", "baseline_mean_variants",
                         "field_width_index", "excluded_concepts"});
  auto& cmp_t = table(a, "variant_comparison.csv",
                      "variants of the reference stratum's top concepts across text versions",
                      {"view", "group", "class", "rank", "concept_id", "stratum", "variant_count", "token_total"});

  std::vector<std::optional<std::vector<VariantProfile>>> profiles(view.strata.size());
  for (std::size_t i = 0; i < view.strata.size(); ++i) {
    const auto& stratum = view.strata[i];
    auto side = side_for(config, in, stratum.language_code);
    if (!side) continue;
    profiles[i] = variant_counts(stratum, *in.concepts, *side);
    const std::string label = stratum.label();
    json jp = json::array();
    for (const auto& p : *profiles[i]) {
      if (view.factor.empty()) {
        var_t.add({label, p.concept_id, std::string(to_string(p.cls)), std::to_string(p.variant_count),
                   std::to_string(p.token_total), join(p.attested_variants, ';')});
      }
      jp.push_back({{"concept_id", p.concept_id},
                    {"class", std::string(to_string(p.cls))},
                    {"variant_count", p.variant_count},
                    {"token_total", p.token_total},
                    {"variants", p.attested_variants}});
    }
    jview["strata"][label]["variants"] = std::move(jp);
    for (auto cls : kAllClasses) {
      std::vector<VariantProfile> of_class;
      for (const auto& p : *profiles[i]) {
        if (p.cls == cls) of_class.push_back(p);
      }
      if (of_class.empty()) continue;
      std::size_t rank = 0;
      for (const auto& p : top_k_concepts(of_class, config.top_k)) {
        top_t.add({view.name, label, std::string(to_string(cls)), std::to_string(++rank), p.concept_id,
                   std::to_string(p.token_total), std::to_string(p.variant_count), join(p.attested_variants, ';')});
      }
    }
  }

  // Pair every translated stratum with the source stratum of its group.
  std::map<std::string, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < view.strata.size(); ++i) by_group[view.groups[i]].push_back(i);
  for (const auto& [group, members] : by_group) {
    std::optional<std::size_t> baseline;
    for (auto i : members) {
      if (profiles[i] && view.strata[i].kind == TranslationKind::source &&
          view.strata[i].language_code == config.source_language)
        baseline = i;
    }
    for (auto i : members) {
      if (!profiles[i] || (baseline && i == *baseline) || view.strata[i].language_code != config.target_language)
        continue;
      const std::string label = view.strata[i].label();
      if (!baseline) {
        width_t.add({view.name, group, label, "", num(mean_variants_per_concept(*profiles[i])), "", "", ""});
        continue;
      }
      const std::string base_label = view.strata[*baseline].label();
      try {
        const auto report = field_width_report(label, *profiles[i], base_label, *profiles[*baseline]);
        std::string excluded;
        for (const auto& id : report.excluded_concepts) excluded += (excluded.empty() ? "" : ";") + id;
        width_t.add({view.name, group, label, base_label, num(report.mean_variants_per_concept),
                     num(mean_variants_per_concept(*profiles[*baseline])), num(report.width_ratio_vs_baseline),
                     excluded});
        jview["strata"][label]["field_width"] = {{"baseline", base_label},
                                                 {"index", report.width_ratio_vs_baseline},
                                                 {"mean_variants", report.mean_variants_per_concept},
                                                 {"excluded_concepts", report.excluded_concepts}};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::analysis) throw;
        width_t.add({view.name, group, label, base_label, num(mean_variants_per_concept(*profiles[i])), "0", "", ""});
      }
    }

    // Reference for the cross-version comparison: the machine stratum when
    // there is one, else the first translated stratum.
    std::optional<std::size_t> reference;
    for (auto i : members) {
      if (profiles[i] && view.strata[i].kind == TranslationKind::machine) reference = i;
    }
    if (!reference) {
      for (auto i : members) {
        if (profiles[i] && view.strata[i].kind != TranslationKind::source) {
          reference = i;
          break;
        }
      }
    }
    if (!reference) continue;
    for (auto cls : kAllClasses) {
      std::vector<VariantProfile> of_class;
      for (const auto& p : *profiles[*reference]) {
        if (p.cls == cls) of_class.push_back(p);
      }
      if (of_class.empty()) continue;
      std::size_t rank = 0;
      for (const auto& top : top_k_concepts(of_class, config.top_k)) {
        ++rank;
        for (auto i : members) {
          if (!profiles[i]) continue;
          const auto& match = *std::find_if(profiles[i]->begin(), profiles[i]->end(),
                                            [&](const VariantProfile& p) { return p.concept_id == top.concept_id; });
          cmp_t.add({view.name, group, std::string(to_string(cls)), std::to_string(rank), top.concept_id,
                     view.strata[i].label(), std::to_string(match.variant_count), std::to_string(match.token_total)});
        }
      }
    }
  }
}

void analyze_vectors(const RunConfig& config, const Inputs& in, const View& view, Analysis& a) {
  if (!in.concepts) return;
  std::vector<ConceptVector> vectors;
  for (const auto& stratum : view.strata) {
    auto side = side_for(config, in, stratum.language_code);
    if (!side || stratum.total_word_count() == 0) continue;
    vectors.push_back(concept_vector(stratum, *in.concepts, *side));
  }
  std::vector<std::string> header = {"stratum"};
  for (const auto& v : vectors) header.push_back(v.stratum_label);
  auto& cos_t = table(a, "similarity.csv", "cosine similarity of concept-space vectors (per 1,000 words)", header);
  auto& dist_t = table(a, "distance.csv", "Euclidean distance of concept-space vectors (per 1,000 words)", header);
  auto& pca_t = table(a, "pca.csv", "two-component PCA of concept-space vectors", {"label", "x", "y"});

  json jsim = json::object();
  for (const auto& u : vectors) {
    std::vector<std::string> cos_row = {u.stratum_label};
    std::vector<std::string> dist_row = {u.stratum_label};
    for (const auto& v : vectors) {
      try {
        const double c = cosine(u, v);
        cos_row.push_back(num(c));
        jsim["cosine"][u.stratum_label][v.stratum_label] = c;
      } catch (const Error&) {
        cos_row.push_back("NA");
        jsim["cosine"][u.stratum_label][v.stratum_label] = nullptr;
      }
      const double d = euclidean(u, v);
      dist_row.push_back(num(d));
      jsim["euclidean"][u.stratum_label][v.stratum_label] = d;
    }
    cos_t.add(std::move(cos_row));
    dist_t.add(std::move(dist_row));
  }
  a.summary["similarity"] = std::move(jsim);

  try {
    const PcaResult pca = pca_2d(vectors);
    pca_t.note(fmt::format("explained_variance: {},{}", num(pca.explained_first), num(pca.explained_second)));
    json jp = json::object();
    jp["explained_variance"] = {pca.explained_first, pca.explained_second};
    jp["converged"] = pca.converged;
    for (std::size_t i = 0; i < pca.coords.size(); ++i) {
      pca_t.add({pca.labels[i], num(pca.coords[i].x), num(pca.coords[i].y)});
      jp["coords"][pca.labels[i]] = {pca.coords[i].x, pca.coords[i].y};
    }
    a.summary["pca"] = std::move(jp);
  } catch (const Error& e) {
    pca_t.note(fmt::format("not computed: {}", e.what()));
    a.summary["pca"] = {{"error", e.what()}};
  }
}

enum class Metric { unique_lemmas, tokens_per_lemma };

std::string_view to_string(Metric m) { return m == Metric::unique_lemmas ? "unique_lemmas" : "tokens_per_lemma"; }

void analyze_tests(const RunConfig& config, const Inputs& in, Analysis& a) {
  auto& anova_t = table(a, "anova.csv", "one-way ANOVA per grouping factor, sentiment list, and metric",
                        {"factor", "partition", "class", "metric", "groups", "f_stat", "df_between", "df_within",
                         "p_value", "levene_f", "levene_p", "note"});
  auto& tukey_t = table(a, "tukey.csv", "Tukey HSD (Tukey-Kramer) pairwise comparisons",
                        {"factor", "partition", "class", "metric", "a", "b", "mean_diff", "q_stat", "p_adj",
                         "significant"});
  anova_t.note("unique_lemmas: one value per document; tokens_per_lemma: one value per attested lemma");
  json jtests = json::array();

  for (const auto& factor : config.grouping_factors) {
    std::map<std::string, std::vector<const CorpusStratum*>> partitions;
    const bool across = factor == "translation_kind" || factor == "language";
    for (const auto& s : in.strata) {
      if (!in.lexicons.contains(s.language_code) || !stratum_key(s, factor)) continue;
      const std::string part =
          across ? "all" : s.language_code + "/" + (s.kind ? std::string(to_string(*s.kind)) : "mixed");
      partitions[part].push_back(&s);
    }
    for (const auto& [part, members] : partitions) {
      for (auto cls : kAllClasses) {
        for (auto metric : {Metric::unique_lemmas, Metric::tokens_per_lemma}) {
          std::map<std::string, std::vector<double>> values;
          std::map<std::string, std::map<Lemma, std::size_t>> lemma_counts;
          for (const CorpusStratum* s : members) {
            const auto& lex = in.lexicons.at(s->language_code);
            const std::string value = *stratum_key(*s, factor);
            for (const auto& doc : s->documents) {
              if (metric == Metric::unique_lemmas) {
                values[value].push_back(static_cast<double>(unique_in_document(doc, lex, cls)));
              } else {
                for (const auto& lemma : doc.lemmas) {
                  if (lex.class_of(lemma) == cls) ++lemma_counts[value][lemma];
                }
              }
            }
          }
          for (const auto& [value, counts] : lemma_counts) {
            for (const auto& [lemma, n] : counts) values[value].push_back(static_cast<double>(n));
          }

          std::vector<GroupSample> groups;
          std::string note;
          for (const auto& [value, vals] : values) {
            if (vals.size() < 2) {
              note += fmt::format("{}group '{}' has fewer than 2 values and is dropped", note.empty() ? "" : "; ", value);
              continue;
            }
            groups.push_back(GroupSample{value, vals});
          }
          const std::string cname(to_string(cls));
          const std::string mname(to_string(metric));
          std::string group_names;
          for (const auto& g : groups) group_names += (group_names.empty() ? "" : ";") + g.label;
          json jt = {{"factor", factor}, {"partition", part}, {"class", cname}, {"metric", mname}};
          if (groups.size() < 2) {
            note += fmt::format("{}skipped: fewer than 2 groups", note.empty() ? "" : "; ");
            anova_t.add({factor, part, cname, mname, group_names, "", "", "", "", "", "", note});
            jt["skipped"] = note;
            jtests.push_back(std::move(jt));
            continue;
          }
          const AnovaResult r = one_way_anova(groups);
          if (r.warning) note += (note.empty() ? "" : "; ") + *r.warning;
          anova_t.add({factor, part, cname, mname, group_names, num(r.f_stat), std::to_string(r.df_between),
                       std::to_string(r.df_within), num(r.p_value), num(r.levene_f), num(r.levene_p), note});
          jt["anova"] = {{"f_stat", jnum(r.f_stat)},       {"df_between", r.df_between}, {"df_within", r.df_within},
                         {"p_value", r.p_value},           {"ss_between", r.ss_between}, {"ss_within", r.ss_within},
                         {"group_means", r.group_means},   {"levene_f", jnum(r.levene_f)},
                         {"levene_p", jnum(r.levene_p)},   {"note", note}};
          const TukeyResult t = tukey_hsd(groups, config.alpha);
          json jpairs = json::array();
          for (const auto& p : t.pairs) {
            tukey_t.add({factor, part, cname, mname, p.a, p.b, num(p.mean_diff), num(p.q_stat), num(p.p_adj),
                         p.significant ? "true" : "false"});
            jpairs.push_back({{"a", p.a},
                              {"b", p.b},
                              {"mean_diff", p.mean_diff},
                              {"q_stat", jnum(p.q_stat)},
                              {"p_adj", p.p_adj},
                              {"significant", p.significant}});
          }
          jt["tukey"] = std::move(jpairs);
          jtests.push_back(std::move(jt));
        }
      }
    }
  }
  a.summary["tests"] = std::move(jtests);
}

std::string priority_text(const ClassPriority& priority) {
  return fmt::format("{},{},{}", to_string(priority[0]), to_string(priority[1]), to_string(priority[2]));
}

}  // namespace

ReportBundle cmd_analyze(const RunConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(ErrorKind::validation, "alpha must be in (0, 1)");
  if (config.top_k == 0) throw Error(ErrorKind::validation, "top_k must be >= 1");
  const Inputs in = load_inputs(config);
  const auto views = build_views(config, in.strata);

  Analysis a;
  json jviews = json::object();
  for (const auto& view : views) {
    json jview = json::object();
    jview["factor"] = view.factor;
    jview["notes"] = view.notes;
    try {
      analyze_frequency(config, in, view, a, jview);
      analyze_field(config, in, view, a, jview);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("view {}: {}", view.name, e.what()));
    }
    jviews[view.name] = std::move(jview);
  }
  analyze_vectors(config, in, views.front(), a);
  analyze_tests(config, in, a);

  a.summary["views"] = std::move(jviews);
  a.summary["mode"] = {{"deviation", std::string(to_string(config.deviation_mode))},
                       {"priority", priority_text(config.priority)},
                       {"alpha", config.alpha},
                       {"top_k", config.top_k},
                       {"grouping_factors", config.grouping_factors},
                       {"vector_space", "concept frequency per 1,000 words"}};
  json jinputs = json::array();
  for (const auto& [path, digest] : in.checksums) jinputs.push_back({{"path", path}, {"sha256", digest}});
  a.summary["inputs"] = std::move(jinputs);
  a.summary["inputs_sha256"] = in.combined_checksum;
  json jlex = json::object();
  for (const auto& [lang, lex] : in.lexicons) {
    json jl = {{"attested", lex.attested()}, {"size", lex.size()}};
    for (auto cls : kAllClasses) jl["lists"][std::string(to_string(cls))] = lex.list(cls).size();
    json jc = json::array();
    for (const auto& c : lex.conflicts()) {
      std::vector<std::string> claimed;
      for (auto cl : c.claimed) claimed.emplace_back(to_string(cl));
      jc.push_back({{"lemma", c.lemma}, {"claimed", claimed}, {"resolved", std::string(to_string(c.resolved))}});
    }
    jl["conflicts"] = std::move(jc);
    jlex[lang] = std::move(jl);
  }
  a.summary["lexicons"] = std::move(jlex);

  const std::string preamble = fmt::format(
      "# mode: deviation={} priority={} alpha={} top_k={}\n# inputs_sha256: {}\n", to_string(config.deviation_mode),
      priority_text(config.priority), num(config.alpha), config.top_k, in.combined_checksum);
  ReportBundle bundle;
  for (const auto& [name, t] : a.tables) bundle.files[name] = t.render(name, preamble);
  Table inputs_t("SHA-256 of every input file", {"path", "sha256"});
  for (const auto& [path, digest] : in.checksums) inputs_t.add({path, digest});
  bundle.files["inputs.csv"] = inputs_t.render("inputs.csv", preamble);
  bundle.files["summary.json"] = a.summary.dump(2) + "\n";
  return bundle;
}

void write_bundle(const ReportBundle& bundle, const fs::path& dir) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
    for (const auto& [name, content] : bundle.files) {
      const fs::path path = dir / name;
      detail::write_file(path, content);
      written.push_back(path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    throw;
  }
}

// ---------------------------------------------------------------------------
// Synthetic corpora

namespace {

std::string wrap_words(const std::vector<Lemma>& lemmas) {
  std::string out;
  for (std::size_t i = 0; i < lemmas.size(); ++i) {
    out += lemmas[i];
    out += (i + 1) % 20 == 0 || i + 1 == lemmas.size() ? '\n' : ' ';
  }
  return out;
}

void write_stratum(const CorpusStratum& stratum, const fs::path& root, const std::string& subdir, Manifest& manifest) {
  for (const auto& doc : stratum.documents) {
    const fs::path path = root / subdir / (doc.id + ".txt");
    detail::write_file(path, wrap_words(doc.lemmas));
    manifest.entries.push_back(ManifestEntry{path, doc.id, stratum.language_code,
                                             stratum.kind.value_or(TranslationKind::source), stratum.group_keys});
  }
}

}  // namespace

fs::path cmd_synth(const RunConfig& config) {
  if (!config.concept_map_path) throw Error(ErrorKind::validation, "synth needs a concept map");
  auto src_cfg = config.lexicons.find(config.source_language);
  auto tgt_cfg = config.lexicons.find(config.target_language);
  if (src_cfg == config.lexicons.end() || tgt_cfg == config.lexicons.end())
    throw Error(ErrorKind::validation, "synth needs lexicons for the source and target languages");
  if (config.synth.target_words == 0) throw Error(ErrorKind::invalid_argument, "synth target_words must be > 0");

  std::vector<ChannelParams> channels = config.synth.channels;
  if (channels.empty()) {
    channels = {ChannelParams::machine_defaults(config.synth.seed + 1), ChannelParams::human_defaults(config.synth.seed + 2)};
  }
  std::set<TranslationKind> kinds;
  for (const auto& ch : channels) {
    ch.validate();
    if (!kinds.insert(ch.kind).second)
      throw Error(ErrorKind::invalid_argument, "synth allows at most one channel per translation kind");
  }

  const SentimentLexicon src_lex = build_lexicon(config.source_language, src_cfg->second, config.priority);
  const SentimentLexicon tgt_lex = build_lexicon(config.target_language, tgt_cfg->second, config.priority);
  const ConceptMap map = load_concept_map(*config.concept_map_path, src_lex, tgt_lex);
  std::optional<FrequencyTable> ref;
  if (auto it = config.frequency_tables.find(config.target_language); it != config.frequency_tables.end())
    ref = FrequencyTable::load(it->second, config.target_language);

  std::map<std::string, double> budget = config.synth.budget;
  if (budget.empty()) {
    for (const auto& [id, c] : map.concepts()) budget[id] = 1.0;
  }
  CorpusStratum source = generate_source(map, config.synth.target_words, budget, config.synth.seed, config.synth.source);
  source.group_keys = {{"corpus", "synthetic"}};

  std::vector<CorpusStratum> outputs;
  for (const auto& ch : channels) outputs.push_back(apply_channel(source, map, ch, ref ? &*ref : nullptr));

  Manifest manifest;
  write_stratum(source, config.output_dir, "source", manifest);
  for (const auto& out : outputs) write_stratum(out, config.output_dir, std::string(to_string(*out.kind)), manifest);
  const fs::path manifest_path = config.output_dir / "manifest.json";
  write_manifest(manifest, manifest_path);
  return manifest_path;
}

}  // namespace semfield
