#include "semfield/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "semfield/error.hpp"
#include "text_io.hpp"
#include "utf8.hpp"

namespace semfield {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TranslationKind kind) {
  switch (kind) {
    case TranslationKind::source: return "source";
    case TranslationKind::human: return "human";
    case TranslationKind::machine: return "machine";
  }
  return "unknown";
}

std::optional<TranslationKind> parse_translation_kind(std::string_view text) {
  if (text == "source") return TranslationKind::source;
  if (text == "human") return TranslationKind::human;
  if (text == "machine") return TranslationKind::machine;
  return std::nullopt;
}

bool LangProfile::is_letter(char32_t cp) const {
  return std::any_of(letter_classes.begin(), letter_classes.end(),
                     [cp](const CodePointRange& r) { return cp >= r.first && cp <= r.last; });
}

void LangProfile::validate() const {
  if (language_code.empty()) throw Error(ErrorKind::validation, "language profile has empty language code");
  if (letter_classes.empty())
    throw Error(ErrorKind::validation, fmt::format("language profile '{}' has no letter classes", language_code));
  for (const auto& r : letter_classes) {
    if (r.first > r.last)
      throw Error(ErrorKind::validation, fmt::format("language profile '{}' has an inverted range", language_code));
  }
}

namespace {

const std::vector<CodePointRange> kLatinLetters = {
    {U'A', U'Z'}, {U'a', U'z'}, {0xC0, 0xD6}, {0xD8, 0xF6}, {0xF8, 0x24F},
};

}  // namespace

LangProfile english_profile() { return LangProfile{"en", kLatinLetters, true}; }

LangProfile russian_profile() {
  auto letters = kLatinLetters;
  letters.push_back({0x400, 0x481});
  letters.push_back({0x48A, 0x52F});
  return LangProfile{"ru", std::move(letters), true};
}

std::optional<LangProfile> builtin_profile(std::string_view language_code) {
  if (language_code == "en") return english_profile();
  if (language_code == "ru") return russian_profile();
  return std::nullopt;
}

std::string case_fold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = detail::decode_utf8(text, pos);
    if (cp == detail::kInvalidCodePoint) {
      out.append(text.substr(start, pos - start));
    } else {
      detail::append_utf8(out, detail::fold_case(cp));
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, const LangProfile& profile) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = detail::decode_utf8(text, pos);
    if (cp != detail::kInvalidCodePoint && profile.is_letter(cp)) {
      detail::append_utf8(current, profile.case_fold ? detail::fold_case(cp) : cp);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

LemmaDict LemmaDict::load(const fs::path& path, std::string language_code) {
  LemmaDict dict(std::move(language_code));
  const std::string content = detail::read_file(path);
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(content)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorKind::validation,
                  fmt::format("{}:{}: malformed lemma dictionary line", path.string(), line_no));
    }
    dict.insert(fields[0], fields[1]);
  }
  return dict;
}

void LemmaDict::insert(std::string_view surface, std::string_view lemma) {
  if (lemma.empty()) throw Error(ErrorKind::validation, fmt::format("empty lemma for surface form '{}'", surface));
  entries_.insert_or_assign(case_fold(surface), Lemma(lemma));
}

const Lemma& LemmaDict::lookup(const std::string& surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? surface : it->second;
}

std::vector<Lemma> lemmatize(std::span<const std::string> tokens, const LemmaDict& dict) {
  std::vector<Lemma> lemmas;
  lemmas.reserve(tokens.size());
  for (const auto& token : tokens) lemmas.push_back(dict.lookup(token));
  return lemmas;
}

std::size_t CorpusStratum::total_word_count() const {
  std::size_t total = 0;
  for (const auto& doc : documents) total += doc.total_word_count;
  return total;
}

std::string CorpusStratum::label() const {
  std::string out = language_code;
  out += '/';
  out += kind ? std::string(to_string(*kind)) : std::string("mixed");
  char sep = '/';
  for (const auto& [k, v] : group_keys) {
    out += sep;
    out += k;
    out += '=';
    out += v;
    sep = ',';
  }
  return out;
}

Document make_document(std::string id, std::vector<Lemma> lemmas) {
  Document doc;
  doc.id = std::move(id);
  for (std::size_t i = 0; i < lemmas.size(); ++i) {
    if (i > 0) doc.raw_text += ' ';
    doc.raw_text += lemmas[i];
  }
  doc.total_word_count = lemmas.size();
  doc.lemmas = std::move(lemmas);
  return doc;
}

namespace {

std::string require_string(const json& obj, const char* field, std::size_t index) {
  auto it = obj.find(field);
  if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorKind::validation,
                fmt::format("manifest entry {}: missing or non-string field '{}'", index, field));
  }
  return it->get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

Manifest read_manifest(const fs::path& manifest_path) {
  const std::string text = detail::read_file(manifest_path);
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, fmt::format("{}: invalid JSON: {}", manifest_path.string(), e.what()));
  }
  const fs::path base = manifest_path.parent_path();
  Manifest manifest;
  const json* docs = &root;
  if (root.is_object()) {
    auto it = root.find("documents");
    if (it == root.end() || !it->is_array())
      throw Error(ErrorKind::validation, fmt::format("{}: missing 'documents' array", manifest_path.string()));
    docs = &*it;
    if (auto dicts = root.find("lemma_dicts"); dicts != root.end()) {
      if (!dicts->is_object())
        throw Error(ErrorKind::validation, fmt::format("{}: 'lemma_dicts' must be an object", manifest_path.string()));
      for (const auto& [lang, p] : dicts->items()) {
        if (!p.is_string())
          throw Error(ErrorKind::validation, fmt::format("{}: lemma_dicts.{} must be a path", manifest_path.string(), lang));
        manifest.lemma_dicts[lang] = resolve(base, p.get<std::string>());
      }
    }
  } else if (!root.is_array()) {
    throw Error(ErrorKind::validation, fmt::format("{}: manifest must be an array or object", manifest_path.string()));
  }

  std::size_t index = 0;
  for (const auto& item : *docs) {
    if (!item.is_object())
      throw Error(ErrorKind::validation, fmt::format("manifest entry {}: not an object", index));
    ManifestEntry entry;
    entry.path = resolve(base, require_string(item, "path", index));
    entry.id = require_string(item, "id", index);
    entry.language = require_string(item, "language", index);
    const std::string kind = require_string(item, "translation_kind", index);
    auto parsed = parse_translation_kind(kind);
    if (!parsed)
      throw Error(ErrorKind::validation,
                  fmt::format("manifest entry {}: unknown translation_kind '{}'", index, kind));
    entry.kind = *parsed;
    if (auto keys = item.find("group_keys"); keys != item.end()) {
      if (!keys->is_object())
        throw Error(ErrorKind::validation, fmt::format("manifest entry {}: group_keys must be an object", index));
      for (const auto& [k, v] : keys->items()) {
        if (!v.is_string())
          throw Error(ErrorKind::validation,
                      fmt::format("manifest entry {}: group key '{}' must be a string", index, k));
        if (k == "language" || k == "translation_kind")
          throw Error(ErrorKind::validation,
                      fmt::format("manifest entry {}: group key '{}' is reserved", index, k));
        entry.group_keys[k] = v.get<std::string>();
      }
    }
    manifest.entries.push_back(std::move(entry));
    ++index;
  }
  return manifest;
}

void write_manifest(const Manifest& manifest, const fs::path& manifest_path) {
  const fs::path base = manifest_path.parent_path();
  const auto rel = [&](const fs::path& p) {
    auto r = p.lexically_relative(base.empty() ? fs::path(".") : base);
    return (r.empty() ? p : r).generic_string();
  };
  json root = json::object();
  json docs = json::array();
  for (const auto& e : manifest.entries) {
    json item = json::object();
    item["path"] = rel(e.path);
    item["id"] = e.id;
    item["language"] = e.language;
    item["translation_kind"] = std::string(to_string(e.kind));
    item["group_keys"] = e.group_keys;
    docs.push_back(std::move(item));
  }
  root["documents"] = std::move(docs);
  if (!manifest.lemma_dicts.empty()) {
    json dicts = json::object();
    for (const auto& [lang, p] : manifest.lemma_dicts) dicts[lang] = rel(p);
    root["lemma_dicts"] = std::move(dicts);
  }
  detail::write_file(manifest_path, root.dump(2) + "\n");
}

std::vector<CorpusStratum> load_corpus(const fs::path& manifest_path) {
  return load_corpus(manifest_path, {});
}

std::vector<CorpusStratum> load_corpus(const fs::path& manifest_path,
                                       const std::map<std::string, LemmaDict>& dicts) {
  const Manifest manifest = read_manifest(manifest_path);

  std::map<std::string, LemmaDict> active = dicts;
  for (const auto& [lang, path] : manifest.lemma_dicts) {
    if (!active.contains(lang)) active.emplace(lang, LemmaDict::load(path, lang));
  }

  std::set<std::string> seen_ids;
  std::vector<CorpusStratum> strata;
  for (const auto& entry : manifest.entries) {
    auto profile = builtin_profile(entry.language);
    if (!profile)
      throw Error(ErrorKind::validation,
                  fmt::format("document '{}': unknown language_code '{}'", entry.id, entry.language));
    if (!seen_ids.insert(entry.id).second)
      throw Error(ErrorKind::validation, fmt::format("duplicate document id '{}'", entry.id));

    Document doc;
    doc.id = entry.id;
    doc.raw_text = detail::read_file(entry.path);
    const auto tokens = tokenize(doc.raw_text, *profile);
    auto dict_it = active.find(entry.language);
    doc.lemmas = dict_it == active.end() ? tokens : lemmatize(tokens, dict_it->second);
    doc.total_word_count = doc.lemmas.size();

    auto it = std::find_if(strata.begin(), strata.end(), [&](const CorpusStratum& s) {
      return s.language_code == entry.language && s.kind == entry.kind && s.group_keys == entry.group_keys;
    });
    if (it == strata.end()) {
      strata.push_back(CorpusStratum{entry.language, entry.kind, entry.group_keys, {}});
      it = std::prev(strata.end());
    }
    it->documents.push_back(std::move(doc));
  }
  return strata;
}

std::optional<std::string> stratum_key(const CorpusStratum& stratum, const std::string& key) {
  if (key == "language") return stratum.language_code;
  if (key == "translation_kind") {
    if (!stratum.kind) return std::string("mixed");
    return std::string(to_string(*stratum.kind));
  }
  auto it = stratum.group_keys.find(key);
  if (it == stratum.group_keys.end()) return std::nullopt;
  return it->second;
}

std::map<std::string, CorpusStratum> stratify(std::span<const CorpusStratum> strata, const std::string& key) {
  std::map<std::string, CorpusStratum> merged;
  for (const auto& stratum : strata) {
    auto value = stratum_key(stratum, key);
    if (!value)
      throw Error(ErrorKind::validation,
                  fmt::format("grouping key '{}' absent from stratum {}", key, stratum.label()));
    auto [it, inserted] = merged.try_emplace(*value, stratum);
    if (inserted) continue;
    CorpusStratum& target = it->second;
    if (target.language_code != stratum.language_code)
      throw Error(ErrorKind::validation,
                  fmt::format("grouping by '{}' would merge languages {} and {}", key, target.language_code,
                              stratum.language_code));
    if (target.kind != stratum.kind) target.kind.reset();
    for (auto k = target.group_keys.begin(); k != target.group_keys.end();) {
      auto other = stratum.group_keys.find(k->first);
      if (other == stratum.group_keys.end() || other->second != k->second) {
        k = target.group_keys.erase(k);
      } else {
        ++k;
      }
    }
    target.documents.insert(target.documents.end(), stratum.documents.begin(), stratum.documents.end());
  }
  return merged;
}

}  // namespace semfield
