#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace semfield {

/// Citation form of a word in one language.
using Lemma = std::string;

enum class TranslationKind { source, human, machine };

std::string_view to_string(TranslationKind kind);
std::optional<TranslationKind> parse_translation_kind(std::string_view text);

/// Inclusive code-point range counted as word characters.
struct CodePointRange {
  char32_t first;
  char32_t last;
};

struct LangProfile {
  std::string language_code;
  std::vector<CodePointRange> letter_classes;
  bool case_fold = true;

  bool is_letter(char32_t cp) const;
  /// Throws Error(validation) when the invariants do not hold.
  void validate() const;
};

/// Built-in profiles. "en" covers Latin letters, "ru" covers Cyrillic plus
/// Latin (Russian text routinely embeds Latin names).
LangProfile english_profile();
LangProfile russian_profile();

/// Returns the built-in profile for `language_code`, or nullopt.
std::optional<LangProfile> builtin_profile(std::string_view language_code);

/// Surface form to lemma lookup with identity fallback.
class LemmaDict {
 public:
  LemmaDict() = default;
  explicit LemmaDict(std::string language_code) : language_code_(std::move(language_code)) {}

  /// Reads `surface<TAB>lemma` lines; `#` starts a comment line. Surface
  /// forms are case-folded on insert so they match folded tokens.
  static LemmaDict load(const std::filesystem::path& path, std::string language_code);

  void insert(std::string_view surface, std::string_view lemma);
  const Lemma& lookup(const std::string& surface) const;

  const std::string& language_code() const { return language_code_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::string language_code_;
  std::map<std::string, Lemma, std::less<>> entries_;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Lemma> lemmas;
  std::size_t total_word_count = 0;
};

/// A sub-corpus sharing language, translation kind, and metadata keys.
///
/// `kind` is empty only for strata produced by `stratify` that merged
/// different translation kinds (for example a regroup by language).
struct CorpusStratum {
  std::string language_code;
  std::optional<TranslationKind> kind;
  std::map<std::string, std::string> group_keys;
  std::vector<Document> documents;

  std::size_t total_word_count() const;
  /// Human-readable identifier, e.g. "en/machine/author=Pushkin".
  std::string label() const;
};

/// UTF-8 text to case-folded surface forms. Every maximal run of letter
/// code points is one token; everything else separates. Invalid UTF-8
/// bytes are treated as separators.
std::vector<std::string> tokenize(std::string_view text, const LangProfile& profile);

std::vector<Lemma> lemmatize(std::span<const std::string> tokens, const LemmaDict& dict);

/// Lowercases `text` using the same folding as `tokenize`.
std::string case_fold(std::string_view text);

struct ManifestEntry {
  std::filesystem::path path;
  std::string id;
  std::string language;
  TranslationKind kind = TranslationKind::source;
  std::map<std::string, std::string> group_keys;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  /// language -> lemma dictionary path, optional.
  std::map<std::string, std::filesystem::path> lemma_dicts;
};

/// Parses a JSON manifest. Either a bare array of entries or an object
/// `{"documents": [...], "lemma_dicts": {"en": "en.tsv"}}`. Relative paths
/// resolve against the manifest's directory.
Manifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& manifest_path);

/// Reads, tokenizes, lemmatizes, and groups documents. Documents with equal
/// (language, kind, group_keys) land in the same stratum; strata keep the
/// order of first appearance in the manifest.
std::vector<CorpusStratum> load_corpus(const std::filesystem::path& manifest_path);

/// As above, with caller-supplied lemma dictionaries overriding any the
/// manifest names for the same language.
std::vector<CorpusStratum> load_corpus(const std::filesystem::path& manifest_path,
                                       const std::map<std::string, LemmaDict>& dicts);

/// Builds a document from already-lemmatized text (synthetic corpora).
Document make_document(std::string id, std::vector<Lemma> lemmas);

/// Merges strata sharing the value of `key`. `key` is a group_keys name, or
/// "language" / "translation_kind". Merging strata of different languages
/// is an error; group keys survive only where all merged strata agree.
std::map<std::string, CorpusStratum> stratify(std::span<const CorpusStratum> strata,
                                              const std::string& key);

/// Value of `key` for a stratum (group key, "language" or
/// "translation_kind"); nullopt when absent.
std::optional<std::string> stratum_key(const CorpusStratum& stratum, const std::string& key);

}  // namespace semfield
