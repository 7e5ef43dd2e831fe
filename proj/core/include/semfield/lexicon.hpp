#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semfield/corpus.hpp"

namespace semfield {

enum class SentimentClass { positive, negative, epistemic };

inline constexpr std::array<SentimentClass, 3> kAllClasses = {
    SentimentClass::positive, SentimentClass::negative, SentimentClass::epistemic};

std::string_view to_string(SentimentClass cls);
std::optional<SentimentClass> parse_sentiment_class(std::string_view text);

/// Conflict-resolution order; earlier classes win.
using ClassPriority = std::array<SentimentClass, 3>;

inline constexpr ClassPriority kDefaultPriority = {
    SentimentClass::epistemic, SentimentClass::negative, SentimentClass::positive};

/// Throws Error(invalid_argument) unless `priority` is a permutation.
void check_priority(const ClassPriority& priority);
ClassPriority parse_priority(std::span<const std::string> names);

/// One line of a lexicon source file.
struct RawLexiconEntry {
  Lemma lemma;
  SentimentClass cls;
  std::string source;  // file stem of the contributing dictionary
  std::size_t line = 0;
};

/// A lemma listed under more than one class, and where it ended up.
struct LexiconConflict {
  Lemma lemma;
  std::set<SentimentClass> claimed;
  SentimentClass resolved;
};

class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  explicit SentimentLexicon(std::string language_code) : language_code_(std::move(language_code)) {}

  const std::string& language_code() const { return language_code_; }
  const std::set<Lemma>& list(SentimentClass cls) const { return lists_[index(cls)]; }
  std::optional<SentimentClass> class_of(const Lemma& lemma) const;
  bool contains(const Lemma& lemma) const { return class_of(lemma).has_value(); }

  /// Source dictionaries that listed the lemma, under any class.
  const std::set<std::string>& provenance(const Lemma& lemma) const;
  const std::vector<LexiconConflict>& conflicts() const { return conflicts_; }

  bool attested() const { return attested_; }
  void set_attested(bool value) { attested_ = value; }

  std::size_t size() const;

 private:
  friend SentimentLexicon merge_disjoint(std::span<const RawLexiconEntry>, const ClassPriority&, std::string);

  static std::size_t index(SentimentClass cls) { return static_cast<std::size_t>(cls); }

  std::string language_code_;
  std::array<std::set<Lemma>, 3> lists_;
  std::map<Lemma, SentimentClass> class_index_;
  std::map<Lemma, std::set<std::string>> provenance_;
  std::vector<LexiconConflict> conflicts_;
  bool attested_ = false;
};

/// Reads `lemma<TAB>class` files. Duplicates, within or across files, are
/// all kept; `merge_disjoint` resolves them. Lemmas are case-folded so they
/// match tokenizer output.
std::vector<RawLexiconEntry> load_lexicon_sources(std::span<const std::filesystem::path> paths,
                                                  const std::string& language);

/// Assigns every lemma to exactly one class: the earliest in `priority`
/// among the classes that claim it. Output does not depend on entry order.
SentimentLexicon merge_disjoint(std::span<const RawLexiconEntry> raws,
                                const ClassPriority& priority = kDefaultPriority,
                                std::string language = {});

enum class MapSide { source, target };

std::string_view to_string(MapSide side);

struct Concept {
  std::string id;
  SentimentClass cls;
  std::set<Lemma> source_lemmas;
  std::set<Lemma> target_lemmas;

  const std::set<Lemma>& lemmas(MapSide side) const {
    return side == MapSide::source ? source_lemmas : target_lemmas;
  }
};

/// Bilingual synonym structure. Concepts are ordered by id.
class ConceptMap {
 public:
  ConceptMap() = default;
  ConceptMap(std::string source_language, std::string target_language)
      : source_language_(std::move(source_language)), target_language_(std::move(target_language)) {}

  /// Validates id uniqueness, non-empty sides, and that a lemma belongs to
  /// at most one concept per side.
  void add(Concept concept_entry);

  const std::map<std::string, Concept>& concepts() const { return concepts_; }
  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  const std::string& language(MapSide side) const {
    return side == MapSide::source ? source_language_ : target_language_;
  }
  /// Concept id owning `lemma` on `side`, if any.
  const Concept* owner(MapSide side, const Lemma& lemma) const;

 private:
  std::string source_language_;
  std::string target_language_;
  std::map<std::string, Concept> concepts_;
  std::map<Lemma, std::string> source_owner_;
  std::map<Lemma, std::string> target_owner_;
};

/// Reads `concept_id<TAB>class<TAB>src,src...<TAB>tgt,tgt...`. Every lemma
/// must be listed in its side's lexicon under the concept's class.
ConceptMap load_concept_map(const std::filesystem::path& path, const SentimentLexicon& source_lexicon,
                            const SentimentLexicon& target_lexicon);

}  // namespace semfield
