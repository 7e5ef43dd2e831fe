#include "semfield/lexicon.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "semfield/error.hpp"
#include "text_io.hpp"

namespace semfield {

std::string_view to_string(SentimentClass cls) {
  switch (cls) {
    case SentimentClass::positive: return "positive";
    case SentimentClass::negative: return "negative";
    case SentimentClass::epistemic: return "epistemic";
  }
  return "unknown";
}

std::optional<SentimentClass> parse_sentiment_class(std::string_view text) {
  if (text == "positive") return SentimentClass::positive;
  if (text == "negative") return SentimentClass::negative;
  if (text == "epistemic") return SentimentClass::epistemic;
  return std::nullopt;
}

std::string_view to_string(MapSide side) { return side == MapSide::source ? "source" : "target"; }

void check_priority(const ClassPriority& priority) {
  std::set<SentimentClass> seen(priority.begin(), priority.end());
  if (seen.size() != priority.size())
    throw Error(ErrorKind::invalid_argument, "class priority must list each sentiment class exactly once");
}

ClassPriority parse_priority(std::span<const std::string> names) {
  if (names.size() != 3)
    throw Error(ErrorKind::invalid_argument, "class priority must list exactly three classes");
  ClassPriority out{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto cls = parse_sentiment_class(names[i]);
    if (!cls) throw Error(ErrorKind::invalid_argument, fmt::format("unknown class '{}' in priority", names[i]));
    out[i] = *cls;
  }
  check_priority(out);
  return out;
}

std::optional<SentimentClass> SentimentLexicon::class_of(const Lemma& lemma) const {
  auto it = class_index_.find(lemma);
  if (it == class_index_.end()) return std::nullopt;
  return it->second;
}

const std::set<std::string>& SentimentLexicon::provenance(const Lemma& lemma) const {
  static const std::set<std::string> kNone;
  auto it = provenance_.find(lemma);
  return it == provenance_.end() ? kNone : it->second;
}

std::size_t SentimentLexicon::size() const { return class_index_.size(); }

std::vector<RawLexiconEntry> load_lexicon_sources(std::span<const std::filesystem::path> paths,
                                                  const std::string& language) {
  (void)language;  // lexicon files carry no language tag; the caller owns it
  std::vector<RawLexiconEntry> entries;
  for (const auto& path : paths) {
    const std::string content = detail::read_file(path);
    const std::string source = path.stem().string();
    std::size_t line_no = 0;
    for (const auto& line : detail::split_lines(content)) {
      ++line_no;
      if (detail::is_blank_or_comment(line)) continue;
      const auto fields = detail::split(line, '\t');
      if (fields.size() != 2 || detail::trim(fields[0]).empty()) {
        throw Error(ErrorKind::validation, fmt::format("{}: malformed line at line {}", path.string(), line_no));
      }
      const auto label = detail::trim(fields[1]);
      auto cls = parse_sentiment_class(label);
      if (!cls) {
        throw Error(ErrorKind::validation,
                    fmt::format("{}: unknown class '{}' at line {}", path.string(), label, line_no));
      }
      entries.push_back(RawLexiconEntry{case_fold(detail::trim(fields[0])), *cls, source, line_no});
    }
  }
  return entries;
}

SentimentLexicon merge_disjoint(std::span<const RawLexiconEntry> raws, const ClassPriority& priority,
                                std::string language) {
  check_priority(priority);
  SentimentLexicon lexicon(std::move(language));

  std::map<Lemma, std::set<SentimentClass>> claims;
  for (const auto& raw : raws) {
    claims[raw.lemma].insert(raw.cls);
    lexicon.provenance_[raw.lemma].insert(raw.source);
  }
  for (const auto& [lemma, classes] : claims) {
    const auto winner = *std::find_if(priority.begin(), priority.end(),
                                      [&](SentimentClass c) { return classes.contains(c); });
    lexicon.lists_[SentimentLexicon::index(winner)].insert(lemma);
    lexicon.class_index_.emplace(lemma, winner);
    if (classes.size() > 1) lexicon.conflicts_.push_back(LexiconConflict{lemma, classes, winner});
  }
  return lexicon;
}

void ConceptMap::add(Concept concept_entry) {
  if (concept_entry.id.empty()) throw Error(ErrorKind::validation, "concept with empty id");
  if (concepts_.contains(concept_entry.id))
    throw Error(ErrorKind::validation, fmt::format("duplicate concept id '{}'", concept_entry.id));
  for (MapSide side : {MapSide::source, MapSide::target}) {
    if (concept_entry.lemmas(side).empty())
      throw Error(ErrorKind::validation,
                  fmt::format("concept '{}' has no {} lemmas", concept_entry.id, to_string(side)));
    auto& owners = side == MapSide::source ? source_owner_ : target_owner_;
    for (const auto& lemma : concept_entry.lemmas(side)) {
      if (auto it = owners.find(lemma); it != owners.end()) {
        throw Error(ErrorKind::validation,
                    fmt::format("{} lemma '{}' appears in concepts '{}' and '{}'", to_string(side), lemma,
                                it->second, concept_entry.id));
      }
    }
  }
  for (const auto& lemma : concept_entry.source_lemmas) source_owner_.emplace(lemma, concept_entry.id);
  for (const auto& lemma : concept_entry.target_lemmas) target_owner_.emplace(lemma, concept_entry.id);
  std::string id = concept_entry.id;
  concepts_.emplace(std::move(id), std::move(concept_entry));
}

const Concept* ConceptMap::owner(MapSide side, const Lemma& lemma) const {
  const auto& owners = side == MapSide::source ? source_owner_ : target_owner_;
  auto it = owners.find(lemma);
  return it == owners.end() ? nullptr : &concepts_.at(it->second);
}

namespace {

std::set<Lemma> parse_lemma_list(std::string_view field) {
  std::set<Lemma> out;
  for (auto part : detail::split(field, ',')) {
    part = detail::trim(part);
    if (!part.empty()) out.insert(case_fold(part));
  }
  return out;
}

void check_side(const Concept& c, MapSide side, const SentimentLexicon& lexicon, const std::string& where) {
  for (const auto& lemma : c.lemmas(side)) {
    auto cls = lexicon.class_of(lemma);
    if (!cls) {
      throw Error(ErrorKind::validation, fmt::format("{}: concept '{}': {} lemma '{}' absent from {} lexicon", where,
                                                     c.id, to_string(side), lemma, lexicon.language_code()));
    }
    if (*cls != c.cls) {
      throw Error(ErrorKind::validation,
                  fmt::format("{}: concept '{}' is {} but {} lemma '{}' is {} in the lexicon", where, c.id,
                              to_string(c.cls), to_string(side), lemma, to_string(*cls)));
    }
  }
}

}  // namespace

ConceptMap load_concept_map(const std::filesystem::path& path, const SentimentLexicon& source_lexicon,
                            const SentimentLexicon& target_lexicon) {
  ConceptMap map(source_lexicon.language_code(), target_lexicon.language_code());
  const std::string content = detail::read_file(path);
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(content)) {
    ++line_no;
    if (detail::is_blank_or_comment(line)) continue;
    const std::string where = fmt::format("{}:{}", path.string(), line_no);
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 4) throw Error(ErrorKind::validation, fmt::format("{}: expected 4 tab-separated fields", where));
    auto cls = parse_sentiment_class(detail::trim(fields[1]));
    if (!cls)
      throw Error(ErrorKind::validation, fmt::format("{}: unknown class '{}'", where, detail::trim(fields[1])));
    Concept c{std::string(detail::trim(fields[0])), *cls, parse_lemma_list(fields[2]), parse_lemma_list(fields[3])};
    check_side(c, MapSide::source, source_lexicon, where);
    check_side(c, MapSide::target, target_lexicon, where);
    try {
      map.add(std::move(c));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}: {}", where, e.what()));
    }
  }
  return map;
}

}  // namespace semfield
