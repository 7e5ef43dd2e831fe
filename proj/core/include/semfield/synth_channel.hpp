#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "semfield/corpus.hpp"
#include "semfield/freq_stats.hpp"
#include "semfield/lexicon.hpp"

namespace semfield {

/// Synthetic translation channel.
///
/// Each source concept token is re-emitted as one of the concept's target
/// lemmas. `narrow_widen_factor` scales the number of distinct variants:
/// the machine kind keeps only the top-ranked variants and folds the rest
/// onto the most frequent one (never more variants than the source
/// attests); the human kind spreads mass over extra variants, up to the
/// concept's size. `norm_pull` interpolates both concept totals and
/// per-lemma rates toward the target reference table.
struct ChannelParams {
  TranslationKind kind = TranslationKind::machine;
  double narrow_widen_factor = 0.4;
  double norm_pull = 0.0;
  double length_inflation = 1.19;
  std::uint64_t seed = 1;

  static ChannelParams machine_defaults(std::uint64_t seed = 1);
  static ChannelParams human_defaults(std::uint64_t seed = 1);

  /// Throws Error(invalid_argument) outside the documented domain.
  void validate() const;
};

/// Reserved concept-budget key weighting filler words against concepts.
inline constexpr const char* kFillerBudgetKey = "_filler";

struct SourceOptions {
  /// Fraction of words that are concept tokens, unless the budget carries
  /// a kFillerBudgetKey weight.
  double concept_density = 0.05;
  std::size_t words_per_document = 1000;
  std::size_t filler_vocabulary = 500;
};

/// Samples a source-language stratum of exactly `target_words` lemmas.
/// Concepts are chosen by budget weight (ids absent from the budget get
/// weight 0); within a concept, source variants follow 1/rank weights.
/// Deterministic for a given seed on every platform.
CorpusStratum generate_source(const ConceptMap& map, std::size_t target_words,
                              const std::map<std::string, double>& concept_budget, std::uint64_t seed,
                              const SourceOptions& options = {});

/// Translates `source` through the channel. `target_ref` ranks target
/// variants (most frequent first) and is required when norm_pull > 0.
CorpusStratum apply_channel(const CorpusStratum& source, const ConceptMap& map, const ChannelParams& params,
                            const FrequencyTable* target_ref = nullptr);

/// Filler lemma `index` for the given side; letters only, so it survives a
/// write-then-tokenize round trip.
std::string filler_lemma(std::size_t index, MapSide side);

}  // namespace semfield
