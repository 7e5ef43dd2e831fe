#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "semfield/corpus.hpp"
#include "semfield/lexicon.hpp"

namespace semfield {

/// Which of a concept's synonyms one stratum actually uses.
struct VariantProfile {
  std::string concept_id;
  SentimentClass cls = SentimentClass::positive;
  std::set<Lemma> attested_variants;
  std::size_t variant_count = 0;
  std::size_t token_total = 0;
};

/// One profile per concept, in concept-id order. Unattested concepts are
/// included with an empty variant set.
std::vector<VariantProfile> variant_counts(const CorpusStratum& stratum, const ConceptMap& map, MapSide side);

/// Sorted by token_total descending, then concept_id ascending; first k.
std::vector<VariantProfile> top_k_concepts(std::vector<VariantProfile> profiles, std::size_t k);

/// Mean attested variants per concept in `test` over the mean in
/// `baseline`, restricted to concepts the baseline attests. Below 1 the
/// field narrowed, above 1 it widened.
double field_width_index(const std::vector<VariantProfile>& test, const std::vector<VariantProfile>& baseline);

double mean_variants_per_concept(const std::vector<VariantProfile>& profiles);

struct FieldWidthReport {
  std::string stratum_label;
  std::string baseline_label;
  double mean_variants_per_concept = 0.0;
  std::vector<VariantProfile> concepts_ranked;
  double width_ratio_vs_baseline = 0.0;
  /// Concepts the baseline never attests; excluded from the ratio.
  std::vector<std::string> excluded_concepts;
};

FieldWidthReport field_width_report(std::string stratum_label, const std::vector<VariantProfile>& test,
                                    std::string baseline_label, const std::vector<VariantProfile>& baseline);

}  // namespace semfield
