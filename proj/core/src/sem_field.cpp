#include "semfield/sem_field.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "semfield/error.hpp"
#include "semfield/freq_stats.hpp"

namespace semfield {

std::vector<VariantProfile> variant_counts(const CorpusStratum& stratum, const ConceptMap& map, MapSide side) {
  if (stratum.language_code != map.language(side)) {
    throw Error(ErrorKind::invalid_argument,
                fmt::format("stratum {} is '{}' but the concept map's {} side is '{}'", stratum.label(),
                            stratum.language_code, to_string(side), map.language(side)));
  }
  std::map<std::string, VariantProfile> by_id;
  for (const auto& [id, c] : map.concepts()) by_id[id] = VariantProfile{id, c.cls, {}, 0, 0};
  for (const auto& [lemma, count] : count_lemmas(stratum)) {
    const Concept* owner = map.owner(side, lemma);
    if (!owner) continue;
    auto& p = by_id[owner->id];
    p.attested_variants.insert(lemma);
    p.token_total += count;
  }
  std::vector<VariantProfile> out;
  out.reserve(by_id.size());
  for (auto& [id, p] : by_id) {
    p.variant_count = p.attested_variants.size();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<VariantProfile> top_k_concepts(std::vector<VariantProfile> profiles, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::invalid_argument, "top_k_concepts: k must be >= 1");
  std::sort(profiles.begin(), profiles.end(), [](const VariantProfile& a, const VariantProfile& b) {
    if (a.token_total != b.token_total) return a.token_total > b.token_total;
    return a.concept_id < b.concept_id;
  });
  if (profiles.size() > k) profiles.resize(k);
  return profiles;
}

double mean_variants_per_concept(const std::vector<VariantProfile>& profiles) {
  if (profiles.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : profiles) sum += static_cast<double>(p.variant_count);
  return sum / static_cast<double>(profiles.size());
}

namespace {

std::map<std::string, const VariantProfile*> index_by_id(const std::vector<VariantProfile>& profiles) {
  std::map<std::string, const VariantProfile*> out;
  for (const auto& p : profiles) out[p.concept_id] = &p;
  return out;
}

}  // namespace

double field_width_index(const std::vector<VariantProfile>& test, const std::vector<VariantProfile>& baseline) {
  const auto test_ids = index_by_id(test);
  const auto base_ids = index_by_id(baseline);
  if (test_ids.size() != base_ids.size() ||
      !std::equal(test_ids.begin(), test_ids.end(), base_ids.begin(),
                  [](const auto& a, const auto& b) { return a.first == b.first; })) {
    throw Error(ErrorKind::invalid_argument, "field_width_index: profiles come from different concept maps");
  }
  std::size_t test_sum = 0;
  std::size_t base_sum = 0;
  for (const auto& [id, base] : base_ids) {
    if (base->variant_count == 0) continue;
    base_sum += base->variant_count;
    test_sum += test_ids.at(id)->variant_count;
  }
  if (base_sum == 0) throw Error(ErrorKind::analysis, "empty baseline field");
  // Both means share the same denominator, which cancels.
  return static_cast<double>(test_sum) / static_cast<double>(base_sum);
}

FieldWidthReport field_width_report(std::string stratum_label, const std::vector<VariantProfile>& test,
                                    std::string baseline_label, const std::vector<VariantProfile>& baseline) {
  FieldWidthReport report;
  report.stratum_label = std::move(stratum_label);
  report.baseline_label = std::move(baseline_label);
  report.mean_variants_per_concept = mean_variants_per_concept(test);
  report.concepts_ranked = top_k_concepts(test, std::max<std::size_t>(test.size(), 1));
  report.width_ratio_vs_baseline = field_width_index(test, baseline);
  for (const auto& p : baseline) {
    if (p.variant_count == 0) report.excluded_concepts.push_back(p.concept_id);
  }
  return report;
}

}  // namespace semfield
