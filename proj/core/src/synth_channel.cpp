#include "semfield/synth_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "rng.hpp"
#include "semfield/error.hpp"

namespace semfield {

ChannelParams ChannelParams::machine_defaults(std::uint64_t seed) {
  return ChannelParams{TranslationKind::machine, 0.4, 0.0, 1.19, seed};
}

ChannelParams ChannelParams::human_defaults(std::uint64_t seed) {
  return ChannelParams{TranslationKind::human, 1.3, 0.0, 1.19, seed};
}

void ChannelParams::validate() const {
  if (kind == TranslationKind::source)
    throw Error(ErrorKind::invalid_argument, "channel kind must be machine or human");
  if (!(length_inflation > 0.0) || !std::isfinite(length_inflation))
    throw Error(ErrorKind::invalid_argument, "length_inflation must be > 0");
  if (!(narrow_widen_factor > 0.0) || !std::isfinite(narrow_widen_factor))
    throw Error(ErrorKind::invalid_argument, "narrow_widen_factor must be > 0");
  if (!(norm_pull >= 0.0 && norm_pull <= 1.0)) throw Error(ErrorKind::invalid_argument, "norm_pull must be in [0, 1]");
}

std::string filler_lemma(std::size_t index, MapSide side) {
  std::string out = side == MapSide::source ? "qzs" : "qzt";
  do {
    out.push_back(static_cast<char>('a' + index % 26));
    index /= 26;
  } while (index > 0);
  return out;
}

namespace {

std::vector<double> filler_cumulative(std::size_t vocabulary) {
  std::vector<double> weights(vocabulary);
  for (std::size_t r = 0; r < vocabulary; ++r) weights[r] = 1.0 / static_cast<double>(r + 1);
  return detail::prefix_sums(weights);
}

std::vector<Document> split_documents(const std::vector<Lemma>& tokens, const std::vector<std::size_t>& lengths,
                                      const std::vector<std::string>& ids) {
  std::vector<Document> docs;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    std::vector<Lemma> slice(tokens.begin() + static_cast<std::ptrdiff_t>(offset),
                             tokens.begin() + static_cast<std::ptrdiff_t>(offset + lengths[i]));
    offset += lengths[i];
    docs.push_back(make_document(ids[i], std::move(slice)));
  }
  return docs;
}

}  // namespace

CorpusStratum generate_source(const ConceptMap& map, std::size_t target_words,
                              const std::map<std::string, double>& concept_budget, std::uint64_t seed,
                              const SourceOptions& options) {
  if (map.empty()) throw Error(ErrorKind::invalid_argument, "generate_source: empty concept map");
  if (target_words == 0) throw Error(ErrorKind::invalid_argument, "generate_source: target_words must be > 0");
  if (options.words_per_document == 0 || options.filler_vocabulary == 0)
    throw Error(ErrorKind::invalid_argument, "generate_source: document size and filler vocabulary must be > 0");

  std::vector<const Concept*> concepts;
  std::vector<double> weights;
  double filler_weight = -1.0;
  for (const auto& [id, w] : concept_budget) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::invalid_argument, fmt::format("budget weight for '{}' must be finite and >= 0", id));
    if (id == kFillerBudgetKey) {
      filler_weight = w;
    } else if (!map.concepts().contains(id)) {
      throw Error(ErrorKind::invalid_argument, fmt::format("budget names unknown concept '{}'", id));
    }
  }
  double concept_weight = 0.0;
  for (const auto& [id, c] : map.concepts()) {
    auto it = concept_budget.find(id);
    concepts.push_back(&c);
    weights.push_back(it == concept_budget.end() ? 0.0 : it->second);
    concept_weight += weights.back();
  }
  if (concept_weight + std::max(filler_weight, 0.0) <= 0.0)
    throw Error(ErrorKind::invalid_argument, "generate_source: budget weights are all zero");

  double density = options.concept_density;
  if (filler_weight >= 0.0) density = concept_weight / (concept_weight + filler_weight);
  if (!(density >= 0.0 && density <= 1.0))
    throw Error(ErrorKind::invalid_argument, "generate_source: concept density must be in [0, 1]");
  const auto concept_tokens =
      concept_weight > 0.0 ? static_cast<std::size_t>(std::llround(density * static_cast<double>(target_words))) : 0;

  detail::Rng rng(seed);
  std::vector<Lemma> tokens;
  tokens.reserve(target_words);
  if (concept_tokens > 0) {
    const auto concept_cum = detail::prefix_sums(weights);
    std::vector<std::vector<double>> variant_cum;
    for (const Concept* c : concepts) {
      std::vector<double> w(c->source_lemmas.size());
      for (std::size_t r = 0; r < w.size(); ++r) w[r] = 1.0 / static_cast<double>(r + 1);
      variant_cum.push_back(detail::prefix_sums(w));
    }
    for (std::size_t i = 0; i < concept_tokens; ++i) {
      const std::size_t ci = rng.pick(concept_cum);
      const std::size_t vi = rng.pick(variant_cum[ci]);
      tokens.push_back(*std::next(concepts[ci]->source_lemmas.begin(), static_cast<std::ptrdiff_t>(vi)));
    }
  }
  const auto filler_cum = filler_cumulative(options.filler_vocabulary);
  while (tokens.size() < target_words) tokens.push_back(filler_lemma(rng.pick(filler_cum), MapSide::source));
  rng.shuffle(tokens);

  const std::size_t n_docs = (target_words + options.words_per_document - 1) / options.words_per_document;
  std::vector<std::size_t> lengths;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n_docs; ++i) {
    lengths.push_back(std::min(options.words_per_document, target_words - i * options.words_per_document));
    ids.push_back(fmt::format("synth-source-{:04d}", i + 1));
  }
  CorpusStratum stratum;
  stratum.language_code = map.language(MapSide::source);
  stratum.kind = TranslationKind::source;
  stratum.documents = split_documents(tokens, lengths, ids);
  return stratum;
}

namespace {

/// Target variants of a concept, most frequent first under the reference
/// table, ties broken by lemma.
std::vector<Lemma> rank_targets(const Concept& c, const FrequencyTable* ref) {
  std::vector<Lemma> ranked(c.target_lemmas.begin(), c.target_lemmas.end());
  if (ref) {
    std::stable_sort(ranked.begin(), ranked.end(), [&](const Lemma& a, const Lemma& b) {
      return ref->lookup(a).per_million > ref->lookup(b).per_million;
    });
  }
  return ranked;
}

/// Emission distribution over ranked target variants for one concept.
std::vector<double> variant_distribution(const std::vector<std::size_t>& source_counts_desc, std::size_t m,
                                         const ChannelParams& params, std::size_t& allowed) {
  const std::size_t v = source_counts_desc.size();
  const std::size_t v_eff = std::min(v, m);
  const double n_in = static_cast<double>(std::accumulate(source_counts_desc.begin(), source_counts_desc.end(),
                                                          std::size_t{0}));
  std::vector<double> p(m, 0.0);
  for (std::size_t r = 0; r < v; ++r) p[std::min(r, m - 1)] += static_cast<double>(source_counts_desc[r]) / n_in;

  const auto scaled = static_cast<std::size_t>(std::llround(params.narrow_widen_factor * static_cast<double>(v)));
  if (params.kind == TranslationKind::machine) {
    allowed = std::max<std::size_t>(1, std::min(v_eff, scaled));
    for (std::size_t r = allowed; r < m; ++r) {
      p[0] += p[r];
      p[r] = 0.0;
    }
    return p;
  }
  allowed = std::clamp<std::size_t>(scaled, 1, m);
  if (allowed <= v_eff) {
    double kept = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (r >= allowed) p[r] = 0.0;
      kept += p[r];
    }
    for (auto& x : p) x /= kept;
    return p;
  }
  const double lambda = static_cast<double>(allowed - v_eff) / static_cast<double>(allowed);
  for (std::size_t r = 0; r < m; ++r) {
    p[r] = (1.0 - lambda) * p[r] + (r < allowed ? lambda / static_cast<double>(allowed) : 0.0);
  }
  return p;
}

}  // namespace

CorpusStratum apply_channel(const CorpusStratum& source, const ConceptMap& map, const ChannelParams& params,
                            const FrequencyTable* target_ref) {
  params.validate();
  if (source.language_code != map.language(MapSide::source)) {
    throw Error(ErrorKind::invalid_argument, fmt::format("source stratum is '{}' but the concept map source is '{}'",
                                                         source.language_code, map.language(MapSide::source)));
  }
  if (params.norm_pull > 0.0 && !target_ref)
    throw Error(ErrorKind::invalid_argument, "norm_pull > 0 needs a target reference table");
  if (target_ref && target_ref->language_code() != map.language(MapSide::target)) {
    throw Error(ErrorKind::invalid_argument, fmt::format("reference table is '{}' but the concept map target is '{}'",
                                                         target_ref->language_code(), map.language(MapSide::target)));
  }

  const std::size_t n_in = source.total_word_count();
  const auto n_out = static_cast<std::size_t>(std::llround(static_cast<double>(n_in) * params.length_inflation));

  std::map<std::string, std::map<Lemma, std::size_t>> per_concept;
  for (const auto& doc : source.documents) {
    for (const auto& lemma : doc.lemmas) {
      if (const Concept* c = map.owner(MapSide::source, lemma)) ++per_concept[c->id][lemma];
    }
  }

  detail::Rng rng(params.seed);
  std::vector<Lemma> tokens;
  tokens.reserve(n_out);
  for (const auto& [id, c] : map.concepts()) {
    auto found = per_concept.find(id);
    if (found == per_concept.end()) continue;
    std::vector<std::pair<Lemma, std::size_t>> variants(found->second.begin(), found->second.end());
    std::stable_sort(variants.begin(), variants.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::size_t> counts;
    std::size_t concept_in = 0;
    for (const auto& [lemma, n] : variants) {
      counts.push_back(n);
      concept_in += n;
    }

    const auto ranked = rank_targets(c, target_ref);
    std::size_t allowed = 0;
    std::vector<double> dist = variant_distribution(counts, ranked.size(), params, allowed);
    double expected_tokens = static_cast<double>(concept_in) * params.length_inflation;
    if (params.norm_pull > 0.0) {
      std::vector<double> q(ranked.size(), 0.0);
      double ref_rate = 0.0;
      for (std::size_t r = 0; r < allowed; ++r) {
        q[r] = target_ref->lookup(ranked[r]).per_million;
        ref_rate += q[r];
      }
      if (ref_rate > 0.0) {
        for (auto& x : q) x /= ref_rate;
      } else {
        for (std::size_t r = 0; r < allowed; ++r) q[r] = 1.0 / static_cast<double>(allowed);
      }
      for (std::size_t r = 0; r < dist.size(); ++r)
        dist[r] = (1.0 - params.norm_pull) * dist[r] + params.norm_pull * q[r];
      const double ref_tokens = ref_rate / 1e6 * static_cast<double>(n_out);
      expected_tokens = (1.0 - params.norm_pull) * expected_tokens + params.norm_pull * ref_tokens;
    }
    const auto concept_out = static_cast<std::size_t>(std::llround(expected_tokens));
    const auto cum = detail::prefix_sums(dist);
    for (std::size_t i = 0; i < concept_out; ++i) tokens.push_back(ranked[rng.pick(cum)]);
  }
  if (tokens.size() > n_out) {
    throw Error(ErrorKind::analysis, fmt::format("channel emits {} concept tokens but the output holds only {} words",
                                                 tokens.size(), n_out));
  }
  const auto filler_cum = filler_cumulative(500);
  while (tokens.size() < n_out) tokens.push_back(filler_lemma(rng.pick(filler_cum), MapSide::target));
  rng.shuffle(tokens);

  // Output documents mirror the source documents, scaled by the inflation.
  std::vector<std::size_t> lengths;
  std::vector<std::string> ids;
  std::size_t cum_in = 0;
  std::size_t cum_out = 0;
  for (const auto& doc : source.documents) {
    cum_in += doc.total_word_count;
    const std::size_t end =
        n_in == 0 ? 0 : static_cast<std::size_t>(std::llround(static_cast<double>(cum_in) * static_cast<double>(n_out) /
                                                              static_cast<double>(n_in)));
    lengths.push_back(end - cum_out);
    cum_out = end;
    ids.push_back(fmt::format("{}-{}", doc.id, to_string(params.kind)));
  }
  if (!lengths.empty()) lengths.back() += n_out - cum_out;

  CorpusStratum out;
  out.language_code = map.language(MapSide::target);
  out.kind = params.kind;
  out.group_keys = source.group_keys;
  out.documents = split_documents(tokens, lengths, ids);
  return out;
}

}  // namespace semfield
