#include "semfield/freq_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "semfield/error.hpp"
#include "text_io.hpp"

namespace semfield {

FrequencyTable FrequencyTable::load(const std::filesystem::path& path, std::string language_code) {
  FrequencyTable table(std::move(language_code), path.stem().string());
  const std::string content = detail::read_file(path);
  std::size_t line_no = 0;
  for (const auto& line : detail::split_lines(content)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.starts_with('#')) {
      auto body = detail::trim(trimmed.substr(1));
      if (body.starts_with("corpus:")) table.corpus_name_ = std::string(detail::trim(body.substr(7)));
      continue;
    }
    if (trimmed.empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 2 || detail::trim(fields[0]).empty())
      throw Error(ErrorKind::validation, fmt::format("{}:{}: malformed frequency line", path.string(), line_no));
    const std::string number(detail::trim(fields[1]));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(number, &used);
      if (used != number.size()) throw std::invalid_argument(number);
    } catch (const std::exception&) {
      throw Error(ErrorKind::validation,
                  fmt::format("{}:{}: frequency '{}' is not a number", path.string(), line_no, number));
    }
    try {
      table.set(case_fold(detail::trim(fields[0])), value);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}:{}: {}", path.string(), line_no, e.what()));
    }
  }
  return table;
}

void FrequencyTable::set(const Lemma& lemma, double per_million) {
  if (!std::isfinite(per_million) || per_million < 0.0)
    throw Error(ErrorKind::validation, fmt::format("frequency for '{}' must be finite and >= 0", lemma));
  freqs_[lemma] = per_million;
}

FrequencyTable::Lookup FrequencyTable::lookup(const Lemma& lemma) const {
  auto it = freqs_.find(lemma);
  if (it == freqs_.end()) return {0.0, false};
  return {it->second, true};
}

std::string_view to_string(DeviationMode mode) {
  return mode == DeviationMode::difference ? "difference" : "ratio";
}

std::optional<DeviationMode> parse_deviation_mode(std::string_view text) {
  if (text == "difference") return DeviationMode::difference;
  if (text == "ratio") return DeviationMode::ratio;
  return std::nullopt;
}

LemmaCounts count_lemmas(const CorpusStratum& stratum) {
  LemmaCounts counts;
  for (const auto& doc : stratum.documents)
    for (const auto& lemma : doc.lemmas) ++counts[lemma];
  return counts;
}

namespace {

void require_language(const CorpusStratum& stratum, const std::string& language, const char* what) {
  if (stratum.language_code != language) {
    throw Error(ErrorKind::invalid_argument, fmt::format("stratum {} is '{}' but the {} is '{}'", stratum.label(),
                                                         stratum.language_code, what, language));
  }
}

double percent(std::size_t count, std::size_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

DeviationSummary summarize_deviation(const std::set<Lemma>& list, const LemmaCounts& counts, std::size_t total,
                                     const FrequencyTable& ref, DeviationMode mode) {
  DeviationSummary summary;
  summary.mode = mode;
  std::vector<double> values;
  for (const auto& lemma : list) {
    auto it = counts.find(lemma);
    if (it == counts.end()) continue;
    const auto hit = ref.lookup(lemma);
    const double expected = hit.per_million * kPerMillionToPercent;
    if (!hit.covered || (mode == DeviationMode::ratio && expected == 0.0)) {
      summary.uncovered.push_back(lemma);
      continue;
    }
    LemmaDeviation d;
    d.observed_pct = percent(it->second, total);
    d.expected_pct = expected;
    d.deviation = mode == DeviationMode::difference ? d.observed_pct - expected : d.observed_pct / expected;
    values.push_back(d.deviation);
    summary.per_lemma.emplace(lemma, d);
  }
  if (!values.empty()) {
    summary.mean_deviation = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    summary.median_deviation = median(std::move(values));
  }
  return summary;
}

}  // namespace

std::map<SentimentClass, std::size_t> unique_lemma_counts(const CorpusStratum& stratum,
                                                          const SentimentLexicon& lexicon) {
  require_language(stratum, lexicon.language_code(), "lexicon");
  std::map<SentimentClass, std::size_t> out;
  for (auto cls : kAllClasses) out[cls] = 0;
  for (const auto& [lemma, count] : count_lemmas(stratum)) {
    if (auto cls = lexicon.class_of(lemma)) ++out[*cls];
  }
  return out;
}

double observed_frequency(const CorpusStratum& stratum, const Lemma& lemma) {
  const std::size_t total = stratum.total_word_count();
  if (total == 0) throw Error(ErrorKind::analysis, "empty stratum");
  std::size_t count = 0;
  for (const auto& doc : stratum.documents) count += static_cast<std::size_t>(std::count(doc.lemmas.begin(), doc.lemmas.end(), lemma));
  return percent(count, total);
}

std::map<Lemma, double> observed_frequencies(const CorpusStratum& stratum) {
  const std::size_t total = stratum.total_word_count();
  if (total == 0) throw Error(ErrorKind::analysis, "empty stratum");
  std::map<Lemma, double> out;
  for (const auto& [lemma, count] : count_lemmas(stratum)) out.emplace(lemma, percent(count, total));
  return out;
}

std::map<SentimentClass, DeviationSummary> expected_deviation(const CorpusStratum& stratum,
                                                              const SentimentLexicon& lexicon,
                                                              const FrequencyTable& ref, DeviationMode mode) {
  require_language(stratum, lexicon.language_code(), "lexicon");
  require_language(stratum, ref.language_code(), "reference table");
  const std::size_t total = stratum.total_word_count();
  if (total == 0) throw Error(ErrorKind::analysis, "empty stratum");
  const LemmaCounts counts = count_lemmas(stratum);
  std::map<SentimentClass, DeviationSummary> out;
  for (auto cls : kAllClasses) out[cls] = summarize_deviation(lexicon.list(cls), counts, total, ref, mode);
  return out;
}

std::map<SentimentClass, TokensPerLemma> tokens_per_lemma(const CorpusStratum& stratum,
                                                          const SentimentLexicon& lexicon) {
  require_language(stratum, lexicon.language_code(), "lexicon");
  std::map<SentimentClass, TokensPerLemma> out;
  for (auto cls : kAllClasses) out[cls] = {};
  for (const auto& [lemma, count] : count_lemmas(stratum)) {
    auto cls = lexicon.class_of(lemma);
    if (!cls) continue;
    auto& t = out[*cls];
    ++t.unique_lemmas;
    t.tokens += count;
    ++t.histogram[count];
  }
  for (auto& [cls, t] : out) {
    if (t.unique_lemmas > 0) t.mean = static_cast<double>(t.tokens) / static_cast<double>(t.unique_lemmas);
  }
  return out;
}

std::map<SentimentClass, ClassStats> stratum_sentiment_stats(const CorpusStratum& stratum,
                                                             const SentimentLexicon& lexicon,
                                                             const FrequencyTable* ref, DeviationMode mode) {
  require_language(stratum, lexicon.language_code(), "lexicon");
  if (ref) require_language(stratum, ref->language_code(), "reference table");
  const std::size_t total = stratum.total_word_count();
  const LemmaCounts counts = count_lemmas(stratum);
  std::map<SentimentClass, ClassStats> out;
  for (auto cls : kAllClasses) out[cls] = {};
  for (const auto& [lemma, count] : counts) {
    auto cls = lexicon.class_of(lemma);
    if (!cls) continue;
    auto& s = out[*cls];
    ++s.unique_lemma_count;
    s.token_count += count;
    s.observed_freq_pct.emplace(lemma, percent(count, total));
  }
  for (auto cls : kAllClasses) {
    auto& s = out[cls];
    if (s.unique_lemma_count > 0)
      s.mean_tokens_per_lemma = static_cast<double>(s.token_count) / static_cast<double>(s.unique_lemma_count);
    if (ref && total > 0) s.deviation = summarize_deviation(lexicon.list(cls), counts, total, *ref, mode);
  }
  return out;
}

}  // namespace semfield
