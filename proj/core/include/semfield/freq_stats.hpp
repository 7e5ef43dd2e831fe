#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semfield/corpus.hpp"
#include "semfield/lexicon.hpp"

namespace semfield {

/// Per-million reference frequencies from a general-purpose corpus.
class FrequencyTable {
 public:
  struct Lookup {
    double per_million = 0.0;
    bool covered = false;
  };

  FrequencyTable() = default;
  FrequencyTable(std::string language_code, std::string corpus_name)
      : language_code_(std::move(language_code)), corpus_name_(std::move(corpus_name)) {}

  /// Reads `lemma<TAB>per_million` lines. A comment line of the form
  /// `# corpus: NAME` sets the corpus name.
  static FrequencyTable load(const std::filesystem::path& path, std::string language_code);

  void set(const Lemma& lemma, double per_million);
  /// Absent lemmas come back as {0, covered=false}.
  Lookup lookup(const Lemma& lemma) const;

  const std::string& language_code() const { return language_code_; }
  const std::string& corpus_name() const { return corpus_name_; }
  const std::map<Lemma, double>& entries() const { return freqs_; }

 private:
  std::string language_code_;
  std::string corpus_name_;
  std::map<Lemma, double> freqs_;
};

/// Percent units per per-million unit.
inline constexpr double kPerMillionToPercent = 1.0 / 10'000.0;

using LemmaCounts = std::map<Lemma, std::size_t>;

LemmaCounts count_lemmas(const CorpusStratum& stratum);

std::map<SentimentClass, std::size_t> unique_lemma_counts(const CorpusStratum& stratum,
                                                          const SentimentLexicon& lexicon);

/// 100 * count(lemma) / total words. Throws on an empty stratum.
double observed_frequency(const CorpusStratum& stratum, const Lemma& lemma);
/// Observed frequency of every lemma in the stratum.
std::map<Lemma, double> observed_frequencies(const CorpusStratum& stratum);

enum class DeviationMode {
  difference,  // observed% - expected%
  ratio,       // observed% / expected%
};

std::string_view to_string(DeviationMode mode);
std::optional<DeviationMode> parse_deviation_mode(std::string_view text);

struct LemmaDeviation {
  double observed_pct = 0.0;
  double expected_pct = 0.0;
  double deviation = 0.0;
};

struct DeviationSummary {
  DeviationMode mode = DeviationMode::difference;
  /// Mean and median over attested, covered lemmas; empty when none.
  std::optional<double> mean_deviation;
  std::optional<double> median_deviation;
  std::map<Lemma, LemmaDeviation> per_lemma;
  /// Attested lemmas the reference table cannot score: absent from the
  /// table, or (ratio mode) listed with frequency 0.
  std::vector<Lemma> uncovered;
};

std::map<SentimentClass, DeviationSummary> expected_deviation(const CorpusStratum& stratum,
                                                              const SentimentLexicon& lexicon,
                                                              const FrequencyTable& ref,
                                                              DeviationMode mode = DeviationMode::difference);

struct TokensPerLemma {
  std::size_t unique_lemmas = 0;
  std::size_t tokens = 0;
  /// Absent when the class has no attested lemma.
  std::optional<double> mean;
  /// token count -> number of lemmas with that count
  std::map<std::size_t, std::size_t> histogram;
};

std::map<SentimentClass, TokensPerLemma> tokens_per_lemma(const CorpusStratum& stratum,
                                                          const SentimentLexicon& lexicon);

/// Everything above for one stratum and class, in one pass.
struct ClassStats {
  std::size_t unique_lemma_count = 0;
  std::size_t token_count = 0;
  std::optional<double> mean_tokens_per_lemma;
  std::map<Lemma, double> observed_freq_pct;
  std::optional<DeviationSummary> deviation;
};

std::map<SentimentClass, ClassStats> stratum_sentiment_stats(const CorpusStratum& stratum,
                                                             const SentimentLexicon& lexicon,
                                                             const FrequencyTable* ref = nullptr,
                                                             DeviationMode mode = DeviationMode::difference);

}  // namespace semfield
