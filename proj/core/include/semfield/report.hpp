#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semfield/freq_stats.hpp"
#include "semfield/lexicon.hpp"
#include "semfield/synth_channel.hpp"

namespace semfield {

struct LexiconConfig {
  std::vector<std::filesystem::path> paths;
  bool attested = false;
};

struct SynthConfig {
  std::size_t target_words = 50'000;
  std::uint64_t seed = 7;
  SourceOptions source;
  /// Concept id -> weight; empty means weight 1 for every concept.
  std::map<std::string, double> budget;
  std::vector<ChannelParams> channels;
};

/// Everything a CLI run needs. Paths are absolute or relative to the
/// working directory; `load_run_config` resolves config-relative paths.
struct RunConfig {
  std::filesystem::path manifest_path;
  std::string source_language = "ru";
  std::string target_language = "en";
  std::map<std::string, LexiconConfig> lexicons;
  std::map<std::string, std::filesystem::path> lemma_dicts;
  std::optional<std::filesystem::path> concept_map_path;
  std::map<std::string, std::filesystem::path> frequency_tables;
  ClassPriority priority = kDefaultPriority;
  std::vector<std::string> grouping_factors;
  double alpha = 0.05;
  std::filesystem::path output_dir = "report";
  DeviationMode deviation_mode = DeviationMode::difference;
  std::size_t top_k = 5;
  SynthConfig synth;
};

/// Reads a JSON config file over the defaults above.
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies a JSON object of config fields onto `config`. Relative paths in
/// the object resolve against `base`.
void apply_config_json(RunConfig& config, const std::string& json_text, const std::filesystem::path& base);

enum class Severity { error, warning };

struct ValidationIssue {
  Severity severity = Severity::error;
  std::string category;  // config, manifest, lexicon, concept_map, frequency_table, lemma_dict
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool clean() const { return error_count() == 0; }
  /// One line per issue, then "<n> errors, <m> warnings".
  std::string render() const;
};

ValidationReport cmd_validate(const RunConfig& config);

/// In-memory report: file name -> contents, plus the JSON summary text.
struct ReportBundle {
  std::map<std::string, std::string> files;
};

/// Runs the full analysis. Throws Error on failure; nothing is written.
ReportBundle cmd_analyze(const RunConfig& config);

/// Writes every bundle file into `dir`. On a write failure, files already
/// written by this call are removed before the error propagates.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

/// Generates the synthetic source corpus and one corpus per configured
/// channel into `config.output_dir`, plus `manifest.json`. Returns the
/// manifest path.
std::filesystem::path cmd_synth(const RunConfig& config);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Exit codes shared by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisError = 1;
inline constexpr int kExitConfigError = 2;

}  // namespace semfield
