// semfield: sentiment and semantic-field statistics for source texts and
// their translations.
//
//   semfield validate --config run.json
//   semfield analyze  --config run.json [--output DIR]
//   semfield synth    --config run.json [--seed N] [--inflation X]
//
// Exit codes: 0 success, 1 analysis error, 2 configuration or validation
// error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semfield/error.hpp"
#include "semfield/report.hpp"

namespace fs = std::filesystem;
using namespace semfield;

namespace {

struct Overrides {
  std::string config;
  std::string manifest;
  std::string output;
  std::string concept_map;
  std::string source_language;
  std::string target_language;
  std::vector<std::string> lexicons;   // lang=path
  std::vector<std::string> freqs;      // lang=path
  std::vector<std::string> lemma_dicts;  // lang=path
  std::vector<std::string> priority;
  std::vector<std::string> factors;
  std::optional<double> alpha;
  std::string mode;
  std::optional<std::size_t> top_k;
  // synth
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> words;
  std::vector<std::string> kinds;
  std::optional<double> factor;
  std::optional<double> pull;
  std::optional<double> inflation;
};

std::pair<std::string, fs::path> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw Error(ErrorKind::invalid_argument, "expected LANG=PATH, got '" + text + "'");
  return {text.substr(0, eq), fs::path(text.substr(eq + 1))};
}

RunConfig build_config(const Overrides& o) {
  RunConfig config;
  if (!o.config.empty()) config = load_run_config(o.config);
  if (!o.manifest.empty()) config.manifest_path = o.manifest;
  if (!o.output.empty()) config.output_dir = o.output;
  if (!o.concept_map.empty()) config.concept_map_path = fs::path(o.concept_map);
  if (!o.source_language.empty()) config.source_language = o.source_language;
  if (!o.target_language.empty()) config.target_language = o.target_language;
  for (const auto& item : o.lexicons) {
    auto [lang, path] = split_assignment(item);
    config.lexicons[lang].paths.push_back(path);
  }
  for (const auto& item : o.freqs) {
    auto [lang, path] = split_assignment(item);
    config.frequency_tables[lang] = path;
  }
  for (const auto& item : o.lemma_dicts) {
    auto [lang, path] = split_assignment(item);
    config.lemma_dicts[lang] = path;
  }
  if (!o.priority.empty()) config.priority = parse_priority(o.priority);
  if (!o.factors.empty()) config.grouping_factors = o.factors;
  if (o.alpha) config.alpha = *o.alpha;
  if (!o.mode.empty()) {
    auto mode = parse_deviation_mode(o.mode);
    if (!mode) throw Error(ErrorKind::invalid_argument, "unknown deviation mode '" + o.mode + "'");
    config.deviation_mode = *mode;
  }
  if (o.top_k) config.top_k = *o.top_k;

  auto& synth = config.synth;
  if (o.seed) synth.seed = *o.seed;
  if (o.words) synth.target_words = *o.words;
  if (!o.kinds.empty()) {
    synth.channels.clear();
    std::uint64_t i = 0;
    for (const auto& kind : o.kinds) {
      ++i;
      if (kind == "machine") {
        synth.channels.push_back(ChannelParams::machine_defaults(synth.seed + i));
      } else if (kind == "human") {
        synth.channels.push_back(ChannelParams::human_defaults(synth.seed + i));
      } else {
        throw Error(ErrorKind::invalid_argument, "unknown channel kind '" + kind + "'");
      }
    }
  }
  if (synth.channels.empty() && (o.factor || o.pull || o.inflation)) {
    synth.channels = {ChannelParams::machine_defaults(synth.seed + 1), ChannelParams::human_defaults(synth.seed + 2)};
  }
  for (auto& ch : synth.channels) {
    if (o.factor) ch.narrow_widen_factor = *o.factor;
    if (o.pull) ch.norm_pull = *o.pull;
    if (o.inflation) ch.length_inflation = *o.inflation;
  }
  return config;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("-m,--manifest", o.manifest, "corpus manifest (JSON)");
  cmd->add_option("-o,--output", o.output, "output directory");
  cmd->add_option("--concept-map", o.concept_map, "concept map TSV");
  cmd->add_option("--source-language", o.source_language, "language of the source texts");
  cmd->add_option("--target-language", o.target_language, "language of the translations");
  cmd->add_option("--lexicon", o.lexicons, "lexicon source, LANG=PATH (repeatable)");
  cmd->add_option("--freq", o.freqs, "reference frequency table, LANG=PATH");
  cmd->add_option("--lemma-dict", o.lemma_dicts, "lemma dictionary, LANG=PATH");
  cmd->add_option("--priority", o.priority, "conflict priority, e.g. epistemic negative positive")->expected(3);
  cmd->add_option("--factor", o.factors, "grouping factor (repeatable)");
  cmd->add_option("--alpha", o.alpha, "significance level for Tukey HSD");
  cmd->add_option("--mode", o.mode, "deviation mode: difference or ratio");
  cmd->add_option("--top-k", o.top_k, "concepts per list in top-k tables");
}

int run_validate(const RunConfig& config) {
  const ValidationReport report = cmd_validate(config);
  std::cout << report.render();
  return report.clean() ? kExitOk : kExitConfigError;
}

int run_analyze(const RunConfig& config) {
  const ValidationReport report = cmd_validate(config);
  if (!report.clean()) {
    std::cerr << report.render();
    return kExitConfigError;
  }
  try {
    const ReportBundle bundle = cmd_analyze(config);
    write_bundle(bundle, config.output_dir);
    std::cout << "wrote " << bundle.files.size() << " files to " << config.output_dir.string() << "\n";
  } catch (const Error& e) {
    std::cerr << "analysis error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
  return kExitOk;
}

int run_synth(const RunConfig& config) {
  const fs::path manifest = cmd_synth(config);
  std::cout << "wrote " << manifest.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment and semantic-field statistics for source texts and translations"};
  app.require_subcommand(1);
  Overrides o;

  auto* validate = app.add_subcommand("validate", "check lexicons, concept map, manifest, and reference tables");
  auto* analyze = app.add_subcommand("analyze", "compute the report bundle (CSV + summary.json)");
  auto* synth = app.add_subcommand("synth", "generate a synthetic source corpus and channel translations");
  for (auto* cmd : {validate, analyze, synth}) add_common(cmd, o);
  synth->add_option("--seed", o.seed, "generator seed");
  synth->add_option("--words", o.words, "source corpus size in words");
  synth->add_option("--kind", o.kinds, "channel kind: machine or human (repeatable)");
  synth->add_option("--narrow-widen", o.factor, "variant scaling factor for every channel");
  synth->add_option("--pull", o.pull, "norm pull in [0, 1] for every channel");
  synth->add_option("--inflation", o.inflation, "target/source length ratio for every channel");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    const RunConfig config = build_config(o);
    if (validate->parsed()) return run_validate(config);
    if (analyze->parsed()) return run_analyze(config);
    return run_synth(config);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == ErrorKind::analysis ? kExitAnalysisError : kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysisError;
  }
}
