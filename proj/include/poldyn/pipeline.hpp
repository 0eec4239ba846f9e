#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "poldyn/classifier.hpp"

namespace poldyn {

inline constexpr std::string_view kPoldynVersion = "0.1.0";

// Raised at the end of a stage when --strict is set and an iterative step hit
// its sweep cap without converging.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// End-to-end run configuration. Relative paths are resolved against the
// directory containing the config file; `raw` keeps the values as written so
// the config hash does not depend on where the file lives.
struct PipelineConfig {
  std::string input;          // corpus (.jsonl or .csv), required
  std::string output_dir;     // required
  std::uint64_t seed = 0;     // required, no default
  std::optional<std::string> rules;
  std::optional<std::string> queries;
  std::string seed_pro;       // required
  std::string seed_anti;      // required
  std::string network_seeds;  // required
  std::optional<std::string> gold;
  std::optional<int> active_min_posts;
  int window_days = 3;
  int step_days = 1;
  int lexicon_iterations = 4;
  int lexicon_min_count = 3;
  int burst_top = 20;
  int epochs = 40;
  double reg = 1e-4;
  int cv_folds = 0;  // 0 = no cross-validation report
  std::vector<int> n_thresholds = {5, 10, 15, 20};
  int n_surrogates = 20;  // 0 = no surrogate report
  double bin_width = 0.05;
  std::optional<std::string> softlabel_from;  // YYYY-MM-DD, default: full range
  std::optional<std::string> softlabel_to;
  bool strict = false;

  nlohmann::json raw;  // canonical form of the values as written, minus output_dir
};

PipelineConfig pipeline_config_from_json_text(std::string_view text, const std::string& base_dir);
PipelineConfig load_pipeline_config(const std::string& path);

// FNV-1a over the canonical serialized config (output_dir excluded, effective
// seed included).
std::uint64_t config_hash(const PipelineConfig& cfg);
std::string format_hash64(std::uint64_t h);

// tweet_id,class rows; header required.
std::vector<std::pair<std::string, Stance>> read_gold_csv(const std::string& path);

struct RunResult {
  std::string output_dir;
  nlohmann::json manifest;
};

// Runs ingest -> filter -> lexicon -> train -> classify -> network ->
// dynamics, writing all outputs plus manifest.json under cfg.output_dir.
// On stage failure a partial manifest naming the failed stage is written
// before the exception propagates.
RunResult run_pipeline(const PipelineConfig& cfg);

}  // namespace poldyn
