#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poldyn/classifier.hpp"
#include "poldyn/corpus.hpp"
#include "poldyn/dynamics.hpp"
#include "poldyn/graph.hpp"

namespace poldyn {

struct ActivityChange {
  int day_index = 0;      // from this day on, the rates below apply
  double activity0 = 1.0; // community-0 users
  double activity1 = 1.0;
};

// Synthetic two-community scenario with planted stances, switch schedules,
// and repost preferences. Marker vocabularies are disjoint between sides and
// from the noise vocabulary by construction ("#m<side><i>" / "m<side><i>" vs
// "n<j>").
struct ScenarioSpec {
  int users = 100;
  std::string start_day = "2013-06-21";
  int days = 20;
  int marker_terms_per_side = 20;
  int noise_terms = 200;
  double marker_prob = 0.9;  // per non-leading token of a stance tweet
  int tokens_per_tweet = 8;
  int tweets_per_active_day = 1;
  int reposts_per_active_day = 1;
  double activity0 = 1.0;  // >= 1 means active every day
  double activity1 = 1.0;
  std::optional<ActivityChange> activity_change;
  double neutral_fraction = 0.0;
  double side1_fraction = 0.5;  // of stance users
  int switchers = 0;            // first switchers users of side 0 flip stance
  int switch_day = -1;          // day index of the flip
  double p_in = 0.2;   // repost acceptance within the community
  double p_out = 0.01; // across communities; must be < p_in
  double celeb_bias = 0.5;  // chance a repost is redirected to the community hub
  std::string topic_tag = "#topic";  // appended to every tweet
  int gold_sample = 1000;
  std::uint64_t seed = 1;
};

ScenarioSpec scenario_from_json_text(std::string_view text);
ScenarioSpec load_scenario_spec(const std::string& path);
std::string scenario_to_json(const ScenarioSpec& spec);

struct UserTruth {
  std::string user;
  int community = 0;
  Stance base_stance = Stance::Neutral;
  int switch_day = -1;  // day index; -1 = stable
};

struct Scenario {
  ScenarioSpec spec;
  std::int32_t start_epoch_day = 0;
  Corpus corpus;
  std::vector<UserTruth> users;
  std::map<std::string, Stance> tweet_truth;  // tweet id -> stance when written
  std::array<std::size_t, 2> celebs{};        // hub user index per community

  Stance stance_on(std::size_t user_index, int day_index) const;
};

// Deterministic in spec.seed: the same spec yields a byte-identical corpus.
// Infeasible specs (p_in <= p_out, empty sides, switchers without a valid
// switch day, ...) raise ConfigError.
Scenario generate(const ScenarioSpec& spec);

// Seeded shuffled sample of gold_sample tweet labels; every class present in
// the corpus is guaranteed to appear (scan-append past the sample if needed).
std::vector<std::pair<std::string, Stance>> gold_sample(const Scenario& s);

std::string truth_to_csv(const Scenario& s);
std::string gold_to_csv(const std::vector<std::pair<std::string, Stance>>& gold);

// First hashtag markers of each side, for lexicon seeding.
std::vector<std::string> seed_terms(const Scenario& s, int side, int count = 3);

// Writes corpus.jsonl, truth.csv, gold.csv, seed_pro.txt, seed_anti.txt,
// network_seeds.csv, queries.txt, and pipeline_config.json into dir.
void write_scenario_bundle(const Scenario& s, const std::string& dir);

// Directed two-block graph: every unordered pair gets an edge with
// probability p_in (same block) or p_out (cross), uniform direction,
// weight 1. Nodes without edges are naturally absent from the snapshot;
// `blocks` covers all generated ids.
struct PlantedGraph {
  GraphSnapshot graph;
  std::map<std::string, std::int8_t> blocks;
};
PlantedGraph planted_two_block_graph(int n, double p_in, double p_out, std::uint64_t seed);

// Paired score maps with Pearson correlation exactly rho in expectation:
// x ~ U[0,1], y = x with probability rho, else an independent U[0,1].
struct AlignedScores {
  std::map<std::string, double> polarity;
  SoftLabelTable leanings;
};
AlignedScores generate_aligned_scores(int n, double rho, std::uint64_t seed);

}  // namespace poldyn
