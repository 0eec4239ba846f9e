#include "poldyn/synthgen.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <utility>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/rng.hpp"

namespace poldyn {

namespace {

using nlohmann::json;

std::string user_id(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%05zu", i);
  return buf;
}

std::string tweet_id(std::uint64_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%08llu", static_cast<unsigned long long>(i));
  return buf;
}

void read_field(const json& j, const char* key, int& out) {
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string("scenario: ") + key + " must be an integer");
  out = j.at(key).get<int>();
}

void read_field(const json& j, const char* key, double& out) {
  if (!j.at(key).is_number()) throw ConfigError(std::string("scenario: ") + key + " must be a number");
  out = j.at(key).get<double>();
}

void read_field(const json& j, const char* key, std::string& out) {
  if (!j.at(key).is_string()) throw ConfigError(std::string("scenario: ") + key + " must be a string");
  out = j.at(key).get<std::string>();
}

void read_field(const json& j, const char* key, std::uint64_t& out) {
  if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
    throw ConfigError(std::string("scenario: ") + key + " must be a non-negative integer");
  out = j.at(key).get<std::uint64_t>();
}

struct Layout {
  int n_side0 = 0;
  int n_side1 = 0;
  int n_neutral = 0;
};

Layout validate(const ScenarioSpec& s) {
  if (s.users < 2) throw ConfigError("scenario: users must be at least 2");
  if (s.days < 1) throw ConfigError("scenario: days must be at least 1");
  if (s.marker_terms_per_side < 1) throw ConfigError("scenario: marker_terms_per_side must be at least 1");
  if (s.noise_terms < 1) throw ConfigError("scenario: noise_terms must be at least 1");
  if (s.tokens_per_tweet < 1) throw ConfigError("scenario: tokens_per_tweet must be at least 1");
  if (s.tweets_per_active_day < 0 || s.reposts_per_active_day < 0)
    throw ConfigError("scenario: per-day tweet counts must be non-negative");
  if (s.marker_prob < 0.0 || s.marker_prob > 1.0) throw ConfigError("scenario: marker_prob must be in [0,1]");
  if (s.neutral_fraction < 0.0 || s.neutral_fraction >= 1.0)
    throw ConfigError("scenario: neutral_fraction must be in [0,1)");
  if (s.side1_fraction < 0.0 || s.side1_fraction > 1.0)
    throw ConfigError("scenario: side1_fraction must be in [0,1]");
  if (s.p_in <= 0.0 || s.p_in > 1.0) throw ConfigError("scenario: p_in must be in (0,1]");
  if (s.p_out < 0.0) throw ConfigError("scenario: p_out must be non-negative");
  if (s.p_out >= s.p_in) throw ConfigError("scenario: p_out must be smaller than p_in");
  if (s.celeb_bias < 0.0 || s.celeb_bias > 1.0) throw ConfigError("scenario: celeb_bias must be in [0,1]");
  if (s.activity0 < 0.0 || s.activity1 < 0.0) throw ConfigError("scenario: activity rates must be non-negative");
  if (s.activity_change) {
    const auto& c = *s.activity_change;
    if (c.day_index < 0 || c.day_index >= s.days)
      throw ConfigError("scenario: activity_change.day_index out of range");
    if (c.activity0 < 0.0 || c.activity1 < 0.0)
      throw ConfigError("scenario: activity_change rates must be non-negative");
  }
  if (s.gold_sample < 0) throw ConfigError("scenario: gold_sample must be non-negative");
  if (s.topic_tag.size() < 2 || s.topic_tag[0] != '#')
    throw ConfigError("scenario: topic_tag must be a hashtag");

  Layout lay;
  lay.n_neutral = static_cast<int>(s.neutral_fraction * s.users + 0.5);
  const int n_stance = s.users - lay.n_neutral;
  lay.n_side1 = static_cast<int>(s.side1_fraction * n_stance + 0.5);
  lay.n_side0 = n_stance - lay.n_side1;
  if (lay.n_side0 < 1 || lay.n_side1 < 1)
    throw ConfigError("scenario: both sides need at least one user");
  if (s.switchers < 0 || s.switchers > lay.n_side0)
    throw ConfigError("scenario: switchers must be between 0 and the side-0 population");
  if (s.switchers > 0 && (s.switch_day < 1 || s.switch_day >= s.days))
    throw ConfigError("scenario: switch_day must be inside (0, days) when switchers are planted");
  return lay;
}

double activity_rate(const ScenarioSpec& s, int community, int day) {
  if (s.activity_change && day >= s.activity_change->day_index)
    return community == 0 ? s.activity_change->activity0 : s.activity_change->activity1;
  return community == 0 ? s.activity0 : s.activity1;
}

std::string marker_term(int side, int index) {
  std::string t = index % 2 == 0 ? "#m" : "m";
  t += static_cast<char>('0' + side);
  t += std::to_string(index);
  return t;
}

}  // namespace

ScenarioSpec scenario_from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");

  static const std::set<std::string> known = {
      "users", "start_day", "days", "marker_terms_per_side", "noise_terms",
      "marker_prob", "tokens_per_tweet", "tweets_per_active_day",
      "reposts_per_active_day", "activity0", "activity1", "activity_change",
      "neutral_fraction", "side1_fraction", "switchers", "switch_day",
      "p_in", "p_out", "celeb_bias", "topic_tag", "gold_sample", "seed"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("scenario: unknown key \"" + key + "\"");
  }

  ScenarioSpec s;
  if (j.contains("users")) read_field(j, "users", s.users);
  if (j.contains("start_day")) read_field(j, "start_day", s.start_day);
  if (j.contains("days")) read_field(j, "days", s.days);
  if (j.contains("marker_terms_per_side")) read_field(j, "marker_terms_per_side", s.marker_terms_per_side);
  if (j.contains("noise_terms")) read_field(j, "noise_terms", s.noise_terms);
  if (j.contains("marker_prob")) read_field(j, "marker_prob", s.marker_prob);
  if (j.contains("tokens_per_tweet")) read_field(j, "tokens_per_tweet", s.tokens_per_tweet);
  if (j.contains("tweets_per_active_day")) read_field(j, "tweets_per_active_day", s.tweets_per_active_day);
  if (j.contains("reposts_per_active_day")) read_field(j, "reposts_per_active_day", s.reposts_per_active_day);
  if (j.contains("activity0")) read_field(j, "activity0", s.activity0);
  if (j.contains("activity1")) read_field(j, "activity1", s.activity1);
  if (j.contains("activity_change")) {
    const json& c = j.at("activity_change");
    if (!c.is_object()) throw ConfigError("scenario: activity_change must be an object");
    ActivityChange ch;
    read_field(c, "day_index", ch.day_index);
    read_field(c, "activity0", ch.activity0);
    read_field(c, "activity1", ch.activity1);
    s.activity_change = ch;
  }
  if (j.contains("neutral_fraction")) read_field(j, "neutral_fraction", s.neutral_fraction);
  if (j.contains("side1_fraction")) read_field(j, "side1_fraction", s.side1_fraction);
  if (j.contains("switchers")) read_field(j, "switchers", s.switchers);
  if (j.contains("switch_day")) read_field(j, "switch_day", s.switch_day);
  if (j.contains("p_in")) read_field(j, "p_in", s.p_in);
  if (j.contains("p_out")) read_field(j, "p_out", s.p_out);
  if (j.contains("celeb_bias")) read_field(j, "celeb_bias", s.celeb_bias);
  if (j.contains("topic_tag")) read_field(j, "topic_tag", s.topic_tag);
  if (j.contains("gold_sample")) read_field(j, "gold_sample", s.gold_sample);
  if (j.contains("seed")) read_field(j, "seed", s.seed);
  return s;
}

ScenarioSpec load_scenario_spec(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  try {
    return scenario_from_json_text(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string scenario_to_json(const ScenarioSpec& s) {
  json j;
  j["users"] = s.users;
  j["start_day"] = s.start_day;
  j["days"] = s.days;
  j["marker_terms_per_side"] = s.marker_terms_per_side;
  j["noise_terms"] = s.noise_terms;
  j["marker_prob"] = s.marker_prob;
  j["tokens_per_tweet"] = s.tokens_per_tweet;
  j["tweets_per_active_day"] = s.tweets_per_active_day;
  j["reposts_per_active_day"] = s.reposts_per_active_day;
  j["activity0"] = s.activity0;
  j["activity1"] = s.activity1;
  if (s.activity_change) {
    j["activity_change"] = {{"day_index", s.activity_change->day_index},
                            {"activity0", s.activity_change->activity0},
                            {"activity1", s.activity_change->activity1}};
  }
  j["neutral_fraction"] = s.neutral_fraction;
  j["side1_fraction"] = s.side1_fraction;
  j["switchers"] = s.switchers;
  j["switch_day"] = s.switch_day;
  j["p_in"] = s.p_in;
  j["p_out"] = s.p_out;
  j["celeb_bias"] = s.celeb_bias;
  j["topic_tag"] = s.topic_tag;
  j["gold_sample"] = s.gold_sample;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

Stance Scenario::stance_on(std::size_t user_index, int day_index) const {
  const UserTruth& u = users.at(user_index);
  if (u.switch_day >= 0 && day_index >= u.switch_day)
    return u.base_stance == Stance::Pro ? Stance::Anti : Stance::Pro;
  return u.base_stance;
}

Scenario generate(const ScenarioSpec& spec) {
  const Layout lay = validate(spec);
  Scenario s;
  s.spec = spec;
  s.start_epoch_day = parse_day(spec.start_day);

  s.users.reserve(spec.users);
  for (int i = 0; i < spec.users; ++i) {
    UserTruth u;
    u.user = user_id(static_cast<std::size_t>(i));
    if (i < lay.n_side0) {
      u.community = 0;
      u.base_stance = Stance::Pro;
      if (i < spec.switchers) u.switch_day = spec.switch_day;
    } else if (i < lay.n_side0 + lay.n_side1) {
      u.community = 1;
      u.base_stance = Stance::Anti;
    } else {
      u.community = (i - lay.n_side0 - lay.n_side1) % 2;
      u.base_stance = Stance::Neutral;
    }
    s.users.push_back(std::move(u));
  }
  s.celebs = {static_cast<std::size_t>(lay.n_side0 - 1),
              static_cast<std::size_t>(lay.n_side0 + lay.n_side1 - 1)};

  Rng rng(derive_seed(spec.seed, "corpus"));
  std::vector<Tweet> tweets;
  std::uint64_t counter = 0;

  auto emit = [&](std::size_t u, int day, bool repost) {
    const Stance stance = s.stance_on(u, day);
    std::string text;
    for (int k = 0; k < spec.tokens_per_tweet; ++k) {
      if (!text.empty()) text += ' ';
      bool marker = false;
      if (stance != Stance::Neutral)
        marker = k == 0 || rng.bernoulli(spec.marker_prob);
      if (marker) {
        const int side = stance == Stance::Pro ? 0 : 1;
        const int idx = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(spec.marker_terms_per_side)));
        text += marker_term(side, idx);
      } else {
        text += 'n';
        text += std::to_string(rng.uniform_int(static_cast<std::uint64_t>(spec.noise_terms)));
      }
    }
    text += ' ';
    text += spec.topic_tag;

    std::optional<std::string> repost_of;
    if (repost) {
      const int cu = s.users[u].community;
      std::int64_t target = -1;
      for (int attempt = 0; attempt < 64 && target < 0; ++attempt) {
        const std::size_t v = static_cast<std::size_t>(rng.uniform_int(static_cast<std::uint64_t>(spec.users)));
        if (v == u) continue;
        const int cv = s.users[v].community;
        if (!rng.bernoulli(cv == cu ? spec.p_in : spec.p_out)) continue;
        std::size_t chosen = v;
        if (rng.bernoulli(spec.celeb_bias)) {
          const std::size_t hub = s.celebs[static_cast<std::size_t>(cv)];
          if (hub != u) chosen = hub;
        }
        target = static_cast<std::int64_t>(chosen);
      }
      if (target < 0) {
        std::size_t hub = s.celebs[static_cast<std::size_t>(cu)];
        if (hub == u) hub = s.celebs[static_cast<std::size_t>(1 - cu)];
        target = static_cast<std::int64_t>(hub);
      }
      repost_of = s.users[static_cast<std::size_t>(target)].user;
    }

    const std::int64_t ts =
        (static_cast<std::int64_t>(s.start_epoch_day) + day) * 86400 +
        static_cast<std::int64_t>(rng.uniform_int(86400));
    const std::string id = tweet_id(counter++);
    s.tweet_truth.emplace(id, stance);
    tweets.push_back(make_tweet(id, s.users[u].user, ts, text, repost_of));
  };

  for (int day = 0; day < spec.days; ++day) {
    for (int i = 0; i < spec.users; ++i) {
      const double rate = activity_rate(spec, s.users[static_cast<std::size_t>(i)].community, day);
      const bool active = rate >= 1.0 || rng.bernoulli(rate);
      if (!active) continue;
      for (int k = 0; k < spec.tweets_per_active_day; ++k) emit(static_cast<std::size_t>(i), day, false);
      for (int k = 0; k < spec.reposts_per_active_day; ++k) emit(static_cast<std::size_t>(i), day, true);
    }
  }

  s.corpus = Corpus(std::move(tweets));
  return s;
}

std::vector<std::pair<std::string, Stance>> gold_sample(const Scenario& s) {
  const std::size_t n = s.corpus.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(s.spec.seed, "gold"));
  rng.shuffle(order);

  const std::size_t take = std::min(static_cast<std::size_t>(s.spec.gold_sample), n);
  std::vector<std::pair<std::string, Stance>> out;
  out.reserve(take);
  std::array<bool, 3> have{};
  for (std::size_t i = 0; i < take; ++i) {
    const Tweet& t = s.corpus[order[i]];
    const Stance y = s.tweet_truth.at(t.id);
    out.emplace_back(t.id, y);
    have[static_cast<std::size_t>(y)] = true;
  }
  for (std::size_t i = take; i < n; ++i) {
    const Tweet& t = s.corpus[order[i]];
    const Stance y = s.tweet_truth.at(t.id);
    if (have[static_cast<std::size_t>(y)]) continue;
    out.emplace_back(t.id, y);
    have[static_cast<std::size_t>(y)] = true;
  }
  return out;
}

std::string truth_to_csv(const Scenario& s) {
  std::string out = "user,day,stance,community,switch_day\n";
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const UserTruth& u = s.users[i];
    for (int d = 0; d < s.spec.days; ++d) {
      out += csv_join({u.user, format_day(s.start_epoch_day + d),
                       std::string(stance_name(s.stance_on(i, d))),
                       std::to_string(u.community),
                       u.switch_day >= 0 ? format_day(s.start_epoch_day + u.switch_day) : std::string()});
      out += '\n';
    }
  }
  return out;
}

std::string gold_to_csv(const std::vector<std::pair<std::string, Stance>>& gold) {
  std::string out = "tweet_id,class\n";
  for (const auto& [id, y] : gold) {
    out += csv_join({id, std::string(stance_name(y))});
    out += '\n';
  }
  return out;
}

std::vector<std::string> seed_terms(const Scenario& s, int side, int count) {
  if (side != 0 && side != 1) throw std::invalid_argument("seed_terms: side must be 0 or 1");
  std::vector<std::string> out;
  for (int i = 0; i < s.spec.marker_terms_per_side && static_cast<int>(out.size()) < count; i += 2)
    out.push_back(marker_term(side, i));
  return out;
}

void write_scenario_bundle(const Scenario& s, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&dir](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };

  write_corpus_jsonl(s.corpus, path("corpus.jsonl"));
  write_text_file(path("truth.csv"), truth_to_csv(s));
  write_text_file(path("gold.csv"), gold_to_csv(gold_sample(s)));

  for (const int side : {0, 1}) {
    std::string text;
    for (const auto& term : seed_terms(s, side)) {
      text += term;
      text += '\n';
    }
    write_text_file(path(side == 0 ? "seed_pro.txt" : "seed_anti.txt"), text);
  }

  std::string seeds = "author_id,label\n";
  seeds += csv_join({s.users[s.celebs[0]].user, "0"}) + "\n";
  seeds += csv_join({s.users[s.celebs[1]].user, "1"}) + "\n";
  write_text_file(path("network_seeds.csv"), seeds);

  write_text_file(path("queries.txt"),
                  "# one query per line\n(" + s.spec.topic_tag + ")\n");

  json cfg;
  cfg["input"] = "corpus.jsonl";
  cfg["output_dir"] = "out";
  cfg["seed"] = s.spec.seed;
  cfg["queries"] = "queries.txt";
  cfg["seed_pro"] = "seed_pro.txt";
  cfg["seed_anti"] = "seed_anti.txt";
  cfg["network_seeds"] = "network_seeds.csv";
  cfg["gold"] = "gold.csv";
  write_text_file(path("pipeline_config.json"), cfg.dump(2) + "\n");
}

PlantedGraph planted_two_block_graph(int n, double p_in, double p_out, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("planted_two_block_graph: n must be at least 2");
  if (p_out >= p_in) throw std::invalid_argument("planted_two_block_graph: p_out must be smaller than p_in");

  const int half = n / 2;
  std::vector<std::string> ids(static_cast<std::size_t>(n));
  PlantedGraph out;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%03d", i < half ? 'a' : 'b', i < half ? i : i - half);
    ids[static_cast<std::size_t>(i)] = buf;
    out.blocks[ids[static_cast<std::size_t>(i)]] = i < half ? 0 : 1;
  }

  Rng rng(seed);
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same = (i < half) == (j < half);
      if (!rng.bernoulli(same ? p_in : p_out)) continue;
      if (rng.bernoulli(0.5))
        arcs.emplace_back(i, j);
      else
        arcs.emplace_back(j, i);
    }
  }

  std::set<int> present;
  for (const auto& [a, b] : arcs) {
    present.insert(a);
    present.insert(b);
  }
  std::map<int, std::int32_t> index;
  GraphSnapshot& g = out.graph;
  for (const int i : present) {
    index[i] = static_cast<std::int32_t>(g.nodes.size());
    g.nodes.push_back(ids[static_cast<std::size_t>(i)]);
  }
  for (const auto& [a, b] : arcs) g.edges.push_back({index.at(a), index.at(b), 1});
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.src, x.dst) < std::pair(y.src, y.dst);
  });
  g.labels.assign(g.nodes.size(), kLabelUnassigned);
  g.is_seed.assign(g.nodes.size(), 0);
  return out;
}

AlignedScores generate_aligned_scores(int n, double rho, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_aligned_scores: n must be at least 2");
  if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("generate_aligned_scores: rho must be in [0,1]");
  Rng rng(seed);
  AlignedScores out;
  for (int i = 0; i < n; ++i) {
    const std::string id = user_id(static_cast<std::size_t>(i));
    const double x = rng.uniform01();
    const double y = rng.bernoulli(rho) ? x : rng.uniform01();
    out.polarity[id] = x;
    SoftLabelEntry e;
    e.leaning = y;
    e.snapshots_present = 1;
    e.mean_strength = 1.0;
    out.leanings[id] = e;
  }
  return out;
}

}  // namespace poldyn
