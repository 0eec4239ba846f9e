#include "poldyn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>

#include "poldyn/corpus.hpp"
#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/dynamics.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/graph.hpp"
#include "poldyn/lexicon.hpp"
#include "poldyn/query.hpp"
#include "poldyn/rng.hpp"

namespace poldyn {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string resolve(const std::string& base_dir, const std::string& rel) {
  fs::path p(rel);
  if (p.is_absolute() || base_dir.empty()) return rel;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

const json& require_key(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing required key \"") + key + "\"");
  return j.at(key);
}

std::string as_string(const json& v, const char* key) {
  if (!v.is_string()) throw ConfigError(std::string("config: ") + key + " must be a string");
  return v.get<std::string>();
}

int as_int(const json& v, const char* key) {
  if (!v.is_number_integer()) throw ConfigError(std::string("config: ") + key + " must be an integer");
  return v.get<int>();
}

double as_number(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("config: ") + key + " must be a number");
  return v.get<double>();
}

struct StageCtx {
  std::vector<std::string> warnings;
  json detail = json::object();
  bool skipped = false;

  void warn(std::string w) { warnings.push_back(std::move(w)); }
  void skip(std::string reason) {
    skipped = true;
    detail["skip_reason"] = std::move(reason);
  }
};

void validate_numerics(const PipelineConfig& cfg) {
  if (cfg.window_days < 1 || cfg.step_days < 1)
    throw ConfigError("config: window_days and step_days must be at least 1");
  if (cfg.lexicon_iterations < 1) throw ConfigError("config: lexicon_iterations must be at least 1");
  if (cfg.lexicon_min_count < 1) throw ConfigError("config: lexicon_min_count must be at least 1");
  if (cfg.burst_top < 1) throw ConfigError("config: burst_top must be at least 1");
  if (cfg.epochs < 1) throw ConfigError("config: epochs must be at least 1");
  if (!(cfg.reg > 0.0)) throw ConfigError("config: reg must be positive");
  if (cfg.cv_folds != 0 && cfg.cv_folds < 2) throw ConfigError("config: cv_folds must be 0 or at least 2");
  if (cfg.n_surrogates != 0 && cfg.n_surrogates < 2)
    throw ConfigError("config: n_surrogates must be 0 or at least 2");
  if (!(cfg.bin_width > 0.0) || cfg.bin_width > 1.0)
    throw ConfigError("config: bin_width must be in (0,1]");
  if (cfg.n_thresholds.empty()) throw ConfigError("config: n_thresholds must not be empty");
  for (const int n : cfg.n_thresholds)
    if (n < 3) throw ConfigError("config: n_thresholds entries must be at least 3");
  if (cfg.active_min_posts && *cfg.active_min_posts < 1)
    throw ConfigError("config: active_min_posts must be at least 1");
}

}  // namespace

PipelineConfig pipeline_config_from_json_text(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  static const std::set<std::string> known = {
      "input", "output_dir", "seed", "rules", "queries", "seed_pro", "seed_anti",
      "network_seeds", "gold", "active_min_posts", "window_days", "step_days",
      "lexicon_iterations", "lexicon_min_count", "burst_top", "epochs", "reg",
      "cv_folds", "n_thresholds", "n_surrogates", "bin_width", "softlabel_from",
      "softlabel_to", "strict"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("config: unknown key \"" + key + "\"");
  }

  PipelineConfig cfg;
  cfg.input = resolve(base_dir, as_string(require_key(j, "input"), "input"));
  cfg.output_dir = resolve(base_dir, as_string(require_key(j, "output_dir"), "output_dir"));
  const json& seed = require_key(j, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer())
    throw ConfigError("config: seed must be a non-negative integer");
  cfg.seed = seed.get<std::uint64_t>();
  cfg.seed_pro = resolve(base_dir, as_string(require_key(j, "seed_pro"), "seed_pro"));
  cfg.seed_anti = resolve(base_dir, as_string(require_key(j, "seed_anti"), "seed_anti"));
  cfg.network_seeds = resolve(base_dir, as_string(require_key(j, "network_seeds"), "network_seeds"));

  if (j.contains("rules")) cfg.rules = resolve(base_dir, as_string(j.at("rules"), "rules"));
  if (j.contains("queries")) cfg.queries = resolve(base_dir, as_string(j.at("queries"), "queries"));
  if (j.contains("gold")) cfg.gold = resolve(base_dir, as_string(j.at("gold"), "gold"));
  if (j.contains("active_min_posts"))
    cfg.active_min_posts = as_int(j.at("active_min_posts"), "active_min_posts");
  if (j.contains("window_days")) cfg.window_days = as_int(j.at("window_days"), "window_days");
  if (j.contains("step_days")) cfg.step_days = as_int(j.at("step_days"), "step_days");
  if (j.contains("lexicon_iterations"))
    cfg.lexicon_iterations = as_int(j.at("lexicon_iterations"), "lexicon_iterations");
  if (j.contains("lexicon_min_count"))
    cfg.lexicon_min_count = as_int(j.at("lexicon_min_count"), "lexicon_min_count");
  if (j.contains("burst_top")) cfg.burst_top = as_int(j.at("burst_top"), "burst_top");
  if (j.contains("epochs")) cfg.epochs = as_int(j.at("epochs"), "epochs");
  if (j.contains("reg")) cfg.reg = as_number(j.at("reg"), "reg");
  if (j.contains("cv_folds")) cfg.cv_folds = as_int(j.at("cv_folds"), "cv_folds");
  if (j.contains("n_thresholds")) {
    const json& arr = j.at("n_thresholds");
    if (!arr.is_array()) throw ConfigError("config: n_thresholds must be an array");
    cfg.n_thresholds.clear();
    for (const auto& v : arr) cfg.n_thresholds.push_back(as_int(v, "n_thresholds entry"));
  }
  if (j.contains("n_surrogates")) cfg.n_surrogates = as_int(j.at("n_surrogates"), "n_surrogates");
  if (j.contains("bin_width")) cfg.bin_width = as_number(j.at("bin_width"), "bin_width");
  if (j.contains("softlabel_from")) cfg.softlabel_from = as_string(j.at("softlabel_from"), "softlabel_from");
  if (j.contains("softlabel_to")) cfg.softlabel_to = as_string(j.at("softlabel_to"), "softlabel_to");
  if (j.contains("strict")) {
    if (!j.at("strict").is_boolean()) throw ConfigError("config: strict must be a boolean");
    cfg.strict = j.at("strict").get<bool>();
  }

  cfg.raw = j;
  cfg.raw.erase("output_dir");
  validate_numerics(cfg);
  return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  try {
    return pipeline_config_from_json_text(text, fs::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
  json canon = cfg.raw;
  canon["seed"] = cfg.seed;  // reflects a --seed override
  return fnv1a64(canon.dump());
}

std::string format_hash64(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<std::string, Stance>> read_gold_csv(const std::string& path) {
  const auto rows = csv_read_file(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"tweet_id", "class"})
    throw DataError(path + ": expected header tweet_id,class");
  std::vector<std::pair<std::string, Stance>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2)
      throw DataError(path + ": row " + std::to_string(i + 1) + ": expected 2 fields");
    const auto y = stance_from_name(rows[i][1]);
    if (!y)
      throw DataError(path + ": row " + std::to_string(i + 1) + ": unknown class \"" + rows[i][1] + "\"");
    out.emplace_back(rows[i][0], *y);
  }
  return out;
}

RunResult run_pipeline(const PipelineConfig& cfg) {
  validate_numerics(cfg);
  {
    std::vector<std::pair<const char*, const std::string*>> paths = {
        {"input", &cfg.input},         {"seed_pro", &cfg.seed_pro},
        {"seed_anti", &cfg.seed_anti}, {"network_seeds", &cfg.network_seeds}};
    if (cfg.rules) paths.emplace_back("rules", &*cfg.rules);
    if (cfg.queries) paths.emplace_back("queries", &*cfg.queries);
    if (cfg.gold) paths.emplace_back("gold", &*cfg.gold);
    for (const auto& [key, path] : paths) {
      if (!fs::exists(*path))
        throw ConfigError(std::string("config: ") + key + " path does not exist: " + *path);
    }
  }
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);

  std::map<std::string, std::uint64_t> file_hashes;
  auto write_output = [&](const std::string& rel, const std::string& content) {
    const fs::path p = out_dir / rel;
    fs::create_directories(p.parent_path());
    write_text_file(p.string(), content);
    file_hashes[rel] = fnv1a64(content);
  };

  json stages = json::array();
  auto write_manifest = [&](const std::string& status, const std::string& failed_stage) {
    json m;
    m["format"] = "poldyn-manifest";
    m["version"] = std::string(kPoldynVersion);
    m["config_hash"] = format_hash64(config_hash(cfg));
    m["seed"] = cfg.seed;
    m["status"] = status;
    if (!failed_stage.empty()) m["failed_stage"] = failed_stage;
    m["stages"] = stages;
    json files = json::object();
    for (const auto& [rel, h] : file_hashes) files[rel] = format_hash64(h);
    m["files"] = files;
    write_text_file((out_dir / "manifest.json").string(), m.dump(2) + "\n");
    return m;
  };

  auto run_stage = [&](const char* name, auto&& body) {
    StageCtx ctx;
    const auto t0 = std::chrono::steady_clock::now();
    json entry;
    entry["name"] = name;
    try {
      body(ctx);
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      entry["warnings"] = ctx.warnings;
      entry["detail"] = ctx.detail;
      stages.push_back(std::move(entry));
      write_manifest("failed", name);
      throw;
    }
    entry["status"] = ctx.skipped ? "skipped" : "ok";
    entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    entry["warnings"] = ctx.warnings;
    entry["detail"] = ctx.detail;
    stages.push_back(std::move(entry));
  };

  NormalizationRules rules;
  Corpus corpus;
  StanceLexicon lex;
  StanceModel model;
  std::vector<Stance> preds;
  SeedList net_seeds;
  std::vector<GraphSnapshot> processed;  // giant components, labeled, day order

  run_stage("ingest", [&](StageCtx& ctx) {
    if (cfg.rules) rules = NormalizationRules::load(*cfg.rules);
    IngestResult ing = read_corpus_file(cfg.input, rules);
    corpus = std::move(ing.corpus);
    if (corpus.empty()) throw DataError("ingest: corpus is empty");
    if (ing.stats.duplicates > 0)
      ctx.warn(std::to_string(ing.stats.duplicates) + " duplicate ids (last record kept)");
    if (ing.stats.self_reposts > 0)
      ctx.warn(std::to_string(ing.stats.self_reposts) + " self-reposts dropped");
    ctx.detail["records"] = ing.stats.records;
    ctx.detail["duplicates"] = ing.stats.duplicates;
    ctx.detail["self_reposts"] = ing.stats.self_reposts;
    ctx.detail["tweets"] = corpus.size();
    ctx.detail["users"] = corpus.by_author().size();
    ctx.detail["first_day"] = format_day(corpus.first_day());
    ctx.detail["last_day"] = format_day(corpus.last_day());
    json js = ctx.detail;
    write_output("ingest_stats.json", js.dump(2) + "\n");
  });

  run_stage("filter", [&](StageCtx& ctx) {
    if (!cfg.queries) {
      ctx.skip("no queries configured");
      return;
    }
    std::vector<QueryPtr> queries;
    try {
      queries = load_queries(*cfg.queries, rules);
    } catch (const QuerySyntaxError& e) {
      throw ConfigError(*cfg.queries + ": " + e.what());
    }
    if (queries.empty()) {
      ctx.skip("query file has no queries");
      return;
    }
    const std::size_t before = corpus.size();
    corpus = filter_corpus(corpus, queries);
    if (corpus.empty()) throw DataError("filter: no tweets matched the queries");
    ctx.detail["queries"] = queries.size();
    ctx.detail["kept"] = corpus.size();
    ctx.detail["dropped"] = before - corpus.size();
    write_output("filtered.jsonl", corpus_to_jsonl(corpus));
    if (cfg.active_min_posts) {
      const auto active = select_active_users(corpus, *cfg.active_min_posts);
      std::string text;
      for (const auto& u : active) {
        text += u;
        text += '\n';
      }
      write_output("active_users.txt", text);
      ctx.detail["active_users"] = active.size();
    }
  });

  run_stage("lexicon", [&](StageCtx& ctx) {
    const auto seeds_pro = load_term_list(cfg.seed_pro, rules);
    const auto seeds_anti = load_term_list(cfg.seed_anti, rules);
    StanceLexicon seed_only;
    seed_only.pro = seeds_pro;
    seed_only.anti = seeds_anti;
    lex = expand_lexicons(corpus, seeds_pro, seeds_anti, cfg.lexicon_iterations,
                          cfg.lexicon_min_count);
    ctx.detail["pro_terms"] = lex.pro.size();
    ctx.detail["anti_terms"] = lex.anti.size();
    ctx.detail["seed_labeled_fraction"] = labeled_fraction(corpus, seed_only);
    ctx.detail["labeled_fraction"] = labeled_fraction(corpus, lex);
    write_output("lexicon.json", lexicon_to_json(lex));
    write_output("bursts.csv", burst_to_csv(burst_hashtags(corpus, cfg.burst_top)));
  });

  run_stage("train", [&](StageCtx& ctx) {
    std::vector<LabeledTweet> data;
    if (cfg.gold) {
      std::unordered_map<std::string_view, std::size_t> by_id;
      by_id.reserve(corpus.size());
      for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus[i].id, i);
      std::size_t missing = 0;
      for (const auto& [id, y] : read_gold_csv(*cfg.gold)) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
          ++missing;
          continue;
        }
        data.push_back({corpus[it->second], y});
      }
      if (missing > 0)
        ctx.warn(std::to_string(missing) + " gold rows reference tweets outside the working corpus");
      if (data.empty()) throw DataError("train: no gold rows match the working corpus");
      ctx.detail["gold_examples"] = data.size();
    } else {
      std::vector<std::size_t> unlabeled;
      std::size_t n_pro = 0, n_anti = 0;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        switch (heuristic_label(corpus[i], lex)) {
          case HeuristicLabel::Pro:
            data.push_back({corpus[i], Stance::Pro});
            ++n_pro;
            break;
          case HeuristicLabel::Anti:
            data.push_back({corpus[i], Stance::Anti});
            ++n_anti;
            break;
          case HeuristicLabel::Unlabeled:
            unlabeled.push_back(i);
            break;
        }
      }
      Rng rng(derive_seed(cfg.seed, "heuristic-neutral"));
      rng.shuffle(unlabeled);
      const std::size_t cap = std::min(unlabeled.size(), std::max(n_pro, n_anti));
      for (std::size_t i = 0; i < cap; ++i)
        data.push_back({corpus[unlabeled[i]], Stance::Neutral});
      ctx.warn("no gold labels configured; trained on lexicon heuristic labels");
      ctx.detail["heuristic_pro"] = n_pro;
      ctx.detail["heuristic_anti"] = n_anti;
      ctx.detail["heuristic_neutral"] = cap;
    }

    TrainOptions opt;
    opt.seed = derive_seed(cfg.seed, "train");
    opt.epochs = cfg.epochs;
    opt.reg = cfg.reg;
    model = train(data, opt);
    ctx.detail["examples"] = data.size();
    ctx.detail["features"] = model.feature_names.size();
    ctx.detail["train_accuracy"] = model.train_accuracy;
    write_output("model.json", model_to_json(model));

    if (cfg.cv_folds >= 2) {
      const EvalReport rep = cross_validate(data, cfg.cv_folds, derive_seed(cfg.seed, "cv"), opt);
      ctx.detail["cv_mean_accuracy"] = rep.mean;
      write_output("cv_report.json", eval_report_to_json(rep));
    }
  });

  run_stage("classify", [&](StageCtx& ctx) {
    preds.reserve(corpus.size());
    std::array<std::size_t, 3> counts{};
    std::string rows = "tweet_id,author_id,day,stance\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const Tweet& t = corpus[i];
      const Stance y = predict(model, t);
      preds.push_back(y);
      ++counts[static_cast<std::size_t>(y)];
      rows += csv_join({t.id, t.author_id, format_day(day_of_timestamp(t.timestamp)),
                        std::string(stance_name(y))});
      rows += '\n';
    }
    write_output("predictions.csv", rows);
    write_output("daily_stance.csv", daily_stance_to_csv(daily_stance_proportions(corpus, model)));
    ctx.detail["pro"] = counts[0];
    ctx.detail["neutral"] = counts[1];
    ctx.detail["anti"] = counts[2];
  });

  run_stage("network", [&](StageCtx& ctx) {
    net_seeds = load_seed_list(cfg.network_seeds);
    const auto snaps = build_snapshots(corpus, cfg.window_days, cfg.step_days);
    if (snaps.empty()) {
      ctx.skip("no repost events in corpus");
      return;
    }
    std::size_t skipped = 0;
    std::vector<std::int32_t> nonconverged;
    std::map<std::string, std::int8_t> warm;
    std::string stats_csv =
        "day,nodes,edges,density,mean_degree,mean_clustering,assortativity,q,sweeps,converged\n";

    for (const auto& snap : snaps) {
      GraphSnapshot g = giant_component(snap);
      bool has0 = false, has1 = false;
      for (const auto& node : g.nodes) {
        const auto it = net_seeds.find(node);
        if (it == net_seeds.end()) continue;
        (it->second == 0 ? has0 : has1) = true;
      }
      if (!has0 || !has1) {
        ++skipped;
        ctx.warn("snapshot " + format_day(g.day) + " skipped: missing a seed side");
        continue;
      }
      const auto res = label_propagation(
          g, net_seeds, warm.empty() ? nullptr : &warm,
          mix_seed(derive_seed(cfg.seed, "propagation"),
                   static_cast<std::uint64_t>(static_cast<std::int64_t>(g.day))));
      if (!res.converged) {
        nonconverged.push_back(g.day);
        ctx.warn("snapshot " + format_day(g.day) + " did not converge");
      }
      apply_labeling(g, res, net_seeds);

      const bool complete =
          std::none_of(g.labels.begin(), g.labels.end(),
                       [](std::int8_t l) { return l == kLabelUnassigned; });
      const double q = complete ? modularity(g, g.labels) : std::nan("");

      const std::string day = format_day(g.day);
      write_output("snapshots/" + day + "_edges.csv", snapshot_edges_csv(g));
      write_output("snapshots/" + day + "_labels.csv", snapshot_labels_csv(g));

      const GraphStats st = graph_stats(g);
      stats_csv += csv_join({day, std::to_string(g.nodes.size()), std::to_string(g.edges.size()),
                             fmt_double(st.density), fmt_double(st.mean_degree),
                             fmt_double(st.mean_clustering),
                             std::isnan(st.assortativity) ? std::string() : fmt_double(st.assortativity),
                             std::isnan(q) ? std::string() : fmt_double(q),
                             std::to_string(res.sweeps), res.converged ? "1" : "0"});
      stats_csv += '\n';

      warm = labels_by_node(g);
      processed.push_back(std::move(g));
    }

    write_output("graph_stats.csv", stats_csv);
    ctx.detail["snapshots"] = snaps.size();
    ctx.detail["processed"] = processed.size();
    ctx.detail["skipped"] = skipped;

    if (processed.empty()) {
      ctx.warn("no snapshot had both seed sides; downstream network outputs unavailable");
    } else if (cfg.n_surrogates >= 2) {
      const QReport rep = surrogate_zscore(processed.front(), net_seeds, cfg.n_surrogates,
                                           derive_seed(cfg.seed, "surrogate-report"));
      write_output("qreport.json", qreport_to_json(rep));
      ctx.detail["qreport_day"] = format_day(processed.front().day);
      ctx.detail["q_actual"] = rep.q_actual;
      ctx.detail["q_z"] = std::isnan(rep.z) ? json() : json(rep.z);
    }

    if (cfg.strict && !nonconverged.empty())
      throw ConvergenceError("label propagation hit the sweep cap for " +
                             std::to_string(nonconverged.size()) + " snapshot(s)");
  });

  run_stage("dynamics", [&](StageCtx& ctx) {
    std::string summary = "n,users_examined,pro_to_anti,anti_to_pro,switch_fraction\n";
    for (const int n : cfg.n_thresholds) {
      const SwitchReport rep = content_switches(corpus, preds, n);
      summary += csv_join({std::to_string(n), std::to_string(rep.users_examined),
                           std::to_string(rep.pro_to_anti), std::to_string(rep.anti_to_pro),
                           fmt_double(rep.switch_fraction)});
      summary += '\n';
      write_output("switch_records_n" + std::to_string(n) + ".csv", switch_records_to_csv(rep));
    }
    write_output("switches_content.csv", summary);

    if (processed.empty()) {
      ctx.warn("no labeled snapshots; community, soft-label, and correlation outputs skipped");
      return;
    }

    std::vector<GraphSnapshot> complete;
    for (const auto& g : processed) {
      if (std::none_of(g.labels.begin(), g.labels.end(),
                       [](std::int8_t l) { return l == kLabelUnassigned; }))
        complete.push_back(g);
    }
    if (!complete.empty())
      write_output("community_sizes.csv", community_sizes_to_csv(community_sizes(complete)));
    else
      ctx.warn("no fully labeled snapshot; community_sizes.csv skipped");

    if (processed.size() >= 2) {
      std::vector<std::pair<std::int32_t, std::optional<SwitchRatio>>> series;
      auto prev = labels_by_node(processed.front());
      for (std::size_t i = 1; i < processed.size(); ++i) {
        auto cur = labels_by_node(processed[i]);
        series.emplace_back(processed[i].day, network_switch_ratio(prev, cur));
        prev = std::move(cur);
      }
      write_output("switch_ratio.csv", switch_ratio_series_to_csv(series));
    }

    const std::int32_t t0 =
        cfg.softlabel_from ? parse_day(*cfg.softlabel_from) : processed.front().day;
    const std::int32_t tf =
        cfg.softlabel_to ? parse_day(*cfg.softlabel_to) : processed.back().day;
    const SoftLabelTable tbl = soft_labels(processed, t0, tf);
    write_output("softlabels.csv", soft_labels_to_csv(tbl));
    write_output("leaning_histogram.csv", histogram_to_csv(leaning_histogram(tbl, cfg.bin_width)));
    ctx.detail["softlabel_users"] = tbl.size();
    ctx.detail["softlabel_from"] = format_day(t0);
    ctx.detail["softlabel_to"] = format_day(tf);

    try {
      const CorrelationResult corr = content_network_correlation(content_polarity(corpus, preds), tbl);
      write_output("correlation.json", correlation_to_json(corr));
      write_output("correlation_pairs.csv", correlation_pairs_to_csv(corr));
      ctx.detail["correlation_r"] = corr.r;
      ctx.detail["correlation_n"] = corr.n;
    } catch (const std::invalid_argument& e) {
      ctx.warn(std::string("correlation skipped: ") + e.what());
    } catch (const DataError& e) {
      ctx.warn(std::string("correlation skipped: ") + e.what());
    }
  });

  RunResult result;
  result.output_dir = cfg.output_dir;
  result.manifest = write_manifest("ok", "");
  return result;
}

}  // namespace poldyn
