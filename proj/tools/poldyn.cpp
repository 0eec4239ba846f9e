#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poldyn/classifier.hpp"
#include "poldyn/corpus.hpp"
#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/dynamics.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/graph.hpp"
#include "poldyn/lexicon.hpp"
#include "poldyn/pipeline.hpp"
#include "poldyn/query.hpp"
#include "poldyn/rng.hpp"
#include "poldyn/synthgen.hpp"

namespace {

namespace fs = std::filesystem;
using namespace poldyn;

NormalizationRules load_rules_opt(const std::string& path) {
  return path.empty() ? NormalizationRules{} : NormalizationRules::load(path);
}

Corpus load_corpus(const std::string& input, const NormalizationRules& rules) {
  return std::move(read_corpus_file(input, rules).corpus);
}

// Snapshot chain shared by `network` and `communities`: giant components in
// day order, warm-started propagation, seeds applied. Snapshots missing a
// seed side are reported and skipped.
struct ChainResult {
  std::vector<GraphSnapshot> processed;
  std::vector<PropagationResult> runs;
  std::size_t total = 0;
  std::size_t skipped = 0;
  std::size_t nonconverged = 0;
};

ChainResult process_snapshots(const Corpus& c, const SeedList& seeds, int window, int step,
                              std::uint64_t seed, int max_sweeps) {
  ChainResult out;
  const auto snaps = build_snapshots(c, window, step);
  out.total = snaps.size();
  std::map<std::string, std::int8_t> warm;
  for (const auto& snap : snaps) {
    GraphSnapshot g = giant_component(snap);
    bool has0 = false, has1 = false;
    for (const auto& node : g.nodes) {
      const auto it = seeds.find(node);
      if (it == seeds.end()) continue;
      (it->second == 0 ? has0 : has1) = true;
    }
    if (!has0 || !has1) {
      std::fprintf(stderr, "snapshot %s skipped: missing a seed side\n", format_day(g.day).c_str());
      ++out.skipped;
      continue;
    }
    auto res = label_propagation(
        g, seeds, warm.empty() ? nullptr : &warm,
        mix_seed(derive_seed(seed, "propagation"),
                 static_cast<std::uint64_t>(static_cast<std::int64_t>(g.day))),
        max_sweeps);
    if (!res.converged) ++out.nonconverged;
    apply_labeling(g, res, seeds);
    warm = labels_by_node(g);
    out.processed.push_back(std::move(g));
    out.runs.push_back(std::move(res));
  }
  return out;
}

SoftLabelTable soft_labels_from_csv(const std::string& path) {
  const auto rows = csv_read_file(path);
  if (rows.empty() ||
      rows[0] != std::vector<std::string>{"user", "leaning", "snapshots_present", "mean_strength"})
    throw DataError(path + ": expected header user,leaning,snapshots_present,mean_strength");
  SoftLabelTable tbl;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 4)
      throw DataError(path + ": row " + std::to_string(i + 1) + ": expected 4 fields");
    SoftLabelEntry e;
    try {
      e.leaning = std::stod(rows[i][1]);
      e.snapshots_present = std::stoul(rows[i][2]);
      e.mean_strength = std::stod(rows[i][3]);
    } catch (const std::exception&) {
      throw DataError(path + ": row " + std::to_string(i + 1) + ": malformed number");
    }
    tbl[rows[i][0]] = e;
  }
  return tbl;
}

std::vector<GraphSnapshot> load_snapshot_dir(const std::string& dir) {
  std::map<std::int32_t, fs::path> labels_files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() != 21 || name.substr(10) != "_labels.csv") continue;
    labels_files.emplace(parse_day(name.substr(0, 10)), entry.path());
  }
  if (labels_files.empty()) throw DataError(dir + ": no snapshot label files (YYYY-MM-DD_labels.csv)");
  std::vector<GraphSnapshot> out;
  for (const auto& [day, labels_path] : labels_files) {
    fs::path edges_path = labels_path;
    edges_path.replace_filename(format_day(day) + "_edges.csv");
    out.push_back(snapshot_from_csv(day, read_text_file(edges_path.string()),
                                    read_text_file(labels_path.string())));
  }
  return out;
}

void print_stage_summary(const nlohmann::json& manifest) {
  for (const auto& st : manifest.at("stages")) {
    std::printf("stage %-9s %-7s %6.2fs", st.at("name").get<std::string>().c_str(),
                st.at("status").get<std::string>().c_str(), st.at("seconds").get<double>());
    const auto& warnings = st.at("warnings");
    if (!warnings.empty()) std::printf("  (%zu warning%s)", warnings.size(), warnings.size() == 1 ? "" : "s");
    std::printf("\n");
    for (const auto& w : warnings)
      std::fprintf(stderr, "  warning: %s\n", w.get<std::string>().c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"content and network polarization pipeline"};
  app.set_version_flag("--version", std::string("poldyn ") + std::string(kPoldynVersion));
  app.require_subcommand(1);

  // run
  auto run_cfg = std::make_shared<std::string>();
  auto run_out = std::make_shared<std::string>();
  auto run_seed = std::make_shared<std::uint64_t>(0);
  auto run_strict = std::make_shared<bool>(false);
  auto* run = app.add_subcommand("run", "run the full pipeline from a config file");
  run->add_option("--config", *run_cfg, "pipeline config JSON")->required();
  auto* run_out_opt = run->add_option("--out", *run_out, "override the configured output directory");
  auto* run_seed_opt = run->add_option("--seed", *run_seed, "override the configured seed");
  run->add_flag("--strict", *run_strict, "fail (exit 4) if label propagation does not converge");
  run->callback([=]() {
    PipelineConfig cfg = load_pipeline_config(*run_cfg);
    if (const char* env = std::getenv("POLDYN_OUT_DIR"); env && *env) cfg.output_dir = env;
    if (run_out_opt->count() > 0) cfg.output_dir = *run_out;
    if (run_seed_opt->count() > 0) cfg.seed = *run_seed;
    cfg.strict = cfg.strict || *run_strict;
    const RunResult res = run_pipeline(cfg);
    print_stage_summary(res.manifest);
    std::printf("wrote %s (%zu files + manifest.json)\n", res.output_dir.c_str(),
                res.manifest.at("files").size());
  });

  // ingest
  auto in_input = std::make_shared<std::string>();
  auto in_rules = std::make_shared<std::string>();
  auto in_out = std::make_shared<std::string>();
  auto in_min_posts = std::make_shared<int>(0);
  auto in_active = std::make_shared<std::string>();
  auto* ingest = app.add_subcommand("ingest", "read a corpus and report ingest statistics");
  ingest->add_option("--input", *in_input, "corpus file (.jsonl or .csv)")->required();
  ingest->add_option("--rules", *in_rules, "normalization rules JSON");
  ingest->add_option("--out", *in_out, "write the normalized corpus as JSONL");
  ingest->add_option("--min-posts", *in_min_posts, "report users with strictly more posts than this");
  ingest->add_option("--active-users", *in_active, "write the active-user list to this file");
  ingest->callback([=]() {
    const auto rules = load_rules_opt(*in_rules);
    const IngestResult res = read_corpus_file(*in_input, rules);
    nlohmann::json stats;
    stats["records"] = res.stats.records;
    stats["duplicates"] = res.stats.duplicates;
    stats["self_reposts"] = res.stats.self_reposts;
    stats["tweets"] = res.corpus.size();
    stats["users"] = res.corpus.by_author().size();
    if (!res.corpus.empty()) {
      stats["first_day"] = format_day(res.corpus.first_day());
      stats["last_day"] = format_day(res.corpus.last_day());
    }
    if (*in_min_posts > 0) {
      const auto active = select_active_users(res.corpus, *in_min_posts);
      stats["active_users"] = active.size();
      if (!in_active->empty()) {
        std::string text;
        for (const auto& u : active) {
          text += u;
          text += '\n';
        }
        write_text_file(*in_active, text);
      }
    }
    if (!in_out->empty()) write_corpus_jsonl(res.corpus, *in_out);
    std::printf("%s\n", stats.dump(2).c_str());
  });

  // filter
  auto fl_input = std::make_shared<std::string>();
  auto fl_queries = std::make_shared<std::string>();
  auto fl_rules = std::make_shared<std::string>();
  auto fl_out = std::make_shared<std::string>();
  auto* filter = app.add_subcommand("filter", "keep tweets matching any query");
  filter->add_option("--input", *fl_input, "corpus file")->required();
  filter->add_option("--queries", *fl_queries, "query file, one query per line")->required();
  filter->add_option("--rules", *fl_rules, "normalization rules JSON");
  filter->add_option("--out", *fl_out, "output JSONL")->required();
  filter->callback([=]() {
    const auto rules = load_rules_opt(*fl_rules);
    const Corpus corpus = load_corpus(*fl_input, rules);
    const auto queries = load_queries(*fl_queries, rules);
    const Corpus kept = filter_corpus(corpus, queries);
    write_corpus_jsonl(kept, *fl_out);
    std::printf("kept %zu of %zu tweets\n", kept.size(), corpus.size());
  });

  // lexicon
  auto lx_input = std::make_shared<std::string>();
  auto lx_pro = std::make_shared<std::string>();
  auto lx_anti = std::make_shared<std::string>();
  auto lx_rules = std::make_shared<std::string>();
  auto lx_out = std::make_shared<std::string>();
  auto lx_iter = std::make_shared<int>(4);
  auto lx_min = std::make_shared<int>(3);
  auto lx_bursts = std::make_shared<std::string>();
  auto lx_top = std::make_shared<int>(20);
  auto* lexicon = app.add_subcommand("lexicon", "expand stance lexicons from seed terms");
  lexicon->add_option("--input", *lx_input, "corpus file")->required();
  lexicon->add_option("--seed-pro", *lx_pro, "pro seed term file")->required();
  lexicon->add_option("--seed-anti", *lx_anti, "anti seed term file")->required();
  lexicon->add_option("--rules", *lx_rules, "normalization rules JSON");
  lexicon->add_option("--out", *lx_out, "output lexicon JSON")->required();
  lexicon->add_option("--iterations", *lx_iter, "expansion iterations (default 4)");
  lexicon->add_option("--min-count", *lx_min, "document threshold per new term (default 3)");
  lexicon->add_option("--bursts", *lx_bursts, "also write the top bursting hashtags CSV");
  lexicon->add_option("--top", *lx_top, "bursting hashtags to keep (default 20)");
  lexicon->callback([=]() {
    const auto rules = load_rules_opt(*lx_rules);
    const Corpus corpus = load_corpus(*lx_input, rules);
    const auto lex = expand_lexicons(corpus, load_term_list(*lx_pro, rules),
                                     load_term_list(*lx_anti, rules), *lx_iter, *lx_min);
    write_text_file(*lx_out, lexicon_to_json(lex));
    if (!lx_bursts->empty())
      write_text_file(*lx_bursts, burst_to_csv(burst_hashtags(corpus, *lx_top)));
    std::printf("pro %zu terms, anti %zu terms, labeled fraction %.4f\n", lex.pro.size(),
                lex.anti.size(), labeled_fraction(corpus, lex));
  });

  // train
  auto tr_input = std::make_shared<std::string>();
  auto tr_gold = std::make_shared<std::string>();
  auto tr_rules = std::make_shared<std::string>();
  auto tr_out = std::make_shared<std::string>();
  auto tr_epochs = std::make_shared<int>(40);
  auto tr_reg = std::make_shared<double>(1e-4);
  auto tr_seed = std::make_shared<std::uint64_t>(0);
  auto tr_cv = std::make_shared<int>(0);
  auto tr_cv_report = std::make_shared<std::string>();
  auto* train_cmd = app.add_subcommand("train", "train the stance classifier on gold labels");
  train_cmd->add_option("--input", *tr_input, "corpus file")->required();
  train_cmd->add_option("--gold", *tr_gold, "gold labels CSV (tweet_id,class)")->required();
  train_cmd->add_option("--rules", *tr_rules, "normalization rules JSON");
  train_cmd->add_option("--out", *tr_out, "output model JSON")->required();
  train_cmd->add_option("--epochs", *tr_epochs, "training epochs (default 40)");
  train_cmd->add_option("--reg", *tr_reg, "L2 regularization (default 1e-4)");
  train_cmd->add_option("--seed", *tr_seed, "rng seed (default 0)");
  train_cmd->add_option("--cv", *tr_cv, "also run k-fold cross-validation");
  train_cmd->add_option("--cv-report", *tr_cv_report, "cross-validation report JSON");
  train_cmd->callback([=]() {
    const auto rules = load_rules_opt(*tr_rules);
    const Corpus corpus = load_corpus(*tr_input, rules);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < corpus.size(); ++i) by_id.emplace(corpus[i].id, i);
    std::vector<LabeledTweet> data;
    std::size_t missing = 0;
    for (const auto& [id, y] : read_gold_csv(*tr_gold)) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        ++missing;
        continue;
      }
      data.push_back({corpus[it->second], y});
    }
    if (missing > 0)
      std::fprintf(stderr, "warning: %zu gold rows reference tweets outside the corpus\n", missing);
    if (data.empty()) throw DataError("train: no gold rows match the corpus");
    TrainOptions opt;
    opt.seed = derive_seed(*tr_seed, "train");
    opt.epochs = *tr_epochs;
    opt.reg = *tr_reg;
    const StanceModel model = train(data, opt);
    save_model(model, *tr_out);
    std::printf("trained on %zu examples, %zu features, train accuracy %.4f\n", data.size(),
                model.feature_names.size(), model.train_accuracy);
    if (*tr_cv >= 2) {
      const EvalReport rep = cross_validate(data, *tr_cv, derive_seed(*tr_seed, "cv"), opt);
      if (!tr_cv_report->empty()) write_text_file(*tr_cv_report, eval_report_to_json(rep));
      std::printf("cv mean accuracy %.4f (stddev %.4f over %d folds)\n", rep.mean, rep.stddev, *tr_cv);
    }
  });

  // classify
  auto cl_input = std::make_shared<std::string>();
  auto cl_model = std::make_shared<std::string>();
  auto cl_rules = std::make_shared<std::string>();
  auto cl_out = std::make_shared<std::string>();
  auto cl_daily = std::make_shared<std::string>();
  auto* classify = app.add_subcommand("classify", "predict stances for every tweet");
  classify->add_option("--input", *cl_input, "corpus file")->required();
  classify->add_option("--model", *cl_model, "model JSON")->required();
  classify->add_option("--rules", *cl_rules, "normalization rules JSON");
  classify->add_option("--out", *cl_out, "predictions CSV")->required();
  classify->add_option("--daily", *cl_daily, "also write daily stance proportions CSV");
  classify->callback([=]() {
    const auto rules = load_rules_opt(*cl_rules);
    const Corpus corpus = load_corpus(*cl_input, rules);
    const StanceModel model = load_model(*cl_model);
    std::string rows = "tweet_id,author_id,day,stance\n";
    std::array<std::size_t, 3> counts{};
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const Tweet& t = corpus[i];
      const Stance y = predict(model, t);
      ++counts[static_cast<std::size_t>(y)];
      rows += csv_join({t.id, t.author_id, format_day(day_of_timestamp(t.timestamp)),
                        std::string(stance_name(y))});
      rows += '\n';
    }
    write_text_file(*cl_out, rows);
    if (!cl_daily->empty())
      write_text_file(*cl_daily, daily_stance_to_csv(daily_stance_proportions(corpus, model)));
    std::printf("classified %zu tweets: %zu pro, %zu neutral, %zu anti\n", corpus.size(), counts[0],
                counts[1], counts[2]);
  });

  // network
  auto nw_input = std::make_shared<std::string>();
  auto nw_seeds = std::make_shared<std::string>();
  auto nw_rules = std::make_shared<std::string>();
  auto nw_window = std::make_shared<int>(3);
  auto nw_step = std::make_shared<int>(1);
  auto nw_seed = std::make_shared<std::uint64_t>(0);
  auto nw_sweeps = std::make_shared<int>(100);
  auto nw_out_dir = std::make_shared<std::string>();
  auto nw_stats = std::make_shared<std::string>();
  auto nw_surr = std::make_shared<int>(0);
  auto nw_qreport = std::make_shared<std::string>();
  auto nw_strict = std::make_shared<bool>(false);
  auto* network = app.add_subcommand("network", "build repost snapshots and propagate seed labels");
  network->add_option("--input", *nw_input, "corpus file")->required();
  network->add_option("--seeds", *nw_seeds, "network seed CSV (author_id,label)")->required();
  network->add_option("--rules", *nw_rules, "normalization rules JSON");
  network->add_option("--window", *nw_window, "window length in days (default 3)");
  network->add_option("--step", *nw_step, "window step in days (default 1)");
  network->add_option("--seed", *nw_seed, "rng seed (default 0)");
  network->add_option("--max-sweeps", *nw_sweeps, "propagation sweep cap (default 100)");
  network->add_option("--out-dir", *nw_out_dir, "directory for per-snapshot CSVs")->required();
  network->add_option("--stats", *nw_stats, "per-snapshot statistics CSV");
  network->add_option("--surrogates", *nw_surr, "surrogate count for the first-snapshot Q report");
  network->add_option("--qreport", *nw_qreport, "Q significance report JSON");
  network->add_flag("--strict", *nw_strict, "fail (exit 4) if propagation does not converge");
  network->callback([=]() {
    const auto rules = load_rules_opt(*nw_rules);
    const Corpus corpus = load_corpus(*nw_input, rules);
    const SeedList seeds = load_seed_list(*nw_seeds);
    const ChainResult chain =
        process_snapshots(corpus, seeds, *nw_window, *nw_step, *nw_seed, *nw_sweeps);
    fs::create_directories(*nw_out_dir);
    std::string stats_csv =
        "day,nodes,edges,density,mean_degree,mean_clustering,assortativity,q,sweeps,converged\n";
    for (std::size_t i = 0; i < chain.processed.size(); ++i) {
      const GraphSnapshot& g = chain.processed[i];
      const std::string day = format_day(g.day);
      write_text_file((fs::path(*nw_out_dir) / (day + "_edges.csv")).string(), snapshot_edges_csv(g));
      write_text_file((fs::path(*nw_out_dir) / (day + "_labels.csv")).string(), snapshot_labels_csv(g));
      const bool complete = std::none_of(g.labels.begin(), g.labels.end(),
                                         [](std::int8_t l) { return l == kLabelUnassigned; });
      const double q = complete ? modularity(g, g.labels) : std::nan("");
      const GraphStats st = graph_stats(g);
      stats_csv += csv_join({day, std::to_string(g.nodes.size()), std::to_string(g.edges.size()),
                             fmt_double(st.density), fmt_double(st.mean_degree),
                             fmt_double(st.mean_clustering),
                             std::isnan(st.assortativity) ? std::string() : fmt_double(st.assortativity),
                             std::isnan(q) ? std::string() : fmt_double(q),
                             std::to_string(chain.runs[i].sweeps), chain.runs[i].converged ? "1" : "0"});
      stats_csv += '\n';
    }
    if (!nw_stats->empty()) write_text_file(*nw_stats, stats_csv);
    if (*nw_surr >= 2 && !chain.processed.empty()) {
      const QReport rep = surrogate_zscore(chain.processed.front(), seeds, *nw_surr,
                                           derive_seed(*nw_seed, "surrogate-report"));
      if (!nw_qreport->empty()) write_text_file(*nw_qreport, qreport_to_json(rep));
      std::printf("q_actual %.4f, surrogate mean %.4f, z %.2f\n", rep.q_actual, rep.mean, rep.z);
    }
    std::printf("processed %zu of %zu snapshots (%zu skipped, %zu not converged)\n",
                chain.processed.size(), chain.total, chain.skipped, chain.nonconverged);
    if (*nw_strict && chain.nonconverged > 0)
      throw ConvergenceError("label propagation hit the sweep cap for " +
                             std::to_string(chain.nonconverged) + " snapshot(s)");
  });

  // communities
  auto cm_input = std::make_shared<std::string>();
  auto cm_seeds = std::make_shared<std::string>();
  auto cm_rules = std::make_shared<std::string>();
  auto cm_window = std::make_shared<int>(3);
  auto cm_step = std::make_shared<int>(1);
  auto cm_seed = std::make_shared<std::uint64_t>(0);
  auto cm_out = std::make_shared<std::string>();
  auto cm_ratio = std::make_shared<std::string>();
  auto cm_strict = std::make_shared<bool>(false);
  auto* communities = app.add_subcommand("communities", "community size series from repost snapshots");
  communities->add_option("--input", *cm_input, "corpus file")->required();
  communities->add_option("--seeds", *cm_seeds, "network seed CSV (author_id,label)")->required();
  communities->add_option("--rules", *cm_rules, "normalization rules JSON");
  communities->add_option("--window", *cm_window, "window length in days (default 3)");
  communities->add_option("--step", *cm_step, "window step in days (default 1)");
  communities->add_option("--seed", *cm_seed, "rng seed (default 0)");
  communities->add_option("--out", *cm_out, "community sizes CSV")->required();
  communities->add_option("--switch-ratio", *cm_ratio, "also write the day-over-day switch ratio CSV");
  communities->add_flag("--strict", *cm_strict, "fail (exit 4) if propagation does not converge");
  communities->callback([=]() {
    const auto rules = load_rules_opt(*cm_rules);
    const Corpus corpus = load_corpus(*cm_input, rules);
    const SeedList seeds = load_seed_list(*cm_seeds);
    const ChainResult chain = process_snapshots(corpus, seeds, *cm_window, *cm_step, *cm_seed, 100);
    if (chain.processed.empty()) throw DataError("communities: no usable snapshot");
    std::vector<GraphSnapshot> complete;
    for (const auto& g : chain.processed) {
      if (std::none_of(g.labels.begin(), g.labels.end(),
                       [](std::int8_t l) { return l == kLabelUnassigned; }))
        complete.push_back(g);
    }
    if (complete.empty()) throw DataError("communities: no fully labeled snapshot");
    write_text_file(*cm_out, community_sizes_to_csv(community_sizes(complete)));
    if (!cm_ratio->empty() && chain.processed.size() >= 2) {
      std::vector<std::pair<std::int32_t, std::optional<SwitchRatio>>> series;
      auto prev = labels_by_node(chain.processed.front());
      for (std::size_t i = 1; i < chain.processed.size(); ++i) {
        auto cur = labels_by_node(chain.processed[i]);
        series.emplace_back(chain.processed[i].day, network_switch_ratio(prev, cur));
        prev = std::move(cur);
      }
      write_text_file(*cm_ratio, switch_ratio_series_to_csv(series));
    }
    std::printf("wrote %zu snapshot rows to %s\n", complete.size(), cm_out->c_str());
    if (*cm_strict && chain.nonconverged > 0)
      throw ConvergenceError("label propagation hit the sweep cap for " +
                             std::to_string(chain.nonconverged) + " snapshot(s)");
  });

  // switches
  auto sw_input = std::make_shared<std::string>();
  auto sw_model = std::make_shared<std::string>();
  auto sw_rules = std::make_shared<std::string>();
  auto sw_n = std::make_shared<int>(10);
  auto sw_records = std::make_shared<std::string>();
  auto* switches = app.add_subcommand("switches", "detect per-user content stance switches");
  switches->add_option("--input", *sw_input, "corpus file")->required();
  switches->add_option("--model", *sw_model, "model JSON")->required();
  switches->add_option("--rules", *sw_rules, "normalization rules JSON");
  switches->add_option("--n", *sw_n, "minimum classified tweets per user (default 10)");
  switches->add_option("--records", *sw_records, "per-user records CSV");
  switches->callback([=]() {
    const auto rules = load_rules_opt(*sw_rules);
    const Corpus corpus = load_corpus(*sw_input, rules);
    const StanceModel model = load_model(*sw_model);
    const SwitchReport rep = content_switches(corpus, model, *sw_n);
    if (!sw_records->empty()) write_text_file(*sw_records, switch_records_to_csv(rep));
    std::printf("%s\n", switch_report_to_json(rep).c_str());
  });

  // softlabels
  auto sl_dir = std::make_shared<std::string>();
  auto sl_from = std::make_shared<std::string>();
  auto sl_to = std::make_shared<std::string>();
  auto sl_out = std::make_shared<std::string>();
  auto sl_hist = std::make_shared<std::string>();
  auto sl_bin = std::make_shared<double>(0.05);
  auto* softlabels_cmd = app.add_subcommand("softlabels", "per-user soft labels from stored snapshots");
  softlabels_cmd->add_option("--snapshots", *sl_dir, "directory of YYYY-MM-DD_{edges,labels}.csv")->required();
  softlabels_cmd->add_option("--from", *sl_from, "first day (YYYY-MM-DD, default: earliest)");
  softlabels_cmd->add_option("--to", *sl_to, "last day (YYYY-MM-DD, default: latest)");
  softlabels_cmd->add_option("--out", *sl_out, "soft labels CSV")->required();
  softlabels_cmd->add_option("--histogram", *sl_hist, "also write the leaning histogram CSV");
  softlabels_cmd->add_option("--bin-width", *sl_bin, "histogram bin width (default 0.05)");
  softlabels_cmd->callback([=]() {
    const auto snaps = load_snapshot_dir(*sl_dir);
    const std::int32_t t0 = sl_from->empty() ? snaps.front().day : parse_day(*sl_from);
    const std::int32_t tf = sl_to->empty() ? snaps.back().day : parse_day(*sl_to);
    const SoftLabelTable tbl = soft_labels(snaps, t0, tf);
    write_text_file(*sl_out, soft_labels_to_csv(tbl));
    if (!sl_hist->empty())
      write_text_file(*sl_hist, histogram_to_csv(leaning_histogram(tbl, *sl_bin)));
    std::printf("soft labels for %zu users over [%s, %s]\n", tbl.size(), format_day(t0).c_str(),
                format_day(tf).c_str());
  });

  // correlate
  auto co_input = std::make_shared<std::string>();
  auto co_model = std::make_shared<std::string>();
  auto co_rules = std::make_shared<std::string>();
  auto co_soft = std::make_shared<std::string>();
  auto co_out = std::make_shared<std::string>();
  auto co_pairs = std::make_shared<std::string>();
  auto* correlate = app.add_subcommand("correlate", "correlate content polarity with network leaning");
  correlate->add_option("--input", *co_input, "corpus file")->required();
  correlate->add_option("--model", *co_model, "model JSON")->required();
  correlate->add_option("--rules", *co_rules, "normalization rules JSON");
  correlate->add_option("--softlabels", *co_soft, "soft labels CSV")->required();
  correlate->add_option("--out", *co_out, "correlation report JSON");
  correlate->add_option("--pairs", *co_pairs, "per-user pairs CSV");
  correlate->callback([=]() {
    const auto rules = load_rules_opt(*co_rules);
    const Corpus corpus = load_corpus(*co_input, rules);
    const StanceModel model = load_model(*co_model);
    std::vector<Stance> preds;
    preds.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) preds.push_back(predict(model, corpus[i]));
    const CorrelationResult corr =
        content_network_correlation(content_polarity(corpus, preds), soft_labels_from_csv(*co_soft));
    if (!co_out->empty()) write_text_file(*co_out, correlation_to_json(corr));
    if (!co_pairs->empty()) write_text_file(*co_pairs, correlation_pairs_to_csv(corr));
    std::printf("r %.4f over %zu users\n", corr.r, corr.n);
  });

  // synth
  auto sy_spec = std::make_shared<std::string>();
  auto sy_out = std::make_shared<std::string>();
  auto sy_seed = std::make_shared<std::uint64_t>(0);
  auto* synth = app.add_subcommand("synth", "generate a synthetic scenario bundle");
  synth->add_option("--spec", *sy_spec, "scenario spec JSON")->required();
  synth->add_option("--out", *sy_out, "bundle output directory")->required();
  auto* sy_seed_opt = synth->add_option("--seed", *sy_seed, "override the spec seed");
  synth->callback([=]() {
    ScenarioSpec spec = load_scenario_spec(*sy_spec);
    if (sy_seed_opt->count() > 0) spec.seed = *sy_seed;
    const Scenario s = generate(spec);
    write_scenario_bundle(s, *sy_out);
    std::printf("wrote %zu tweets for %d users over %d days to %s\n", s.corpus.size(), spec.users,
                spec.days, sy_out->c_str());
  });

  // report
  auto rp_manifest = std::make_shared<std::string>();
  auto rp_verify = std::make_shared<bool>(false);
  auto* report = app.add_subcommand("report", "summarize a pipeline manifest");
  report->add_option("--manifest", *rp_manifest, "manifest.json path")->required();
  report->add_flag("--verify", *rp_verify, "recompute output hashes and fail on any mismatch");
  report->callback([=]() {
    nlohmann::json m;
    try {
      m = nlohmann::json::parse(read_text_file(*rp_manifest));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(*rp_manifest + ": invalid JSON: " + e.what());
    }
    std::printf("format %s version %s, config %s, seed %llu, status %s\n",
                m.at("format").get<std::string>().c_str(), m.at("version").get<std::string>().c_str(),
                m.at("config_hash").get<std::string>().c_str(),
                static_cast<unsigned long long>(m.at("seed").get<std::uint64_t>()),
                m.at("status").get<std::string>().c_str());
    print_stage_summary(m);
    const fs::path base = fs::path(*rp_manifest).parent_path();
    const auto& files = m.at("files");
    std::printf("%zu declared files\n", files.size());
    if (*rp_verify) {
      std::size_t bad = 0;
      for (const auto& [rel, hash] : files.items()) {
        const fs::path p = base / rel;
        if (!fs::exists(p)) {
          std::printf("MISSING  %s\n", rel.c_str());
          ++bad;
          continue;
        }
        if (format_hash64(fnv1a64(read_text_file(p.string()))) != hash.get<std::string>()) {
          std::printf("MISMATCH %s\n", rel.c_str());
          ++bad;
        }
      }
      if (bad > 0) throw DataError("report: " + std::to_string(bad) + " file(s) failed verification");
      std::printf("verified %zu files\n", files.size());
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const QuerySyntaxError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
