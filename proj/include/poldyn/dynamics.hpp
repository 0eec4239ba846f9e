#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poldyn/classifier.hpp"
#include "poldyn/corpus.hpp"
#include "poldyn/graph.hpp"

namespace poldyn {

struct CommunitySizeRow {
  std::int32_t day = 0;
  std::int64_t count0 = 0;        // label-0 nodes
  std::int64_t count1 = 0;        // label-1 nodes
  std::int64_t network_size = 0;  // count0 + count1
};

// Per-snapshot community sizes. Every node must be labeled 0 or 1.
std::vector<CommunitySizeRow> community_sizes(const std::vector<GraphSnapshot>& snapshots);
std::string community_sizes_to_csv(const std::vector<CommunitySizeRow>& rows);

enum class SwitchVerdict { None, ProToAnti, AntiToPro };

struct SwitchRecord {
  std::string user;
  double first_score = 0.0;  // fraction Anti in the first third
  double last_score = 0.0;   // fraction Anti in the last third
  SwitchVerdict verdict = SwitchVerdict::None;
};

struct SwitchReport {
  int n_threshold = 0;
  std::size_t users_examined = 0;
  std::size_t pro_to_anti = 0;
  std::size_t anti_to_pro = 0;
  double switch_fraction = 0.0;  // (pro_to_anti + anti_to_pro) / users_examined
  std::vector<SwitchRecord> records;  // one per examined user, user order
};

// First/last-third stance comparison per user. `preds` is aligned to
// c.tweets(). Neutral predictions are dropped; users with fewer than n
// remaining tweets are not examined. Outer thirds take ceil(k/3) and
// floor(k/3) tweets; a switch to Anti needs first < 0.5 and last > 0.5
// (symmetric for Pro), an exact 0.5 never switches. n >= 3.
SwitchReport content_switches(const Corpus& c, const std::vector<Stance>& preds, int n);
SwitchReport content_switches(const Corpus& c, const StanceModel& m, int n);

std::string switch_report_to_json(const SwitchReport& report);
std::string switch_records_to_csv(const SwitchReport& report);

struct SwitchRatio {
  double ratio = 0.0;  // changed / common nodes
  std::size_t common_nodes = 0;
  std::size_t changed = 0;
  std::optional<double> frac_0to1;  // over changed nodes; absent when none changed
  std::optional<double> frac_1to0;
};

// Label agreement between two consecutive labelings over their common nodes
// (entries labeled 0/1 only). Empty intersection yields nullopt.
std::optional<SwitchRatio> network_switch_ratio(
    const std::map<std::string, std::int8_t>& prev,
    const std::map<std::string, std::int8_t>& cur);

std::string switch_ratio_series_to_csv(
    const std::vector<std::pair<std::int32_t, std::optional<SwitchRatio>>>& series);

struct SoftLabelEntry {
  double leaning = 0.0;  // fraction of present snapshots with label 1
  std::int64_t snapshots_present = 0;
  double mean_strength = 0.0;  // reposts made per snapshot present
};

using SoftLabelTable = std::map<std::string, SoftLabelEntry>;

// Aggregates labeled snapshots whose day lies in [t0, tf]. A user is present
// in a snapshot when labeled 0 or 1 there; strength sums the weights of the
// user's outgoing edges.
SoftLabelTable soft_labels(const std::vector<GraphSnapshot>& snapshots, std::int32_t t0,
                           std::int32_t tf);
std::string soft_labels_to_csv(const SoftLabelTable& tbl);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t count = 0;
  std::optional<double> mean_strength;  // absent for empty bins
};

// Bins [k*bw, (k+1)*bw) over leanings, the final bin closed at 1.
// 0 < bin_width <= 1.
std::vector<HistogramBin> leaning_histogram(const SoftLabelTable& tbl, double bin_width);
std::string histogram_to_csv(const std::vector<HistogramBin>& bins);

// Per user, fraction of Anti among their Pro/Anti-classified tweets; users
// with no classified tweet are absent.
std::map<std::string, double> content_polarity(const Corpus& c,
                                               const std::vector<Stance>& preds);

struct CorrelationResult {
  double r = 0.0;
  std::size_t n = 0;
  // (user, content polarity, network leaning), one per common user
  std::vector<std::tuple<std::string, double, double>> pairs;
};

// Pearson correlation between content polarity and soft network leaning over
// the users present in both maps. Needs >= 2 common users; zero variance on
// either axis raises DataError naming the axis.
CorrelationResult content_network_correlation(const std::map<std::string, double>& polarity,
                                              const SoftLabelTable& tbl);
std::string correlation_to_json(const CorrelationResult& result);
std::string correlation_pairs_to_csv(const CorrelationResult& result);

}  // namespace poldyn
