#include "poldyn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"

namespace poldyn {

std::vector<CommunitySizeRow> community_sizes(const std::vector<GraphSnapshot>& snapshots) {
  std::vector<CommunitySizeRow> rows;
  for (const auto& g : snapshots) {
    CommunitySizeRow row;
    row.day = g.day;
    for (const std::int8_t label : g.labels) {
      if (label == 0) {
        ++row.count0;
      } else if (label == 1) {
        ++row.count1;
      } else {
        throw std::invalid_argument("community_sizes: snapshot has an unlabeled node");
      }
    }
    row.network_size = row.count0 + row.count1;
    rows.push_back(row);
  }
  return rows;
}

std::string community_sizes_to_csv(const std::vector<CommunitySizeRow>& rows) {
  std::string out = "day,count0,count1,network_size\n";
  for (const auto& row : rows) {
    out += csv_join({format_day(row.day), std::to_string(row.count0),
                     std::to_string(row.count1), std::to_string(row.network_size)});
    out.push_back('\n');
  }
  return out;
}

SwitchReport content_switches(const Corpus& c, const std::vector<Stance>& preds, int n) {
  if (n < 3) throw std::invalid_argument("content_switches: n must be >= 3");
  if (preds.size() != c.size()) {
    throw std::invalid_argument("content_switches: predictions/corpus size mismatch");
  }
  SwitchReport report;
  report.n_threshold = n;
  for (const auto& [user, positions] : c.by_author()) {
    std::vector<bool> anti;  // per classified tweet, chronological
    for (const std::size_t pos : positions) {
      if (preds[pos] == Stance::Pro) {
        anti.push_back(false);
      } else if (preds[pos] == Stance::Anti) {
        anti.push_back(true);
      }
    }
    const std::size_t k = anti.size();
    if (k < static_cast<std::size_t>(n)) continue;
    const std::size_t first_len = (k + 2) / 3;  // ceil(k/3)
    const std::size_t last_len = k / 3;         // floor(k/3)
    const auto anti_fraction = [&](std::size_t begin, std::size_t len) {
      std::size_t count = 0;
      for (std::size_t i = begin; i < begin + len; ++i) count += anti[i] ? 1 : 0;
      return static_cast<double>(count) / static_cast<double>(len);
    };
    SwitchRecord record;
    record.user = user;
    record.first_score = anti_fraction(0, first_len);
    record.last_score = anti_fraction(k - last_len, last_len);
    if (record.first_score < 0.5 && record.last_score > 0.5) {
      record.verdict = SwitchVerdict::ProToAnti;
      ++report.pro_to_anti;
    } else if (record.first_score > 0.5 && record.last_score < 0.5) {
      record.verdict = SwitchVerdict::AntiToPro;
      ++report.anti_to_pro;
    }
    report.records.push_back(std::move(record));
  }
  report.users_examined = report.records.size();
  report.switch_fraction =
      report.users_examined == 0
          ? 0.0
          : static_cast<double>(report.pro_to_anti + report.anti_to_pro) /
                static_cast<double>(report.users_examined);
  return report;
}

SwitchReport content_switches(const Corpus& c, const StanceModel& m, int n) {
  std::vector<Stance> preds;
  preds.reserve(c.size());
  for (const auto& t : c.tweets()) preds.push_back(predict(m, t));
  return content_switches(c, preds, n);
}

namespace {

const char* verdict_name(SwitchVerdict v) {
  switch (v) {
    case SwitchVerdict::ProToAnti:
      return "pro_to_anti";
    case SwitchVerdict::AntiToPro:
      return "anti_to_pro";
    default:
      return "none";
  }
}

}  // namespace

std::string switch_report_to_json(const SwitchReport& report) {
  nlohmann::json doc;
  doc["n_threshold"] = report.n_threshold;
  doc["users_examined"] = report.users_examined;
  doc["pro_to_anti"] = report.pro_to_anti;
  doc["anti_to_pro"] = report.anti_to_pro;
  doc["switch_fraction"] = report.switch_fraction;
  return doc.dump(2) + "\n";
}

std::string switch_records_to_csv(const SwitchReport& report) {
  std::string out = "user,first_score,last_score,verdict\n";
  for (const auto& record : report.records) {
    out += csv_join({record.user, fmt_double(record.first_score),
                     fmt_double(record.last_score), verdict_name(record.verdict)});
    out.push_back('\n');
  }
  return out;
}

std::optional<SwitchRatio> network_switch_ratio(
    const std::map<std::string, std::int8_t>& prev,
    const std::map<std::string, std::int8_t>& cur) {
  SwitchRatio out;
  std::size_t to1 = 0, to0 = 0;
  auto pit = prev.begin();
  auto cit = cur.begin();
  while (pit != prev.end() && cit != cur.end()) {
    if (pit->first < cit->first) {
      ++pit;
      continue;
    }
    if (cit->first < pit->first) {
      ++cit;
      continue;
    }
    const std::int8_t a = pit->second;
    const std::int8_t b = cit->second;
    if ((a == 0 || a == 1) && (b == 0 || b == 1)) {
      ++out.common_nodes;
      if (a != b) {
        ++out.changed;
        (a == 0 ? to1 : to0) += 1;
      }
    }
    ++pit;
    ++cit;
  }
  if (out.common_nodes == 0) return std::nullopt;
  out.ratio = static_cast<double>(out.changed) / static_cast<double>(out.common_nodes);
  if (out.changed > 0) {
    out.frac_0to1 = static_cast<double>(to1) / static_cast<double>(out.changed);
    out.frac_1to0 = static_cast<double>(to0) / static_cast<double>(out.changed);
  }
  return out;
}

std::string switch_ratio_series_to_csv(
    const std::vector<std::pair<std::int32_t, std::optional<SwitchRatio>>>& series) {
  std::string out = "day,ratio,common_nodes,changed,frac_0to1,frac_1to0\n";
  for (const auto& [day, entry] : series) {
    std::vector<std::string> fields{format_day(day)};
    if (entry) {
      fields.push_back(fmt_double(entry->ratio));
      fields.push_back(std::to_string(entry->common_nodes));
      fields.push_back(std::to_string(entry->changed));
      fields.push_back(entry->frac_0to1 ? fmt_double(*entry->frac_0to1) : "");
      fields.push_back(entry->frac_1to0 ? fmt_double(*entry->frac_1to0) : "");
    } else {
      fields.insert(fields.end(), {"", "", "", "", ""});
    }
    out += csv_join(fields);
    out.push_back('\n');
  }
  return out;
}

SoftLabelTable soft_labels(const std::vector<GraphSnapshot>& snapshots, std::int32_t t0,
                           std::int32_t tf) {
  if (t0 > tf) throw std::invalid_argument("soft_labels: t0 must be <= tf");
  struct Acc {
    std::int64_t present = 0;
    std::int64_t label1 = 0;
    std::int64_t reposts = 0;
  };
  std::map<std::string, Acc> acc;
  for (const auto& g : snapshots) {
    if (g.day < t0 || g.day > tf) continue;
    std::vector<std::int64_t> out_weight(g.nodes.size(), 0);
    for (const auto& e : g.edges) out_weight[e.src] += e.weight;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const std::int8_t label = g.labels[i];
      if (label != 0 && label != 1) continue;
      auto& a = acc[g.nodes[i]];
      ++a.present;
      if (label == 1) ++a.label1;
      a.reposts += out_weight[i];
    }
  }
  SoftLabelTable tbl;
  for (const auto& [user, a] : acc) {
    SoftLabelEntry entry;
    entry.snapshots_present = a.present;
    entry.leaning = static_cast<double>(a.label1) / static_cast<double>(a.present);
    entry.mean_strength = static_cast<double>(a.reposts) / static_cast<double>(a.present);
    tbl[user] = entry;
  }
  return tbl;
}

std::string soft_labels_to_csv(const SoftLabelTable& tbl) {
  std::string out = "user,leaning,snapshots_present,mean_strength\n";
  for (const auto& [user, entry] : tbl) {
    out += csv_join({user, fmt_double(entry.leaning),
                     std::to_string(entry.snapshots_present),
                     fmt_double(entry.mean_strength)});
    out.push_back('\n');
  }
  return out;
}

std::vector<HistogramBin> leaning_histogram(const SoftLabelTable& tbl, double bin_width) {
  if (!(bin_width > 0.0) || bin_width > 1.0) {
    throw std::invalid_argument("leaning_histogram: bin_width must be in (0, 1]");
  }
  const int n_bins = std::max(1, static_cast<int>(std::ceil(1.0 / bin_width - 1e-9)));
  std::vector<HistogramBin> bins(static_cast<std::size_t>(n_bins));
  std::vector<double> strength_sum(static_cast<std::size_t>(n_bins), 0.0);
  for (int k = 0; k < n_bins; ++k) {
    bins[k].lo = static_cast<double>(k) * bin_width;
    bins[k].hi = std::min(static_cast<double>(k + 1) * bin_width, 1.0);
  }
  for (const auto& [user, entry] : tbl) {
    (void)user;
    const double l = entry.leaning;
    int idx = std::min(static_cast<int>(l / bin_width), n_bins - 1);
    while (idx + 1 < n_bins && l >= static_cast<double>(idx + 1) * bin_width) ++idx;
    while (idx > 0 && l < static_cast<double>(idx) * bin_width) --idx;
    ++bins[idx].count;
    strength_sum[idx] += entry.mean_strength;
  }
  for (int k = 0; k < n_bins; ++k) {
    if (bins[k].count > 0) {
      bins[k].mean_strength = strength_sum[k] / static_cast<double>(bins[k].count);
    }
  }
  return bins;
}

std::string histogram_to_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_lo,bin_hi,count,mean_strength\n";
  for (const auto& bin : bins) {
    out += csv_join({fmt_double(bin.lo), fmt_double(bin.hi), std::to_string(bin.count),
                     bin.mean_strength ? fmt_double(*bin.mean_strength) : ""});
    out.push_back('\n');
  }
  return out;
}

std::map<std::string, double> content_polarity(const Corpus& c,
                                               const std::vector<Stance>& preds) {
  if (preds.size() != c.size()) {
    throw std::invalid_argument("content_polarity: predictions/corpus size mismatch");
  }
  std::map<std::string, double> out;
  for (const auto& [user, positions] : c.by_author()) {
    std::int64_t classified = 0, anti = 0;
    for (const std::size_t pos : positions) {
      if (preds[pos] == Stance::Pro) {
        ++classified;
      } else if (preds[pos] == Stance::Anti) {
        ++classified;
        ++anti;
      }
    }
    if (classified > 0) {
      out[user] = static_cast<double>(anti) / static_cast<double>(classified);
    }
  }
  return out;
}

CorrelationResult content_network_correlation(const std::map<std::string, double>& polarity,
                                              const SoftLabelTable& tbl) {
  CorrelationResult result;
  for (const auto& [user, score] : polarity) {
    const auto it = tbl.find(user);
    if (it != tbl.end()) result.pairs.emplace_back(user, score, it->second.leaning);
  }
  result.n = result.pairs.size();
  if (result.n < 2) {
    throw std::invalid_argument(
        "content_network_correlation: fewer than 2 users in the intersection");
  }
  double sum_x = 0.0, sum_y = 0.0;
  for (const auto& [user, x, y] : result.pairs) {
    (void)user;
    sum_x += x;
    sum_y += y;
  }
  const double count = static_cast<double>(result.n);
  const double mean_x = sum_x / count;
  const double mean_y = sum_y / count;
  double var_x = 0.0, var_y = 0.0, cov = 0.0;
  for (const auto& [user, x, y] : result.pairs) {
    (void)user;
    var_x += (x - mean_x) * (x - mean_x);
    var_y += (y - mean_y) * (y - mean_y);
    cov += (x - mean_x) * (y - mean_y);
  }
  if (var_x <= 0.0) {
    throw DataError("content_network_correlation: zero variance on the content polarity axis");
  }
  if (var_y <= 0.0) {
    throw DataError("content_network_correlation: zero variance on the soft label axis");
  }
  result.r = cov / std::sqrt(var_x * var_y);
  return result;
}

std::string correlation_to_json(const CorrelationResult& result) {
  nlohmann::json doc;
  doc["r"] = result.r;
  doc["n"] = result.n;
  return doc.dump(2) + "\n";
}

std::string correlation_pairs_to_csv(const CorrelationResult& result) {
  std::string out = "user,content_polarity,leaning\n";
  for (const auto& [user, x, y] : result.pairs) {
    out += csv_join({user, fmt_double(x), fmt_double(y)});
    out.push_back('\n');
  }
  return out;
}

}  // namespace poldyn
