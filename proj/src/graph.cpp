#include "poldyn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/rng.hpp"

namespace poldyn {

std::int64_t GraphSnapshot::node_index(std::string_view id) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
  if (it == nodes.end() || *it != id) return -1;
  return it - nodes.begin();
}

SeedList load_seed_list(const std::string& path) {
  const auto rows = csv_read_file(path);
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "author_id" ||
      rows[0][1] != "label") {
    throw DataError(path + ": expected CSV header author_id,label");
  }
  SeedList seeds;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2) throw DataError(path + ": row " + std::to_string(r + 1) + " too short");
    const std::string& author = rows[r][0];
    const std::string& label = rows[r][1];
    if (label != "0" && label != "1") {
      throw DataError(path + ": seed label must be 0 or 1, got '" + label + "'");
    }
    const std::int8_t value = label == "1" ? 1 : 0;
    const auto [it, inserted] = seeds.emplace(author, value);
    if (!inserted && it->second != value) {
      throw DataError(path + ": conflicting labels for seed '" + author + "'");
    }
  }
  return seeds;
}

namespace {

GraphSnapshot snapshot_from_weights(
    std::int32_t day,
    const std::map<std::pair<std::string, std::string>, std::int64_t>& weight) {
  GraphSnapshot g;
  g.day = day;
  std::set<std::string> node_set;
  for (const auto& [key, w] : weight) {
    (void)w;
    node_set.insert(key.first);
    node_set.insert(key.second);
  }
  g.nodes.assign(node_set.begin(), node_set.end());
  for (const auto& [key, w] : weight) {
    Edge e;
    e.src = static_cast<std::int32_t>(g.node_index(key.first));
    e.dst = static_cast<std::int32_t>(g.node_index(key.second));
    e.weight = w;
    g.edges.push_back(e);
  }
  // weight map is ordered by (src id, dst id), matching index order
  g.labels.assign(g.nodes.size(), kLabelUnassigned);
  g.is_seed.assign(g.nodes.size(), 0);
  return g;
}

}  // namespace

std::vector<GraphSnapshot> build_snapshots(const Corpus& c, int window_days, int step_days) {
  if (window_days < 1) throw std::invalid_argument("build_snapshots: window_days must be >= 1");
  if (step_days < 1) throw std::invalid_argument("build_snapshots: step_days must be >= 1");
  struct Event {
    std::int32_t day;
    const std::string* src;
    const std::string* dst;
  };
  std::vector<Event> events;
  for (const auto& t : c.tweets()) {
    if (!t.repost_of || *t.repost_of == t.author_id) continue;
    events.push_back({day_of_timestamp(t.timestamp), &t.author_id, &*t.repost_of});
  }
  std::vector<GraphSnapshot> out;
  if (events.empty()) return out;
  // corpus order is chronological, so events are sorted by day
  for (std::int64_t t = c.first_day(); t <= c.last_day(); t += step_days) {
    const std::int32_t lo = static_cast<std::int32_t>(t) - window_days / 2;
    const std::int32_t hi = lo + window_days - 1;
    const auto begin = std::lower_bound(
        events.begin(), events.end(), lo,
        [](const Event& e, std::int32_t day) { return e.day < day; });
    const auto end = std::upper_bound(
        events.begin(), events.end(), hi,
        [](std::int32_t day, const Event& e) { return day < e.day; });
    if (begin == end) continue;
    std::map<std::pair<std::string, std::string>, std::int64_t> weight;
    for (auto it = begin; it != end; ++it) ++weight[{*it->src, *it->dst}];
    out.push_back(snapshot_from_weights(static_cast<std::int32_t>(t), weight));
  }
  return out;
}

GraphSnapshot giant_component(const GraphSnapshot& g) {
  if (g.nodes.empty()) throw std::invalid_argument("giant_component: empty snapshot");
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<std::int32_t>> adj(n);
  for (const auto& e : g.edges) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<std::int32_t> comp(n, -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::int32_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    const std::int32_t id = static_cast<std::int32_t>(comp_size.size());
    std::size_t size = 0;
    stack.push_back(static_cast<std::int32_t>(i));
    comp[i] = id;
    while (!stack.empty()) {
      const std::int32_t u = stack.back();
      stack.pop_back();
      ++size;
      for (const std::int32_t v : adj[u]) {
        if (comp[v] == -1) {
          comp[v] = id;
          stack.push_back(v);
        }
      }
    }
    comp_size.push_back(size);
  }
  // first strictly-largest component also holds the smallest node id among ties
  std::int32_t best = 0;
  for (std::size_t i = 1; i < comp_size.size(); ++i) {
    if (comp_size[i] > comp_size[best]) best = static_cast<std::int32_t>(i);
  }
  std::vector<std::int64_t> remap(n, -1);
  GraphSnapshot out;
  out.day = g.day;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != best) continue;
    remap[i] = static_cast<std::int64_t>(out.nodes.size());
    out.nodes.push_back(g.nodes[i]);
    out.labels.push_back(g.labels.empty() ? kLabelUnassigned : g.labels[i]);
    out.is_seed.push_back(g.is_seed.empty() ? 0 : g.is_seed[i]);
  }
  for (const auto& e : g.edges) {
    if (comp[e.src] != best) continue;
    Edge copy = e;
    copy.src = static_cast<std::int32_t>(remap[e.src]);
    copy.dst = static_cast<std::int32_t>(remap[e.dst]);
    out.edges.push_back(copy);
  }
  return out;
}

namespace {

// Undirected projection: per node, (neighbor, A_ij = w_ij + w_ji), sorted by
// neighbor, plus the projected strength per node.
struct Projection {
  std::vector<std::vector<std::pair<std::int32_t, std::int64_t>>> incident;
  std::vector<double> strength;
  std::size_t edge_count = 0;
};

Projection project(const GraphSnapshot& g) {
  Projection p;
  const std::size_t n = g.nodes.size();
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> und;
  for (const auto& e : g.edges) {
    const auto key = std::minmax(e.src, e.dst);
    und[{key.first, key.second}] += e.weight;
  }
  p.incident.resize(n);
  p.strength.assign(n, 0.0);
  p.edge_count = und.size();
  for (const auto& [key, w] : und) {
    p.incident[key.first].emplace_back(key.second, w);
    p.incident[key.second].emplace_back(key.first, w);
    p.strength[key.first] += static_cast<double>(w);
    p.strength[key.second] += static_cast<double>(w);
  }
  for (auto& list : p.incident) std::sort(list.begin(), list.end());
  return p;
}

}  // namespace

GraphStats graph_stats(const GraphSnapshot& g) {
  GraphStats stats;
  const std::size_t n = g.nodes.size();
  const Projection p = project(g);
  const double e = static_cast<double>(p.edge_count);
  stats.density = n >= 2 ? 2.0 * e / (static_cast<double>(n) * (static_cast<double>(n) - 1.0))
                         : 0.0;
  stats.mean_degree = n >= 1 ? 2.0 * e / static_cast<double>(n) : 0.0;

  double clustering_sum = 0.0;
  if (n >= 3) {
    const auto has_edge = [&](std::int32_t a, std::int32_t b) {
      const auto& list = p.incident[a];
      const auto it = std::lower_bound(
          list.begin(), list.end(), b,
          [](const std::pair<std::int32_t, std::int64_t>& entry, std::int32_t v) {
            return entry.first < v;
          });
      return it != list.end() && it->first == b;
    };
    for (std::size_t u = 0; u < n; ++u) {
      const auto& nbrs = p.incident[u];
      const std::size_t deg = nbrs.size();
      if (deg < 2) continue;
      std::int64_t triangles = 0;
      for (std::size_t a = 0; a < deg; ++a) {
        for (std::size_t b = a + 1; b < deg; ++b) {
          if (has_edge(nbrs[a].first, nbrs[b].first)) ++triangles;
        }
      }
      clustering_sum += 2.0 * static_cast<double>(triangles) /
                        (static_cast<double>(deg) * (static_cast<double>(deg) - 1.0));
    }
  }
  stats.mean_clustering = n >= 1 ? clustering_sum / static_cast<double>(n) : 0.0;

  // strength assortativity over both orientations of every projected edge
  double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_yy = 0.0, sum_xy = 0.0;
  double count = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& [v, w] : p.incident[u]) {
      (void)w;
      const double x = p.strength[u];
      const double y = p.strength[static_cast<std::size_t>(v)];
      sum_x += x;
      sum_y += y;
      sum_xx += x * x;
      sum_yy += y * y;
      sum_xy += x * y;
      count += 1.0;
    }
  }
  if (count < 2.0) {
    stats.assortativity = std::numeric_limits<double>::quiet_NaN();
  } else {
    const double cov = sum_xy - sum_x * sum_y / count;
    const double var_x = sum_xx - sum_x * sum_x / count;
    const double var_y = sum_yy - sum_y * sum_y / count;
    stats.assortativity = (var_x > 0.0 && var_y > 0.0)
                              ? cov / std::sqrt(var_x * var_y)
                              : std::numeric_limits<double>::quiet_NaN();
  }
  return stats;
}

PropagationResult label_propagation(const GraphSnapshot& g, const SeedList& seeds,
                                    const std::map<std::string, std::int8_t>* init,
                                    std::uint64_t rng_seed, int max_sweeps) {
  const std::size_t n = g.nodes.size();
  std::vector<std::int8_t> labels(n, kLabelUnassigned);
  std::vector<std::uint8_t> fixed(n, 0);
  bool seed0 = false, seed1 = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = seeds.find(g.nodes[i]);
    if (it == seeds.end()) continue;
    labels[i] = it->second;
    fixed[i] = 1;
    (it->second == 0 ? seed0 : seed1) = true;
  }
  if (!seed0 || !seed1) {
    throw DataError(std::string("label_propagation: no seed with label ") +
                    (seed0 ? "1" : "0") + " present in snapshot");
  }
  if (init) {
    for (std::size_t i = 0; i < n; ++i) {
      if (fixed[i]) continue;
      const auto it = init->find(g.nodes[i]);
      if (it != init->end() && (it->second == 0 || it->second == 1)) {
        labels[i] = it->second;
      }
    }
  }
  const Projection p = project(g);
  Rng rng(rng_seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Adoption is limited to the sweep-start frontier so labels advance one
  // layer per sweep; unbounded same-sweep cascades make seeded recovery a
  // winner-take-all race between the two floods.
  std::vector<std::uint8_t> eligible(n, 0);
  PropagationResult result;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    rng.shuffle(order);
    for (std::size_t u = 0; u < n; ++u) {
      eligible[u] = labels[u] != kLabelUnassigned;
      if (eligible[u]) continue;
      for (const auto& [v, w] : p.incident[u]) {
        if (labels[static_cast<std::size_t>(v)] != kLabelUnassigned) {
          eligible[u] = 1;
          break;
        }
      }
    }
    std::size_t changes = 0;
    for (const std::size_t u : order) {
      if (fixed[u] || !eligible[u]) continue;
      std::int64_t w0 = 0, w1 = 0;
      for (const auto& [v, w] : p.incident[u]) {
        const std::int8_t lv = labels[static_cast<std::size_t>(v)];
        if (lv == 0) {
          w0 += w;
        } else if (lv == 1) {
          w1 += w;
        }
      }
      std::int8_t next = labels[u];
      if (w0 > w1) {
        next = 0;
      } else if (w1 > w0) {
        next = 1;
      } else if (w0 > 0) {
        next = static_cast<std::int8_t>(rng.uniform_int(2));
      }
      if (next != labels[u]) {
        labels[u] = next;
        ++changes;
      }
    }
    ++result.sweeps;
    if (changes == 0) {
      result.converged = true;
      break;
    }
  }
  result.labels = std::move(labels);
  return result;
}

void apply_labeling(GraphSnapshot& g, const PropagationResult& result, const SeedList& seeds) {
  g.labels = result.labels;
  g.is_seed.assign(g.nodes.size(), 0);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (seeds.count(g.nodes[i])) g.is_seed[i] = 1;
  }
}

std::map<std::string, std::int8_t> labels_by_node(const GraphSnapshot& g) {
  std::map<std::string, std::int8_t> out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) out[g.nodes[i]] = g.labels[i];
  return out;
}

double modularity(const GraphSnapshot& g, const std::vector<std::int8_t>& labels) {
  if (labels.size() != g.nodes.size()) {
    throw std::invalid_argument("modularity: labels/nodes size mismatch");
  }
  for (const std::int8_t l : labels) {
    if (l != 0 && l != 1) throw std::invalid_argument("modularity: unlabeled node");
  }
  double m = 0.0;
  for (const auto& e : g.edges) m += static_cast<double>(e.weight);
  if (m <= 0.0) throw DataError("modularity: total edge weight is zero");
  std::vector<double> strength(g.nodes.size(), 0.0);
  double intra[2] = {0.0, 0.0};
  for (const auto& e : g.edges) {
    strength[e.src] += static_cast<double>(e.weight);
    strength[e.dst] += static_cast<double>(e.weight);
    if (labels[e.src] == labels[e.dst]) intra[labels[e.src]] += static_cast<double>(e.weight);
  }
  double label_strength[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) label_strength[labels[i]] += strength[i];
  double q = 0.0;
  for (int c = 0; c < 2; ++c) {
    const double frac = label_strength[c] / (2.0 * m);
    q += intra[c] / m - frac * frac;
  }
  return q;
}

namespace {

// O(n^2) restatement of the modularity definition, used as an always-on spot
// check on one surrogate per report.
double modularity_direct(const GraphSnapshot& g, const std::vector<std::int8_t>& labels) {
  const std::size_t n = g.nodes.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges) {
    a[e.src][e.dst] += static_cast<double>(e.weight);
    a[e.dst][e.src] += static_cast<double>(e.weight);
  }
  double two_m = 0.0;
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s[i] += a[i][j];
    two_m += s[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[i] != labels[j]) continue;
      q += a[i][j] - s[i] * s[j] / two_m;
    }
  }
  return q / two_m;
}

}  // namespace

GraphSnapshot surrogate_rewire(const GraphSnapshot& g, std::uint64_t rng_seed) {
  if (g.edges.size() < 2) throw DataError("surrogate_rewire: need at least 2 edges to swap");
  std::vector<Edge> edges = g.edges;
  Rng rng(rng_seed);
  std::set<std::pair<std::int32_t, std::int32_t>> keys;
  for (const auto& e : edges) keys.insert({e.src, e.dst});
  const std::uint64_t target = 10 * static_cast<std::uint64_t>(edges.size());
  const std::uint64_t cap = 200 * static_cast<std::uint64_t>(edges.size());
  std::uint64_t accepted = 0;
  for (std::uint64_t attempt = 0; accepted < target && attempt < cap; ++attempt) {
    const std::size_t ia = static_cast<std::size_t>(rng.uniform_int(edges.size()));
    const std::size_t ib = static_cast<std::size_t>(rng.uniform_int(edges.size()));
    if (ia == ib) continue;
    Edge& a = edges[ia];
    Edge& b = edges[ib];
    if (a.src == b.src || a.dst == b.dst) continue;  // swap would be a no-op
    if (a.src == b.dst || b.src == a.dst) continue;  // would create a self-loop
    keys.erase({a.src, a.dst});
    keys.erase({b.src, b.dst});
    const std::pair<std::int32_t, std::int32_t> k1{a.src, b.dst};
    const std::pair<std::int32_t, std::int32_t> k2{b.src, a.dst};
    if (keys.count(k1) || keys.count(k2)) {
      keys.insert({a.src, a.dst});
      keys.insert({b.src, b.dst});
      continue;  // duplicate edge, redraw
    }
    keys.insert(k1);
    keys.insert(k2);
    std::swap(a.dst, b.dst);  // weights stay with their source stub
    ++accepted;
  }
  GraphSnapshot surrogate;
  surrogate.day = g.day;
  surrogate.nodes = g.nodes;
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.src != y.src) return x.src < y.src;
    return x.dst < y.dst;
  });
  surrogate.edges = std::move(edges);
  surrogate.labels.assign(surrogate.nodes.size(), kLabelUnassigned);
  surrogate.is_seed.assign(surrogate.nodes.size(), 0);
  return surrogate;
}

QReport surrogate_zscore(const GraphSnapshot& g, const SeedList& seeds, int n_surr,
                         std::uint64_t rng_seed) {
  if (n_surr < 2) throw std::invalid_argument("surrogate_zscore: n_surr must be >= 2");
  if (g.edges.size() < 2) throw DataError("surrogate_zscore: need at least 2 edges to swap");
  QReport report;
  {
    const auto actual = label_propagation(g, seeds, nullptr, derive_seed(rng_seed, "actual"));
    report.q_actual = modularity(g, actual.labels);
  }
  const std::uint64_t swap_stream = derive_seed(rng_seed, "surrogate");
  const std::uint64_t prop_stream = derive_seed(rng_seed, "prop");
  const std::uint64_t fill_stream = derive_seed(rng_seed, "fill");
  for (int i = 0; i < n_surr; ++i) {
    GraphSnapshot surrogate = surrogate_rewire(g, mix_seed(swap_stream, static_cast<std::uint64_t>(i)));
    auto prop = label_propagation(surrogate, seeds, nullptr,
                                  mix_seed(prop_stream, static_cast<std::uint64_t>(i)));
    // Swaps can disconnect nodes from every labeled region; modularity needs
    // a full labeling, so leftovers get a seeded coin each.
    Rng fill(mix_seed(fill_stream, static_cast<std::uint64_t>(i)));
    for (auto& label : prop.labels) {
      if (label == kLabelUnassigned) label = static_cast<std::int8_t>(fill.uniform_int(2));
    }
    const double q = modularity(surrogate, prop.labels);
    if (i == 0 && surrogate.nodes.size() <= 200) {
      const double direct = modularity_direct(surrogate, prop.labels);
      if (std::abs(direct - q) > 1e-12) {
        throw std::logic_error("surrogate_zscore: modularity spot check failed");
      }
    }
    report.q_surrogates.push_back(q);
  }
  const double count = static_cast<double>(report.q_surrogates.size());
  report.mean =
      std::accumulate(report.q_surrogates.begin(), report.q_surrogates.end(), 0.0) / count;
  double ss = 0.0;
  for (const double q : report.q_surrogates) ss += (q - report.mean) * (q - report.mean);
  report.stddev = count > 1.0 ? std::sqrt(ss / (count - 1.0)) : 0.0;
  report.z = report.stddev > 0.0 ? (report.q_actual - report.mean) / report.stddev
                                 : std::numeric_limits<double>::quiet_NaN();
  return report;
}

std::string qreport_to_json(const QReport& report) {
  nlohmann::json doc;
  doc["q_actual"] = report.q_actual;
  doc["q_surrogates"] = report.q_surrogates;
  doc["mean"] = report.mean;
  doc["stddev"] = report.stddev;
  doc["z"] = report.z;  // NaN serializes as null
  return doc.dump(2) + "\n";
}

std::string snapshot_edges_csv(const GraphSnapshot& g) {
  std::string out = "src,dst,weight\n";
  for (const auto& e : g.edges) {
    out += csv_join({g.nodes[e.src], g.nodes[e.dst], std::to_string(e.weight)});
    out.push_back('\n');
  }
  return out;
}

std::string snapshot_labels_csv(const GraphSnapshot& g) {
  std::string out = "node,label,is_seed\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out += csv_join({g.nodes[i], std::to_string(static_cast<int>(g.labels[i])),
                     g.is_seed[i] ? "1" : "0"});
    out.push_back('\n');
  }
  return out;
}

GraphSnapshot snapshot_from_csv(std::int32_t day, std::string_view edges_csv,
                                std::string_view labels_csv) {
  const auto label_rows = csv_parse(labels_csv);
  if (label_rows.empty() || label_rows[0].size() < 3 || label_rows[0][0] != "node") {
    throw DataError("snapshot labels CSV: expected header node,label,is_seed");
  }
  GraphSnapshot g;
  g.day = day;
  std::map<std::string, std::pair<std::int8_t, std::uint8_t>> info;
  for (std::size_t r = 1; r < label_rows.size(); ++r) {
    const auto& row = label_rows[r];
    if (row.size() < 3) throw DataError("snapshot labels CSV: short row");
    const int value = std::stoi(row[1]);
    if (value != 0 && value != 1 && value != -1) {
      throw DataError("snapshot labels CSV: label must be -1, 0 or 1");
    }
    info[row[0]] = {static_cast<std::int8_t>(value), row[2] == "1" ? std::uint8_t{1}
                                                                   : std::uint8_t{0}};
  }
  for (const auto& [node, entry] : info) {
    (void)entry;
    g.nodes.push_back(node);
  }
  g.labels.reserve(g.nodes.size());
  g.is_seed.reserve(g.nodes.size());
  for (const auto& [node, entry] : info) {
    (void)node;
    g.labels.push_back(entry.first);
    g.is_seed.push_back(entry.second);
  }
  const auto edge_rows = csv_parse(edges_csv);
  if (edge_rows.empty() || edge_rows[0].size() < 3 || edge_rows[0][0] != "src") {
    throw DataError("snapshot edges CSV: expected header src,dst,weight");
  }
  for (std::size_t r = 1; r < edge_rows.size(); ++r) {
    const auto& row = edge_rows[r];
    if (row.size() < 3) throw DataError("snapshot edges CSV: short row");
    const std::int64_t src = g.node_index(row[0]);
    const std::int64_t dst = g.node_index(row[1]);
    if (src < 0 || dst < 0) {
      throw DataError("snapshot edges CSV: edge endpoint missing from labels file");
    }
    Edge e;
    e.src = static_cast<std::int32_t>(src);
    e.dst = static_cast<std::int32_t>(dst);
    e.weight = std::stoll(row[2]);
    g.edges.push_back(e);
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });
  return g;
}

}  // namespace poldyn
