#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "poldyn/corpus.hpp"

namespace poldyn {

inline constexpr std::int8_t kLabelUnassigned = -1;

struct Edge {
  std::int32_t src = 0;  // node index; src reposted dst
  std::int32_t dst = 0;
  std::int64_t weight = 0;
};

// Weighted directed repost graph aggregated over one sliding window.
// Edges are unique (src, dst) pairs sorted ascending, no self-loops; nodes
// are the sorted distinct author ids with at least one incident edge.
struct GraphSnapshot {
  std::int32_t day = 0;  // epoch day at the window center
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<std::int8_t> labels;   // -1 unassigned / 0 / 1, aligned to nodes
  std::vector<std::uint8_t> is_seed;

  // Index of an id in nodes, or -1.
  std::int64_t node_index(std::string_view id) const;
};

using SeedList = std::map<std::string, std::int8_t>;  // author id -> 0 or 1

// CSV with header author_id,label; labels must be 0 or 1, authors unique.
SeedList load_seed_list(const std::string& path);

// Snapshot at day t covers repost events in days [t - w/2, t - w/2 + w - 1]
// (odd w: centered, the 3-day default is [t-1, t+1]). t runs from the first
// to the last corpus day in steps of step_days; windows with no events are
// skipped. Weight = repost event count. A corpus without any repost events
// yields an empty list.
std::vector<GraphSnapshot> build_snapshots(const Corpus& c, int window_days = 3,
                                           int step_days = 1);

// Largest weakly connected component; ties take the component holding the
// smallest node id. Labels and seed flags carry over. Idempotent.
GraphSnapshot giant_component(const GraphSnapshot& g);

struct GraphStats {
  double density = 0.0;
  double mean_degree = 0.0;
  double mean_clustering = 0.0;  // unweighted triangles, degree < 2 counts 0
  double assortativity = 0.0;    // strength Pearson over both edge orientations
};

// Standard statistics on the undirected weighted projection
// (A_ij = w_ij + w_ji). Degenerate assortativity variance yields NaN.
GraphStats graph_stats(const GraphSnapshot& g);

struct PropagationResult {
  std::vector<std::int8_t> labels;
  bool converged = false;
  int sweeps = 0;  // sweeps executed, including the final unchanged one
};

// Seed-constrained two-label propagation. Seeds are fixed forever; non-seeds
// start from `init` (by node id) where given, else unassigned. Each sweep
// visits nodes in a freshly shuffled order (one seeded engine for shuffles
// and tie coins) and adopts the label with the larger total incident
// projected weight; unassigned neighbors contribute nothing, a node with no
// labeled neighbors keeps its state, positive ties flip a seeded coin.
// Adoption is restricted to nodes labeled or adjacent to a labeled node at
// sweep start, so label fronts advance one layer per sweep instead of
// cascading arbitrarily far within one shuffled visit order.
// Terminates when a sweep changes nothing or after max_sweeps. Both seed
// sides must be present in g (DataError otherwise).
PropagationResult label_propagation(const GraphSnapshot& g, const SeedList& seeds,
                                    const std::map<std::string, std::int8_t>* init,
                                    std::uint64_t rng_seed, int max_sweeps = 100);

// Writes a propagation result onto the snapshot's labels and seed flags.
void apply_labeling(GraphSnapshot& g, const PropagationResult& result,
                    const SeedList& seeds);

std::map<std::string, std::int8_t> labels_by_node(const GraphSnapshot& g);

// Newman weighted modularity of a full 0/1 labeling on the undirected
// projection: Q = (1/2m) sum_ij [A_ij - s_i s_j / 2m] delta(c_i, c_j).
// Zero total weight raises DataError; an unlabeled node is invalid_argument.
double modularity(const GraphSnapshot& g, const std::vector<std::int8_t>& labels);

struct QReport {
  double q_actual = 0.0;
  std::vector<double> q_surrogates;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double z = 0.0;       // NaN when stddev == 0
};

// One degree-preserving surrogate of g: 10*|E| accepted weighted double-edge
// swaps (source keeps its weight; self-loops, no-ops, and duplicate edges are
// rejected and redrawn). Labels come back unassigned. Requires |E| >= 2.
GraphSnapshot surrogate_rewire(const GraphSnapshot& g, std::uint64_t rng_seed);

// Q significance against degree-preserving surrogates: each surrogate is
// built by surrogate_rewire, then labeled by a fresh propagation run.
// Requires |E| >= 2 and n_surr >= 2.
QReport surrogate_zscore(const GraphSnapshot& g, const SeedList& seeds, int n_surr,
                         std::uint64_t rng_seed);

std::string qreport_to_json(const QReport& report);

// CSV exports: edges (src,dst,weight), labels (node,label,is_seed).
std::string snapshot_edges_csv(const GraphSnapshot& g);
std::string snapshot_labels_csv(const GraphSnapshot& g);
// Rebuilds a labeled snapshot from the two CSV documents.
GraphSnapshot snapshot_from_csv(std::int32_t day, std::string_view edges_csv,
                                std::string_view labels_csv);

}  // namespace poldyn
