#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "poldyn/csv.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/graph.hpp"
#include "poldyn/rng.hpp"
#include "poldyn/synthgen.hpp"

using namespace poldyn;
namespace fs = std::filesystem;

namespace {

Tweet repost(int id, const std::string& who, const std::string& whom, std::int64_t day,
             std::int64_t offset = 0) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%05d", id);
  return make_tweet(buf, who, day * 86400 + offset, "rt", whom);
}

GraphSnapshot make_snapshot(std::vector<std::string> nodes,
                            std::vector<std::tuple<int, int, std::int64_t>> edges) {
  GraphSnapshot g;
  g.nodes = std::move(nodes);
  for (const auto& [s, d, w] : edges) g.edges.push_back({s, d, w});
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  g.labels.assign(g.nodes.size(), kLabelUnassigned);
  g.is_seed.assign(g.nodes.size(), 0);
  return g;
}

GraphSnapshot random_graph(Rng& rng, int n, int n_edges) {
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "n%03d", i);
    nodes.push_back(buf);
  }
  std::set<std::pair<int, int>> seen;
  std::vector<std::tuple<int, int, std::int64_t>> edges;
  while (static_cast<int>(edges.size()) < n_edges) {
    const int s = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const int d = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    if (s == d || !seen.insert({s, d}).second) continue;
    edges.emplace_back(s, d, 1 + static_cast<std::int64_t>(rng.uniform_int(3)));
  }
  return make_snapshot(std::move(nodes), std::move(edges));
}

// Undirected projection A_ij = w_ij + w_ji as a dense map.
std::map<std::pair<int, int>, double> project_oracle(const GraphSnapshot& g) {
  std::map<std::pair<int, int>, double> a;
  for (const auto& e : g.edges) {
    a[{e.src, e.dst}] += static_cast<double>(e.weight);
    a[{e.dst, e.src}] += static_cast<double>(e.weight);
  }
  return a;
}

double modularity_oracle(const GraphSnapshot& g, const std::vector<std::int8_t>& labels) {
  const auto a = project_oracle(g);
  const int n = static_cast<int>(g.nodes.size());
  std::vector<double> strength(static_cast<std::size_t>(n), 0.0);
  double two_m = 0.0;
  for (const auto& [key, w] : a) {
    strength[static_cast<std::size_t>(key.first)] += w;
    two_m += w;
  }
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) continue;
      const auto it = a.find({i, j});
      const double aij = it == a.end() ? 0.0 : it->second;
      q += aij - strength[static_cast<std::size_t>(i)] * strength[static_cast<std::size_t>(j)] / two_m;
    }
  }
  return q / two_m;
}

}  // namespace

TEST_CASE("snapshot windows cover [t-1, t+1] for the 3-day default") {
  std::vector<Tweet> tweets = {repost(1, "a", "b", 5), repost(2, "c", "d", 6),
                               repost(3, "e", "f", 7)};
  const Corpus c(std::move(tweets));
  const auto snaps = build_snapshots(c, 3, 1);
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0].day == 5);
  CHECK(snaps[0].edges.size() == 2);
  CHECK(snaps[1].day == 6);
  CHECK(snaps[1].edges.size() == 3);  // days 5, 6, 7 all inside [5, 7]
  CHECK(snaps[2].day == 7);
  CHECK(snaps[2].edges.size() == 2);
  CHECK(snaps[1].nodes.size() == 6);
}

TEST_CASE("repeated reposts aggregate into edge weight") {
  std::vector<Tweet> tweets = {repost(1, "i", "j", 5, 10), repost(2, "i", "j", 5, 20),
                               repost(3, "j", "i", 5, 30)};
  const Corpus c(std::move(tweets));
  const auto snaps = build_snapshots(c, 1, 1);
  REQUIRE(snaps.size() == 1);
  REQUIRE(snaps[0].edges.size() == 2);
  const auto& e = snaps[0].edges[0];
  CHECK(snaps[0].nodes[static_cast<std::size_t>(e.src)] == "i");
  CHECK(e.weight == 2);
  CHECK(snaps[0].edges[1].weight == 1);
}

TEST_CASE("snapshots match brute-force window re-aggregation") {
  Rng rng(303);
  std::vector<Tweet> tweets;
  std::vector<std::tuple<std::int32_t, std::string, std::string>> events;
  for (int i = 0; i < 300; ++i) {
    const auto day = static_cast<std::int32_t>(rng.uniform_int(12));
    const int u = static_cast<int>(rng.uniform_int(25));
    int v = static_cast<int>(rng.uniform_int(25));
    if (v == u) v = (v + 1) % 25;
    const std::string su = "u" + std::to_string(u), sv = "u" + std::to_string(v);
    tweets.push_back(repost(i, su, sv, day, rng.uniform_int(86400)));
    events.emplace_back(day, su, sv);
  }
  const Corpus c(std::move(tweets));

  for (const int w : {1, 2, 3, 4}) {
    for (const int step : {1, 2}) {
      const auto snaps = build_snapshots(c, w, step);
      std::size_t si = 0;
      for (std::int32_t t = c.first_day(); t <= c.last_day(); t += step) {
        const std::int32_t lo = t - w / 2;
        const std::int32_t hi = lo + w - 1;
        std::map<std::pair<std::string, std::string>, std::int64_t> expect;
        for (const auto& [day, src, dst] : events)
          if (day >= lo && day <= hi) ++expect[{src, dst}];
        if (expect.empty()) continue;
        REQUIRE(si < snaps.size());
        const auto& g = snaps[si++];
        CHECK(g.day == t);
        REQUIRE(g.edges.size() == expect.size());
        std::int64_t total = 0;
        for (const auto& e : g.edges) {
          const auto key = std::pair(g.nodes[static_cast<std::size_t>(e.src)],
                                     g.nodes[static_cast<std::size_t>(e.dst)]);
          REQUIRE(expect.count(key) == 1);
          CHECK(expect.at(key) == e.weight);
          total += e.weight;
        }
        std::int64_t expected_total = 0;
        for (const auto& [k, n] : expect) expected_total += n;
        CHECK(total == expected_total);
        std::set<std::string> endpoint_set;
        for (const auto& [k, n] : expect) {
          endpoint_set.insert(k.first);
          endpoint_set.insert(k.second);
        }
        CHECK(g.nodes == std::vector<std::string>(endpoint_set.begin(), endpoint_set.end()));
      }
      CHECK(si == snaps.size());
    }
  }

  CHECK(build_snapshots(Corpus({make_tweet("t1", "u1", 86400, "no reposts here")}), 3, 1).empty());
  CHECK_THROWS_AS(build_snapshots(c, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_snapshots(c, 3, 0), std::invalid_argument);
}

TEST_CASE("giant component selection and tie break") {
  auto g = make_snapshot({"c0", "c1", "c2", "c3", "c4", "c5", "c6", "d0", "d1", "d2"},
                         {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {5, 6, 1},
                          {7, 8, 1}, {8, 9, 1}});
  const auto giant = giant_component(g);
  CHECK(giant.nodes.size() == 7);
  CHECK(giant.nodes.front() == "c0");
  CHECK(giant.edges.size() == 6);
  const auto again = giant_component(giant);
  CHECK(again.nodes == giant.nodes);
  CHECK(again.edges.size() == giant.edges.size());

  const auto tie = giant_component(make_snapshot({"a0", "a1", "z0", "z1"}, {{2, 3, 9}, {0, 1, 1}}));
  CHECK(tie.nodes == std::vector<std::string>{"a0", "a1"});
}

TEST_CASE("giant component equals exhaustive traversal") {
  Rng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_int(40));
    const auto g = random_graph(rng, n, 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n))));
    // union-find over undirected edges
    std::vector<int> parent(g.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
      return x;
    };
    for (const auto& e : g.edges) parent[static_cast<std::size_t>(find(e.src))] = find(e.dst);
    std::map<int, std::set<std::string>> comps;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      bool incident = false;
      for (const auto& e : g.edges)
        if (e.src == static_cast<std::int32_t>(i) || e.dst == static_cast<std::int32_t>(i))
          incident = true;
      if (incident) comps[find(static_cast<int>(i))].insert(g.nodes[i]);
    }
    std::set<std::string> best;
    for (const auto& [root, members] : comps) {
      if (members.size() > best.size() ||
          (members.size() == best.size() && *members.begin() < *best.begin()))
        best = members;
    }
    const auto giant = giant_component(g);
    CHECK(std::set<std::string>(giant.nodes.begin(), giant.nodes.end()) == best);
  }
}

TEST_CASE("graph statistics on canonical shapes") {
  const auto triangle = graph_stats(make_snapshot({"a", "b", "c"}, {{0, 1, 1}, {1, 2, 1}, {2, 0, 1}}));
  CHECK(triangle.density == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(triangle.mean_degree == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(triangle.mean_clustering == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isnan(triangle.assortativity));  // all strengths equal

  const auto star = graph_stats(make_snapshot({"hub", "l1", "l2", "l3"},
                                              {{1, 0, 1}, {2, 0, 1}, {3, 0, 1}}));
  CHECK(star.mean_clustering == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(star.assortativity == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(star.density == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("graph statistics match dense oracles") {
  Rng rng(505);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + static_cast<int>(rng.uniform_int(20));
    const auto g = random_graph(rng, n, 2 * n);
    const auto stats = graph_stats(g);
    const auto a = project_oracle(g);

    std::set<std::pair<int, int>> und;
    for (const auto& [key, w] : a) und.insert({std::min(key.first, key.second), std::max(key.first, key.second)});
    const double e = static_cast<double>(und.size());
    CHECK(stats.density == doctest::Approx(2.0 * e / (n * (n - 1.0))).epsilon(1e-12));
    CHECK(stats.mean_degree == doctest::Approx(2.0 * e / n).epsilon(1e-12));

    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    std::vector<double> strength(static_cast<std::size_t>(n), 0.0);
    for (const auto& [key, w] : a) {
      adj[static_cast<std::size_t>(key.first)].insert(key.second);
      strength[static_cast<std::size_t>(key.first)] += w;
    }
    double clustering = 0.0;
    for (int u = 0; u < n; ++u) {
      const auto& nb = adj[static_cast<std::size_t>(u)];
      if (nb.size() < 2) continue;
      int closed = 0, open = 0;
      for (const int x : nb)
        for (const int y : nb) {
          if (x >= y) continue;
          ++open;
          if (adj[static_cast<std::size_t>(x)].count(y)) ++closed;
        }
      clustering += static_cast<double>(closed) / static_cast<double>(open);
    }
    CHECK(stats.mean_clustering == doctest::Approx(clustering / n).epsilon(1e-12));

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, cnt = 0;
    for (const auto& [key, w] : a) {
      const double x = strength[static_cast<std::size_t>(key.first)];
      const double y = strength[static_cast<std::size_t>(key.second)];
      sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y; cnt += 1;
    }
    const double cov = sxy - sx * sy / cnt;
    const double vx = sxx - sx * sx / cnt, vy = syy - sy * sy / cnt;
    if (vx > 0 && vy > 0) {
      CHECK(stats.assortativity == doctest::Approx(cov / std::sqrt(vx * vy)).epsilon(1e-9));
    } else {
      CHECK(std::isnan(stats.assortativity));
    }
  }
}

TEST_CASE("label propagation on bridged cliques") {
  auto g = make_snapshot({"a0", "a1", "a2", "b0", "b1", "b2"},
                         {{0, 1, 5}, {1, 2, 5}, {0, 2, 5}, {3, 4, 5}, {4, 5, 5}, {3, 5, 5},
                          {0, 3, 1}});
  const SeedList seeds = {{"a0", 0}, {"b0", 1}};
  const auto res = label_propagation(g, seeds, nullptr, 9);
  CHECK(res.converged);
  apply_labeling(g, res, seeds);
  for (const auto& id : {"a0", "a1", "a2"}) CHECK(g.labels[static_cast<std::size_t>(g.node_index(id))] == 0);
  for (const auto& id : {"b0", "b1", "b2"}) CHECK(g.labels[static_cast<std::size_t>(g.node_index(id))] == 1);
  CHECK(g.is_seed[static_cast<std::size_t>(g.node_index("a0"))] == 1);
  CHECK(g.is_seed[static_cast<std::size_t>(g.node_index("a1"))] == 0);

  // warm start from the converged labeling changes nothing and stops in one sweep
  const auto by_node = labels_by_node(g);
  const auto warm = label_propagation(g, seeds, &by_node, 777);
  CHECK(warm.converged);
  CHECK(warm.sweeps == 1);
  CHECK(warm.labels == res.labels);

  CHECK_THROWS_AS(label_propagation(g, SeedList{{"a0", 0}, {"zz", 1}}, nullptr, 1), DataError);
  CHECK_THROWS_AS(label_propagation(g, SeedList{{"a0", 0}}, nullptr, 1), DataError);
}

TEST_CASE("all-seed graphs converge to the seed labels") {
  const auto g = make_snapshot({"x", "y"}, {{0, 1, 2}});
  const SeedList seeds = {{"x", 0}, {"y", 1}};
  const auto res = label_propagation(g, seeds, nullptr, 4);
  CHECK(res.converged);
  CHECK(res.labels == std::vector<std::int8_t>{0, 1});
}

TEST_CASE("converged propagation is locally optimal") {
  const auto planted = planted_two_block_graph(40, 0.4, 0.02, 11);
  const SeedList seeds = {{"a000", 0}, {"b000", 1}};
  auto g = planted.graph;
  const auto res = label_propagation(g, seeds, nullptr, 21);
  REQUIRE(res.converged);
  apply_labeling(g, res, seeds);

  const auto a = project_oracle(g);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.is_seed[i]) continue;
    double side[2] = {0, 0};
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const auto it = a.find({static_cast<int>(i), static_cast<int>(j)});
      if (it == a.end()) continue;
      const auto lj = g.labels[j];
      if (lj == 0 || lj == 1) side[lj] += it->second;
    }
    if (side[0] == 0 && side[1] == 0) continue;
    const auto li = g.labels[i];
    REQUIRE(li != kLabelUnassigned);
    CHECK(side[li] >= side[1 - li]);
  }
}

TEST_CASE("modularity pinned values and validation") {
  const auto one = make_snapshot({"a", "b", "c"}, {{0, 1, 1}, {1, 2, 1}});
  CHECK(modularity(one, {0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-12));

  const auto cliques = make_snapshot({"a", "b", "c", "x", "y", "z"},
                                     {{0, 1, 1}, {1, 2, 1}, {0, 2, 1},
                                      {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
  CHECK(modularity(cliques, {0, 0, 0, 1, 1, 1}) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(modularity(one, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(modularity(one, {0, kLabelUnassigned, 0}), std::invalid_argument);
  const auto empty = make_snapshot({}, {});
  CHECK_THROWS_AS(modularity(empty, {}), DataError);
}

TEST_CASE("modularity equals the double-sum oracle") {
  Rng rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_int(16));
    const auto g = random_graph(rng, n, n + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(2 * n))));
    std::vector<std::int8_t> labels;
    for (int i = 0; i < n; ++i) labels.push_back(static_cast<std::int8_t>(rng.uniform_int(2)));
    CHECK(modularity(g, labels) == doctest::Approx(modularity_oracle(g, labels)).epsilon(1e-12));
  }
}

TEST_CASE("surrogate rewiring preserves degrees, sources, and weights") {
  Rng rng(707);
  const auto g = random_graph(rng, 30, 80);
  const auto s = surrogate_rewire(g, 99);

  CHECK(s.nodes == g.nodes);
  CHECK(s.edges.size() == g.edges.size());
  std::map<int, int> out_before, out_after, in_before, in_after;
  std::map<int, std::int64_t> ostr_before, ostr_after;
  std::multiset<std::int64_t> w_before, w_after;
  std::set<std::pair<int, int>> keys;
  for (const auto& e : g.edges) {
    ++out_before[e.src];
    ++in_before[e.dst];
    ostr_before[e.src] += e.weight;
    w_before.insert(e.weight);
  }
  for (const auto& e : s.edges) {
    CHECK(e.src != e.dst);
    CHECK(keys.insert({e.src, e.dst}).second);
    ++out_after[e.src];
    ++in_after[e.dst];
    ostr_after[e.src] += e.weight;
    w_after.insert(e.weight);
  }
  CHECK(out_after == out_before);
  CHECK(in_after == in_before);
  CHECK(ostr_after == ostr_before);
  CHECK(w_after == w_before);
  CHECK(std::all_of(s.labels.begin(), s.labels.end(),
                    [](std::int8_t l) { return l == kLabelUnassigned; }));
  CHECK(std::is_sorted(s.edges.begin(), s.edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  }));

  const auto s2 = surrogate_rewire(g, 99);
  CHECK(s2.edges.size() == s.edges.size());
  bool identical = true;
  for (std::size_t i = 0; i < s.edges.size(); ++i)
    identical = identical && s.edges[i].src == s2.edges[i].src && s.edges[i].dst == s2.edges[i].dst;
  CHECK(identical);
  const auto s3 = surrogate_rewire(g, 100);
  bool same_as_other_seed = true;
  for (std::size_t i = 0; i < s.edges.size(); ++i)
    same_as_other_seed = same_as_other_seed && s.edges[i].dst == s3.edges[i].dst;
  CHECK_FALSE(same_as_other_seed);

  CHECK_THROWS_AS(surrogate_rewire(make_snapshot({"a", "b"}, {{0, 1, 1}}), 1), DataError);
}

TEST_CASE("surrogate z-score separates planted structure from chance") {
  const auto planted = planted_two_block_graph(40, 0.4, 0.02, 31);
  const SeedList seeds = {{"a000", 0}, {"b000", 1}};
  const auto report = surrogate_zscore(planted.graph, seeds, 5, 17);
  REQUIRE(report.q_surrogates.size() == 5);
  double mean = 0;
  for (const double q : report.q_surrogates) mean += q;
  mean /= 5;
  CHECK(report.mean == doctest::Approx(mean).epsilon(1e-12));
  double ss = 0;
  for (const double q : report.q_surrogates) ss += (q - mean) * (q - mean);
  CHECK(report.stddev == doctest::Approx(std::sqrt(ss / 4)).epsilon(1e-12));
  CHECK(report.z == doctest::Approx((report.q_actual - report.mean) / report.stddev).epsilon(1e-12));
  CHECK(report.q_actual > report.mean);
  const auto json = qreport_to_json(report);
  CHECK(json.find("q_actual") != std::string::npos);

  CHECK_THROWS_AS(surrogate_zscore(planted.graph, seeds, 1, 17), std::invalid_argument);
}

TEST_CASE("snapshot CSV round trip") {
  auto g = make_snapshot({"u1", "u2", "u3"}, {{0, 1, 3}, {2, 1, 1}});
  g.labels = {0, 1, kLabelUnassigned};
  g.is_seed = {1, 0, 0};
  const auto edges_csv = snapshot_edges_csv(g);
  const auto labels_csv = snapshot_labels_csv(g);
  CHECK(edges_csv.rfind("src,dst,weight\n", 0) == 0);
  CHECK(labels_csv.rfind("node,label,is_seed\n", 0) == 0);
  const auto back = snapshot_from_csv(42, edges_csv, labels_csv);
  CHECK(back.day == 42);
  CHECK(back.nodes == g.nodes);
  CHECK(back.labels == g.labels);
  CHECK(back.is_seed == g.is_seed);
  REQUIRE(back.edges.size() == 2);
  CHECK(back.edges[0].weight == 3);
}

TEST_CASE("seed list loading") {
  const fs::path dir = fs::temp_directory_path() / "poldyn_test_seeds";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string path = (dir / "seeds.csv").string();
  write_text_file(path, "author_id,label\nu1,0\nu2,1\n");
  const auto seeds = load_seed_list(path);
  CHECK(seeds == SeedList{{"u1", 0}, {"u2", 1}});
  write_text_file(path, "author_id,label\nu1,0\nu1,1\n");
  CHECK_THROWS_AS(load_seed_list(path), DataError);
  write_text_file(path, "author_id,label\nu1,2\n");
  CHECK_THROWS_AS(load_seed_list(path), DataError);
  write_text_file(path, "who,label\nu1,0\n");
  CHECK_THROWS_AS(load_seed_list(path), DataError);
  fs::remove_all(dir);
}
