#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "poldyn/csv.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/query.hpp"
#include "poldyn/rng.hpp"
#include "poldyn/text.hpp"

using namespace poldyn;
namespace fs = std::filesystem;
using Kind = QueryNode::Kind;

namespace {

QuerySyntaxError capture(std::string_view src) {
  try {
    parse_query(src);
  } catch (const QuerySyntaxError& e) {
    return e;
  }
  FAIL("expected QuerySyntaxError for: ", std::string(src));
  return QuerySyntaxError(0, {});
}

std::shared_ptr<QueryNode> gen_query(Rng& rng, int depth) {
  static const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "eps"};
  auto node = std::make_shared<QueryNode>();
  const auto pick = [&rng] { return pool[static_cast<std::size_t>(rng.uniform_int(pool.size()))]; };
  switch (depth >= 3 ? rng.uniform_int(2) : rng.uniform_int(5)) {
    case 0:
      node->kind = Kind::Term;
      node->term = pick();
      break;
    case 1: {
      node->kind = Kind::Phrase;
      const std::size_t n = 1 + rng.uniform_int(3);
      for (std::size_t i = 0; i < n; ++i) node->phrase.push_back(pick());
      break;
    }
    case 2:
      node->kind = Kind::Not;
      node->children.push_back(gen_query(rng, depth + 1));
      break;
    case 3:
    case 4: {
      node->kind = rng.bernoulli(0.5) ? Kind::And : Kind::Or;
      const std::size_t n = 2 + rng.uniform_int(2);
      for (std::size_t i = 0; i < n; ++i) node->children.push_back(gen_query(rng, depth + 1));
      break;
    }
  }
  return node;
}

bool eval_oracle(const QueryNode& q, const std::vector<std::string>& tokens) {
  switch (q.kind) {
    case Kind::Term:
      return std::find(tokens.begin(), tokens.end(), q.term) != tokens.end();
    case Kind::Phrase: {
      if (q.phrase.size() > tokens.size()) return false;
      for (std::size_t i = 0; i + q.phrase.size() <= tokens.size(); ++i)
        if (std::equal(q.phrase.begin(), q.phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i)))
          return true;
      return false;
    }
    case Kind::Not:
      return !eval_oracle(*q.children[0], tokens);
    case Kind::And:
      return std::all_of(q.children.begin(), q.children.end(),
                         [&](const QueryPtr& c) { return eval_oracle(*c, tokens); });
    case Kind::Or:
      return std::any_of(q.children.begin(), q.children.end(),
                         [&](const QueryPtr& c) { return eval_oracle(*c, tokens); });
  }
  return false;
}

}  // namespace

TEST_CASE("phrase AND NOT structure") {
  const auto q = parse_query("\"morsi\" AND NOT coup");
  REQUIRE(q->kind == Kind::And);
  REQUIRE(q->children.size() == 2);
  CHECK(q->children[0]->kind == Kind::Phrase);
  CHECK(q->children[0]->phrase == std::vector<std::string>{"morsi"});
  REQUIRE(q->children[1]->kind == Kind::Not);
  CHECK(q->children[1]->children[0]->term == "coup");
}

TEST_CASE("AND binds tighter than OR") {
  const auto q = parse_query("a OR b AND c");
  REQUIRE(q->kind == Kind::Or);
  REQUIRE(q->children.size() == 2);
  CHECK(q->children[0]->term == "a");
  REQUIRE(q->children[1]->kind == Kind::And);
  CHECK(q->children[1]->children[0]->term == "b");
  CHECK(q->children[1]->children[1]->term == "c");
}

TEST_CASE("syntax errors carry offset and expectations") {
  const auto e1 = capture("a AND");
  CHECK(e1.offset() == 5);
  CHECK(e1.expected() == std::vector<std::string>{"term", "phrase", "'('", "NOT"});
  CHECK(std::string(e1.what()).find("query syntax error at offset 5") != std::string::npos);

  CHECK(capture("").offset() == 0);
  const auto e2 = capture("\"abc");
  CHECK(e2.offset() == 4);
  CHECK(e2.expected() == std::vector<std::string>{"closing '\"'"});
  const auto e3 = capture("(a");
  CHECK(e3.offset() == 2);
  CHECK(e3.expected() == std::vector<std::string>{"AND", "OR", "')'"});
  const auto e4 = capture("a b");
  CHECK(e4.offset() == 2);
  CHECK(e4.expected() == std::vector<std::string>{"AND", "OR", "end of input"});
}

TEST_CASE("evaluation semantics") {
  const auto term = parse_query("morsi");
  CHECK(eval_query_tokens(*term, {"x", "morsi", "y"}));
  CHECK_FALSE(eval_query_tokens(*term, {"morsix"}));
  CHECK_FALSE(eval_query_tokens(*term, {}));

  const auto phrase = parse_query("\"a b\"");
  CHECK(eval_query_tokens(*phrase, {"x", "a", "b", "y"}));
  CHECK_FALSE(eval_query_tokens(*phrase, {"a", "x", "b"}));
  CHECK_FALSE(eval_query_tokens(*phrase, {"b", "a"}));

  const auto notq = parse_query("NOT coup");
  CHECK(eval_query_tokens(*notq, {}));
  CHECK_FALSE(eval_query_tokens(*notq, {"coup"}));

  const Tweet t = make_tweet("t1", "u1", 0, "the morsi speech!");
  CHECK(eval_query(*parse_query("morsi"), t));
  CHECK_FALSE(eval_query(*parse_query("coup"), t));
}

TEST_CASE("print/parse round trip and oracle equivalence") {
  static const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "eps"};
  Rng rng(31);
  for (int it = 0; it < 200; ++it) {
    const auto q = gen_query(rng, 0);
    const auto back = parse_query(print_query(*q));
    CHECK(query_equal(*q, *back));

    std::vector<std::string> tokens;
    const std::size_t n = rng.uniform_int(7);
    for (std::size_t i = 0; i < n; ++i)
      tokens.push_back(pool[static_cast<std::size_t>(rng.uniform_int(pool.size()))]);
    CHECK(eval_query_tokens(*q, tokens) == eval_oracle(*q, tokens));
  }
}

TEST_CASE("query terms pass through normalization") {
  const NormalizationRules rules({ReplaceRule{{{U'~', U" "}}}, ElongationRule{2}});
  const auto folded = parse_query("cooooool", rules);
  CHECK(folded->term == "cool");
  const auto split = parse_query("a~b", rules);
  REQUIRE(split->kind == Kind::Phrase);
  CHECK(split->phrase == std::vector<std::string>{"a", "b"});
}

TEST_CASE("filter_corpus keeps matches in order") {
  std::vector<Tweet> tweets = {make_tweet("t1", "u1", 1, "morsi speech"),
                               make_tweet("t2", "u2", 2, "coup now"),
                               make_tweet("t3", "u3", 3, "morsi coup")};
  const Corpus c(std::move(tweets));
  const auto kept = filter_corpus(c, {parse_query("\"morsi\" AND NOT coup")});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].id == "t1");

  const auto all = filter_corpus(c, {parse_query("morsi OR coup")});
  CHECK(all.size() == 3);
  CHECK_THROWS_AS(filter_corpus(c, {}), std::invalid_argument);
}

TEST_CASE("filter_corpus disjunction oracle and monotonicity") {
  static const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "eps"};
  Rng rng(53);
  std::vector<Tweet> tweets;
  for (int i = 0; i < 200; ++i) {
    std::string text;
    const std::size_t n = rng.uniform_int(6);
    for (std::size_t k = 0; k < n; ++k) {
      if (k) text += ' ';
      text += pool[static_cast<std::size_t>(rng.uniform_int(pool.size()))];
    }
    tweets.push_back(make_tweet("t" + std::to_string(1000 + i), "u" + std::to_string(i % 9),
                                i, text));
  }
  const Corpus c(std::move(tweets));
  std::vector<QueryPtr> queries;
  for (int i = 0; i < 3; ++i) queries.push_back(gen_query(rng, 1));

  std::set<std::string> expect;
  for (const auto& t : c.tweets())
    for (const auto& q : queries)
      if (eval_oracle(*q, tokenize(t.text))) expect.insert(t.id);
  const auto kept = filter_corpus(c, queries);
  std::set<std::string> got;
  for (const auto& t : kept.tweets()) got.insert(t.id);
  CHECK(got == expect);

  std::set<std::string> one;
  for (const auto& t : filter_corpus(c, {queries[0]}).tweets()) one.insert(t.id);
  CHECK(std::includes(got.begin(), got.end(), one.begin(), one.end()));
}

TEST_CASE("load_queries skips comments and names bad lines") {
  const fs::path dir = fs::temp_directory_path() / "poldyn_test_queries";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string path = (dir / "q.txt").string();
  write_text_file(path, "# header comment\n\nmorsi AND tamarod\n  # indented comment\n\"full phrase\"\n");
  const auto queries = load_queries(path);
  REQUIRE(queries.size() == 2);
  CHECK(queries[0]->kind == Kind::And);
  CHECK(queries[1]->kind == Kind::Phrase);

  write_text_file(path, "fine\na AND\n");
  CHECK_THROWS_WITH_AS(load_queries(path), doctest::Contains(":2:"), ConfigError);
  fs::remove_all(dir);
}
