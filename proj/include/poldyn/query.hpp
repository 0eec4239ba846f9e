#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "poldyn/corpus.hpp"

namespace poldyn {

// Boolean query over tweet tokens.
//
// Grammar:   expr   := or
//            or     := and ('OR' and)*
//            and    := unary ('AND' unary)*
//            unary  := 'NOT' unary | '(' expr ')' | Phrase | Term
// Phrase is a double-quoted token sequence. AND/OR/NOT are case-sensitive
// uppercase keywords; lowercase variants are ordinary terms. And/Or nodes are
// n-ary over their operand chain; a single operand stays itself.
struct QueryNode {
  enum class Kind { Term, Phrase, And, Or, Not };

  Kind kind = Kind::Term;
  std::string term;                // Kind::Term
  std::vector<std::string> phrase; // Kind::Phrase, >= 1 token
  std::vector<std::shared_ptr<const QueryNode>> children;
};

using QueryPtr = std::shared_ptr<const QueryNode>;

// Parses a query. Terms and phrase tokens are normalized with `rules` and
// edge-punctuation-stripped like tweet tokens; a term that normalizes to
// multiple tokens becomes a phrase, one that normalizes to nothing is a
// syntax error. Failures raise QuerySyntaxError with the byte offset and the
// token kinds acceptable at that point. Empty input is an error.
QueryPtr parse_query(std::string_view src, const NormalizationRules& rules = {});

// Canonical text form; parse_query(print_query(q)) is structurally identical
// to q.
std::string print_query(const QueryNode& q);

bool query_equal(const QueryNode& a, const QueryNode& b);

// Term: matches iff it equals some token of tokenize(text).
// Phrase: matches iff its tokens appear contiguously. And/Or/Not: Boolean.
bool eval_query_tokens(const QueryNode& q, const std::vector<std::string>& tokens);
bool eval_query(const QueryNode& q, const Tweet& t);

// Tweets matching at least one query, order preserved. Empty `queries` is an
// invalid_argument (a silent pass-through filter hides bugs).
Corpus filter_corpus(const Corpus& c, const std::vector<QueryPtr>& queries);

// One query per line; empty lines and lines whose first non-blank character
// is '#' are skipped. Parse failures become ConfigError naming the line.
std::vector<QueryPtr> load_queries(const std::string& path,
                                   const NormalizationRules& rules = {});

}  // namespace poldyn
