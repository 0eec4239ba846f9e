#include "poldyn/query.hpp"

#include <algorithm>
#include <stdexcept>

#include "poldyn/csv.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/text.hpp"

namespace poldyn {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) out += (i + 1 == expected.size()) ? " or " : ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

QuerySyntaxError::QuerySyntaxError(std::size_t offset, std::vector<std::string> expected)
    : std::runtime_error("query syntax error at offset " + std::to_string(offset) +
                         ": expected " + join_expected(expected)),
      offset_(offset),
      expected_(std::move(expected)) {}

namespace {

struct Token {
  enum class Kind { LParen, RParen, Word, Phrase, End };
  Kind kind;
  std::size_t offset;
  std::string text;  // Word: raw word; Phrase: raw quoted content
};

bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (is_ascii_space(c)) {
      ++i;
    } else if (c == '(') {
      tokens.push_back({Token::Kind::LParen, i, "("});
      ++i;
    } else if (c == ')') {
      tokens.push_back({Token::Kind::RParen, i, ")"});
      ++i;
    } else if (c == '"') {
      const std::size_t start = i;
      const std::size_t close = src.find('"', i + 1);
      if (close == std::string_view::npos) {
        throw QuerySyntaxError(src.size(), {"closing '\"'"});
      }
      tokens.push_back(
          {Token::Kind::Phrase, start, std::string(src.substr(i + 1, close - i - 1))});
      i = close + 1;
    } else {
      const std::size_t start = i;
      while (i < src.size() && !is_ascii_space(src[i]) && src[i] != '(' &&
             src[i] != ')' && src[i] != '"') {
        ++i;
      }
      tokens.push_back({Token::Kind::Word, start, std::string(src.substr(start, i - start))});
    }
  }
  tokens.push_back({Token::Kind::End, src.size(), ""});
  return tokens;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const NormalizationRules& rules)
      : tokens_(std::move(tokens)), rules_(rules) {}

  QueryPtr parse() {
    auto q = parse_or();
    if (peek().kind != Token::Kind::End) fail({"AND", "OR", "end of input"});
    return q;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool is_word(const char* kw) const {
    return peek().kind == Token::Kind::Word && peek().text == kw;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw QuerySyntaxError(peek().offset, std::move(expected));
  }

  QueryPtr parse_or() {
    auto first = parse_and();
    if (!is_word("OR")) return first;
    auto node = std::make_shared<QueryNode>();
    node->kind = QueryNode::Kind::Or;
    node->children.push_back(std::move(first));
    while (is_word("OR")) {
      advance();
      node->children.push_back(parse_and());
    }
    return node;
  }

  QueryPtr parse_and() {
    auto first = parse_unary();
    if (!is_word("AND")) return first;
    auto node = std::make_shared<QueryNode>();
    node->kind = QueryNode::Kind::And;
    node->children.push_back(std::move(first));
    while (is_word("AND")) {
      advance();
      node->children.push_back(parse_unary());
    }
    return node;
  }

  QueryPtr parse_unary() {
    if (is_word("NOT")) {
      advance();
      auto node = std::make_shared<QueryNode>();
      node->kind = QueryNode::Kind::Not;
      node->children.push_back(parse_unary());
      return node;
    }
    if (peek().kind == Token::Kind::LParen) {
      advance();
      auto inner = parse_or();
      if (peek().kind != Token::Kind::RParen) fail({"AND", "OR", "')'"});
      advance();
      return inner;
    }
    if (peek().kind == Token::Kind::Phrase) {
      const Token tok = advance();
      return leaf(tok, /*from_phrase=*/true);
    }
    if (peek().kind == Token::Kind::Word && !is_word("AND") && !is_word("OR")) {
      const Token tok = advance();
      return leaf(tok, /*from_phrase=*/false);
    }
    fail({"term", "phrase", "'('", "NOT"});
  }

  QueryPtr leaf(const Token& tok, bool from_phrase) {
    const auto toks = tokenize(normalize_text(tok.text, rules_));
    if (toks.empty()) {
      fail_at(tok.offset, {from_phrase ? "non-empty phrase" : "non-empty term"});
    }
    auto node = std::make_shared<QueryNode>();
    if (!from_phrase && toks.size() == 1) {
      node->kind = QueryNode::Kind::Term;
      node->term = toks[0];
    } else {
      node->kind = QueryNode::Kind::Phrase;
      node->phrase = toks;
    }
    return node;
  }

  [[noreturn]] static void fail_at(std::size_t offset, std::vector<std::string> expected) {
    throw QuerySyntaxError(offset, std::move(expected));
  }

  std::vector<Token> tokens_;
  const NormalizationRules& rules_;
  std::size_t pos_ = 0;
};

}  // namespace

QueryPtr parse_query(std::string_view src, const NormalizationRules& rules) {
  return Parser(lex(src), rules).parse();
}

namespace {

void print_node(const QueryNode& q, std::string& out) {
  const auto print_child = [&out](const QueryNode& c, bool parens) {
    if (parens) out.push_back('(');
    print_node(c, out);
    if (parens) out.push_back(')');
  };
  switch (q.kind) {
    case QueryNode::Kind::Term:
      out += q.term;
      break;
    case QueryNode::Kind::Phrase:
      out.push_back('"');
      for (std::size_t i = 0; i < q.phrase.size(); ++i) {
        if (i) out.push_back(' ');
        out += q.phrase[i];
      }
      out.push_back('"');
      break;
    case QueryNode::Kind::Not: {
      out += "NOT ";
      const auto& c = *q.children[0];
      print_child(c, c.kind == QueryNode::Kind::And || c.kind == QueryNode::Kind::Or);
      break;
    }
    case QueryNode::Kind::And:
      for (std::size_t i = 0; i < q.children.size(); ++i) {
        if (i) out += " AND ";
        const auto& c = *q.children[i];
        print_child(c, c.kind == QueryNode::Kind::And || c.kind == QueryNode::Kind::Or);
      }
      break;
    case QueryNode::Kind::Or:
      for (std::size_t i = 0; i < q.children.size(); ++i) {
        if (i) out += " OR ";
        const auto& c = *q.children[i];
        print_child(c, c.kind == QueryNode::Kind::Or);
      }
      break;
  }
}

}  // namespace

std::string print_query(const QueryNode& q) {
  std::string out;
  print_node(q, out);
  return out;
}

bool query_equal(const QueryNode& a, const QueryNode& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case QueryNode::Kind::Term:
      return a.term == b.term;
    case QueryNode::Kind::Phrase:
      return a.phrase == b.phrase;
    default:
      break;
  }
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!query_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool eval_query_tokens(const QueryNode& q, const std::vector<std::string>& tokens) {
  switch (q.kind) {
    case QueryNode::Kind::Term:
      return std::find(tokens.begin(), tokens.end(), q.term) != tokens.end();
    case QueryNode::Kind::Phrase: {
      if (q.phrase.size() > tokens.size()) return false;
      for (std::size_t i = 0; i + q.phrase.size() <= tokens.size(); ++i) {
        if (std::equal(q.phrase.begin(), q.phrase.end(), tokens.begin() + i)) return true;
      }
      return false;
    }
    case QueryNode::Kind::Not:
      return !eval_query_tokens(*q.children[0], tokens);
    case QueryNode::Kind::And:
      for (const auto& c : q.children) {
        if (!eval_query_tokens(*c, tokens)) return false;
      }
      return true;
    case QueryNode::Kind::Or:
      for (const auto& c : q.children) {
        if (eval_query_tokens(*c, tokens)) return true;
      }
      return false;
  }
  return false;
}

bool eval_query(const QueryNode& q, const Tweet& t) {
  return eval_query_tokens(q, tokenize(t.text));
}

Corpus filter_corpus(const Corpus& c, const std::vector<QueryPtr>& queries) {
  if (queries.empty()) {
    throw std::invalid_argument("filter_corpus: empty query list");
  }
  std::vector<Tweet> kept;
  for (const auto& t : c.tweets()) {
    const auto tokens = tokenize(t.text);
    for (const auto& q : queries) {
      if (eval_query_tokens(*q, tokens)) {
        kept.push_back(t);
        break;
      }
    }
  }
  return Corpus(std::move(kept));
}

std::vector<QueryPtr> load_queries(const std::string& path, const NormalizationRules& rules) {
  const std::string content = read_text_file(path);
  std::vector<QueryPtr> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool last = eol == content.size();
    pos = eol + 1;
    ++line_no;
    std::size_t first = 0;
    while (first < line.size() && is_ascii_space(line[first])) ++first;
    if (first < line.size() && line[first] != '#') {
      try {
        out.push_back(parse_query(line, rules));
      } catch (const QuerySyntaxError& e) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (last) break;
  }
  return out;
}

}  // namespace poldyn
