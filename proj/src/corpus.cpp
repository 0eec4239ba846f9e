#include "poldyn/corpus.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/text.hpp"

namespace poldyn {

namespace {

void apply_rule(const NormalizationRule& rule, std::vector<char32_t>& cps) {
  std::vector<char32_t> out;
  out.reserve(cps.size());
  if (const auto* fold = std::get_if<FoldRule>(&rule)) {
    for (const char32_t c : cps) {
      const auto it = fold->map.find(c);
      if (it == fold->map.end()) {
        out.push_back(c);
      } else {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  } else if (const auto* rem = std::get_if<MarkRemovalRule>(&rule)) {
    for (const char32_t c : cps) {
      if (!rem->marks.count(c)) out.push_back(c);
    }
  } else if (const auto* rep = std::get_if<ReplaceRule>(&rule)) {
    for (const char32_t c : cps) {
      const auto it = rep->map.find(c);
      if (it == rep->map.end()) {
        out.push_back(c);
      } else {
        out.insert(out.end(), it->second.begin(), it->second.end());
      }
    }
  } else {
    const auto& el = std::get<ElongationRule>(rule);
    int run = 0;
    char32_t prev = 0;
    for (const char32_t c : cps) {
      if (!out.empty() && c == prev) {
        ++run;
      } else {
        run = 1;
        prev = c;
      }
      if (run <= el.max_run) out.push_back(c);
    }
  }
  cps = std::move(out);
}

std::vector<char32_t> apply_rules(const std::vector<NormalizationRule>& rules,
                                  std::size_t from, std::vector<char32_t> cps) {
  for (std::size_t i = from; i < rules.size(); ++i) apply_rule(rules[i], cps);
  return cps;
}

char32_t single_codepoint(const std::string& s, const char* what) {
  const auto cps = utf8_decode(s);
  if (cps.size() != 1) {
    throw ConfigError(std::string("normalization ") + what + " '" + s +
                      "' must be exactly one codepoint");
  }
  return cps[0];
}

}  // namespace

NormalizationRules::NormalizationRules(std::vector<NormalizationRule> rules)
    : rules_(std::move(rules)) {
  validate();
}

void NormalizationRules::validate() const {
  bool seen_elongation = false;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (std::holds_alternative<ElongationRule>(rules_[i])) {
      if (std::get<ElongationRule>(rules_[i]).max_run < 1) {
        throw ConfigError("compress_elongation max_run must be >= 1");
      }
      seen_elongation = true;
      continue;
    }
    if (seen_elongation) {
      throw ConfigError(
          "normalization rule " + std::to_string(i) +
          ": codepoint rules may not follow compress_elongation (breaks idempotence)");
    }
    const std::map<char32_t, std::u32string>* map = nullptr;
    if (const auto* fold = std::get_if<FoldRule>(&rules_[i])) map = &fold->map;
    if (const auto* rep = std::get_if<ReplaceRule>(&rules_[i])) map = &rep->map;
    if (!map) continue;
    for (const auto& [key, image] : *map) {
      std::vector<char32_t> v(image.begin(), image.end());
      const auto w = apply_rules(rules_, i + 1, std::move(v));
      if (apply_rules(rules_, 0, w) != w) {
        std::string key_utf8;
        utf8_append(key_utf8, key);
        throw ConfigError("normalization rule " + std::to_string(i) +
                          ": image of '" + key_utf8 +
                          "' is not a fixed point of the pipeline (breaks idempotence)");
      }
    }
  }
}

NormalizationRules NormalizationRules::from_json_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("normalization rules: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw ConfigError("normalization rules: expected {\"rules\": [...]}");
  }
  std::vector<NormalizationRule> rules;
  for (const auto& entry : doc["rules"]) {
    if (!entry.is_object() || !entry.contains("type") || !entry["type"].is_string()) {
      throw ConfigError("normalization rules: each rule needs a \"type\" string");
    }
    const std::string type = entry["type"].get<std::string>();
    if (type == "fold" || type == "replace") {
      if (!entry.contains("map") || !entry["map"].is_object()) {
        throw ConfigError("normalization rules: " + type + " rule needs a \"map\" object");
      }
      std::map<char32_t, std::u32string> map;
      for (const auto& [k, v] : entry["map"].items()) {
        if (!v.is_string()) {
          throw ConfigError("normalization rules: map values must be strings");
        }
        const auto cps = utf8_decode(v.get<std::string>());
        map[single_codepoint(k, "map key")] = std::u32string(cps.begin(), cps.end());
      }
      if (type == "fold") {
        rules.push_back(FoldRule{std::move(map)});
      } else {
        rules.push_back(ReplaceRule{std::move(map)});
      }
    } else if (type == "remove_marks") {
      if (!entry.contains("marks") || !entry["marks"].is_array()) {
        throw ConfigError("normalization rules: remove_marks rule needs a \"marks\" array");
      }
      MarkRemovalRule rule;
      for (const auto& m : entry["marks"]) {
        if (!m.is_string()) {
          throw ConfigError("normalization rules: marks entries must be strings");
        }
        rule.marks.insert(single_codepoint(m.get<std::string>(), "mark"));
      }
      rules.push_back(std::move(rule));
    } else if (type == "compress_elongation") {
      ElongationRule rule;
      if (entry.contains("max_run")) {
        if (!entry["max_run"].is_number_integer()) {
          throw ConfigError("normalization rules: max_run must be an integer");
        }
        rule.max_run = entry["max_run"].get<int>();
      }
      rules.push_back(rule);
    } else {
      throw ConfigError("normalization rules: unknown rule type '" + type + "'");
    }
  }
  return NormalizationRules(std::move(rules));
}

NormalizationRules NormalizationRules::load(const std::string& path) {
  return from_json_text(read_text_file(path));
}

std::string normalize_text(std::string_view text, const NormalizationRules& rules) {
  if (rules.empty()) return std::string(text);
  auto cps = apply_rules(rules.rules(), 0, utf8_decode(text));
  return utf8_encode(cps);
}

// ---------------------------------------------------------------------------

bool tweet_order_less(const Tweet& a, const Tweet& b) {
  if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
  return a.id < b.id;
}

Tweet make_tweet(std::string id, std::string author_id, std::int64_t timestamp,
                 std::string_view raw_text, std::optional<std::string> repost_of,
                 const NormalizationRules& rules) {
  Tweet t;
  t.id = std::move(id);
  t.author_id = std::move(author_id);
  t.timestamp = timestamp;
  t.text = normalize_text(raw_text, rules);
  t.repost_of = std::move(repost_of);
  t.hashtags = extract_hashtags(t.text);
  return t;
}

Corpus::Corpus(std::vector<Tweet> tweets) : tweets_(std::move(tweets)) {
  std::sort(tweets_.begin(), tweets_.end(), tweet_order_less);
  for (std::size_t i = 0; i < tweets_.size(); ++i) {
    author_index_[tweets_[i].author_id].push_back(i);
    const std::int32_t day = day_of_timestamp(tweets_[i].timestamp);
    auto [it, inserted] = day_index_.try_emplace(day, i, i + 1);
    if (!inserted) it->second.second = i + 1;
  }
}

std::int32_t Corpus::first_day() const {
  if (empty()) throw std::logic_error("first_day on empty corpus");
  return day_index_.begin()->first;
}

std::int32_t Corpus::last_day() const {
  if (empty()) throw std::logic_error("last_day on empty corpus");
  return day_index_.rbegin()->first;
}

namespace {

class IngestBuilder {
 public:
  void add(Tweet t) {
    ++stats_.records;
    if (t.repost_of && *t.repost_of == t.author_id) {
      ++stats_.self_reposts;
      return;
    }
    const auto it = by_id_.find(t.id);
    if (it != by_id_.end()) {
      ++stats_.duplicates;
      tweets_[it->second] = std::move(t);
    } else {
      by_id_.emplace(t.id, tweets_.size());
      tweets_.push_back(std::move(t));
    }
  }

  IngestResult finish() {
    return IngestResult{Corpus(std::move(tweets_)), stats_};
  }

 private:
  std::vector<Tweet> tweets_;
  std::unordered_map<std::string, std::size_t> by_id_;
  IngestStats stats_;
};

std::optional<std::string> optional_field(std::string value) {
  if (value.empty()) return std::nullopt;
  return value;
}

}  // namespace

IngestResult read_corpus_jsonl(const std::string& path, const NormalizationRules& rules) {
  const std::string content = read_text_file(path);
  IngestBuilder builder;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    const auto require_string = [&](const char* field) -> std::string {
      if (!obj.contains(field) || !obj[field].is_string()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": missing string field \"" +
                        field + "\"");
      }
      return obj[field].get<std::string>();
    };
    std::optional<std::string> repost;
    if (obj.contains("repost_of") && !obj["repost_of"].is_null()) {
      if (!obj["repost_of"].is_string()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": repost_of must be a string");
      }
      repost = optional_field(obj["repost_of"].get<std::string>());
    }
    std::int64_t ts;
    try {
      ts = parse_rfc3339(require_string("timestamp"));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    builder.add(make_tweet(require_string("id"), require_string("author_id"), ts,
                           require_string("text"), std::move(repost), rules));
  }
  return builder.finish();
}

IngestResult read_corpus_csv(const std::string& path, const NormalizationRules& rules) {
  const auto rows = csv_read_file(path);
  if (rows.empty()) return IngestBuilder().finish();
  const auto& header = rows[0];
  const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto required = [&](const std::string& name) -> std::size_t {
    if (const auto idx = column(name)) return *idx;
    throw DataError(path + ": missing CSV column \"" + name + "\"");
  };
  const std::size_t col_id = required("id");
  const std::size_t col_author = required("author_id");
  const std::size_t col_ts = required("timestamp");
  const std::size_t col_text = required("text");
  const auto col_repost = column("repost_of");
  IngestBuilder builder;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto cell = [&](std::size_t idx) -> std::string {
      if (idx >= row.size()) {
        throw DataError(path + ": row " + std::to_string(r + 1) + " has too few fields");
      }
      return row[idx];
    };
    std::int64_t ts;
    try {
      ts = parse_rfc3339(cell(col_ts));
    } catch (const DataError& e) {
      throw DataError(path + ": row " + std::to_string(r + 1) + ": " + e.what());
    }
    std::optional<std::string> repost;
    if (col_repost && *col_repost < row.size()) repost = optional_field(row[*col_repost]);
    builder.add(make_tweet(cell(col_id), cell(col_author), ts, cell(col_text),
                           std::move(repost), rules));
  }
  return builder.finish();
}

IngestResult read_corpus_file(const std::string& path, const NormalizationRules& rules) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
    return read_corpus_csv(path, rules);
  }
  return read_corpus_jsonl(path, rules);
}

std::string corpus_to_jsonl(const Corpus& c) {
  std::string out;
  for (const auto& t : c.tweets()) {
    nlohmann::json obj;
    obj["id"] = t.id;
    obj["author_id"] = t.author_id;
    obj["timestamp"] = format_rfc3339(t.timestamp);
    obj["text"] = t.text;
    if (t.repost_of) obj["repost_of"] = *t.repost_of;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

void write_corpus_jsonl(const Corpus& c, const std::string& path) {
  write_text_file(path, corpus_to_jsonl(c));
}

std::set<std::string> select_active_users(const Corpus& c, int min_posts) {
  if (min_posts < 1) throw std::invalid_argument("min_posts must be >= 1");
  std::set<std::string> out;
  for (const auto& [author, positions] : c.by_author()) {
    if (positions.size() > static_cast<std::size_t>(min_posts)) out.insert(author);
  }
  return out;
}

}  // namespace poldyn
