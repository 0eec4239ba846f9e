#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace poldyn {

// ---------------------------------------------------------------------------
// Text normalization: an ordered rule list applied codepoint-wise, with an
// optional trailing run-compression stage. The whole list is validated to be
// idempotent (applying it twice equals applying it once).

struct FoldRule {
  std::map<char32_t, std::u32string> map;
};

struct MarkRemovalRule {
  std::set<char32_t> marks;
};

struct ReplaceRule {
  std::map<char32_t, std::u32string> map;
};

struct ElongationRule {
  int max_run = 2;  // runs of one codepoint longer than this are compressed
};

using NormalizationRule =
    std::variant<FoldRule, MarkRemovalRule, ReplaceRule, ElongationRule>;

class NormalizationRules {
 public:
  NormalizationRules() = default;
  // Throws ConfigError when the list is not idempotent: every fold/replace
  // image must be a fixed point of the full pipeline, and no codepoint rule
  // may follow a compress_elongation rule.
  explicit NormalizationRules(std::vector<NormalizationRule> rules);

  // JSON document: {"rules":[
  //   {"type":"fold","map":{"<cp>":"<string>",...}},
  //   {"type":"remove_marks","marks":["<cp>",...]},
  //   {"type":"replace","map":{"<cp>":"<string>",...}},
  //   {"type":"compress_elongation","max_run":2}]}
  // Map keys and mark entries must be exactly one codepoint.
  static NormalizationRules from_json_text(std::string_view json_text);
  static NormalizationRules load(const std::string& path);

  const std::vector<NormalizationRule>& rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

 private:
  void validate() const;
  std::vector<NormalizationRule> rules_;
};

std::string normalize_text(std::string_view text, const NormalizationRules& rules);

// ---------------------------------------------------------------------------

struct Tweet {
  std::string id;
  std::string author_id;
  std::int64_t timestamp = 0;  // Unix seconds, UTC
  std::string text;            // stored normalized
  std::optional<std::string> repost_of;  // author reposted, never == author_id
  std::vector<std::string> hashtags;     // in-order extraction from text
};

// Corpus order: (timestamp, id) lexicographic.
bool tweet_order_less(const Tweet& a, const Tweet& b);

// Normalizes the text and derives the hashtag list.
Tweet make_tweet(std::string id, std::string author_id, std::int64_t timestamp,
                 std::string_view raw_text,
                 std::optional<std::string> repost_of = std::nullopt,
                 const NormalizationRules& rules = {});

// Immutable sorted tweet store with author and UTC-day indices.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Tweet> tweets);  // sorts; ids must be unique

  const std::vector<Tweet>& tweets() const { return tweets_; }
  std::size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }
  const Tweet& operator[](std::size_t i) const { return tweets_[i]; }

  const std::map<std::string, std::vector<std::size_t>>& by_author() const {
    return author_index_;
  }
  // day -> [first, last) positions; days with no tweets are absent.
  const std::map<std::int32_t, std::pair<std::size_t, std::size_t>>& by_day() const {
    return day_index_;
  }
  std::int32_t first_day() const;  // requires non-empty
  std::int32_t last_day() const;

 private:
  std::vector<Tweet> tweets_;
  std::map<std::string, std::vector<std::size_t>> author_index_;
  std::map<std::int32_t, std::pair<std::size_t, std::size_t>> day_index_;
};

struct IngestStats {
  std::size_t records = 0;      // parsed input records
  std::size_t duplicates = 0;   // repeated ids (last record wins)
  std::size_t self_reposts = 0; // repost_of == author_id, dropped
};

struct IngestResult {
  Corpus corpus;
  IngestStats stats;
};

// JSON Lines, one object per line with fields
// {"id","author_id","timestamp"(RFC-3339),"text","repost_of"(optional)}.
// Malformed lines raise DataError naming the line number.
IngestResult read_corpus_jsonl(const std::string& path,
                               const NormalizationRules& rules = {});
// CSV with a header row carrying the same column names.
IngestResult read_corpus_csv(const std::string& path,
                             const NormalizationRules& rules = {});
// Dispatches on extension: ".csv" -> CSV, anything else -> JSON Lines.
IngestResult read_corpus_file(const std::string& path,
                              const NormalizationRules& rules = {});

std::string corpus_to_jsonl(const Corpus& c);
void write_corpus_jsonl(const Corpus& c, const std::string& path);

// Users with strictly more than min_posts items in c. min_posts >= 1.
std::set<std::string> select_active_users(const Corpus& c, int min_posts);

}  // namespace poldyn
