#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poldyn/corpus.hpp"

namespace poldyn {

enum class HeuristicLabel { Pro, Anti, Unlabeled };

struct StanceLexicon {
  std::set<std::string> pro;
  std::set<std::string> anti;                // always disjoint from pro
  std::map<std::string, int> origin;         // iteration that admitted the term; 0 = seed
};

// Terms of a tweet: its tokens, with '#'-prefixed tokens ASCII-lowercased so
// they line up with the hashtag list. A hashtag and its bare word are
// distinct terms.
std::vector<std::string> term_stream(const Tweet& t);

// Pro iff the tweet contains at least one pro term and no anti term; Anti
// symmetric; Unlabeled otherwise (no terms from either side, or terms from
// both).
HeuristicLabel heuristic_label(const Tweet& t, const StanceLexicon& lex);

// Recursive exclusive-term expansion. Iteration k labels the corpus with
// lexicon(k-1); a term joins side S iff it occurs in >= min_count tweets
// labeled S and in zero tweets labeled the opposite side (per-tweet document
// frequency). Terms are never removed; sides stay disjoint by construction.
// Seeds must be non-empty and disjoint; iterations >= 0; min_count >= 1.
StanceLexicon expand_lexicons(const Corpus& c, const std::set<std::string>& seed_pro,
                              const std::set<std::string>& seed_anti, int iterations = 4,
                              int min_count = 3);

// Fraction of tweets labeled Pro or Anti. Empty corpus raises DataError.
double labeled_fraction(const Corpus& c, const StanceLexicon& lex);

struct BurstEntry {
  std::string hashtag;
  std::int32_t peak_day = 0;   // earliest day attaining the peak
  std::int64_t peak_count = 0;
  std::vector<std::pair<std::int32_t, std::int64_t>> series;  // active days, ascending
};

// Hashtags ranked by maximum single-UTC-day count (ties by tag), excluding
// tags whose peak is below burst_ratio_min times their mean count over the
// corpus's active days. At most k entries.
std::vector<BurstEntry> burst_hashtags(const Corpus& c, int k,
                                       double burst_ratio_min = 3.0);

// One term per line; surrounding ASCII whitespace trimmed, empty lines
// skipped. Terms are normalized with `rules` and '#'-prefixed terms are
// ASCII-lowercased to match the term stream.
std::set<std::string> load_term_list(const std::string& path,
                                     const NormalizationRules& rules = {});

// JSON object term -> {"side": "pro"|"anti", "origin": k}.
std::string lexicon_to_json(const StanceLexicon& lex);
StanceLexicon lexicon_from_json_text(std::string_view text);

// Long-format CSV (hashtag, day, count), entries in rank order.
std::string burst_to_csv(const std::vector<BurstEntry>& entries);

}  // namespace poldyn
