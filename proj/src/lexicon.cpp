#include "poldyn/lexicon.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/text.hpp"

namespace poldyn {

std::vector<std::string> term_stream(const Tweet& t) {
  auto tokens = tokenize(t.text);
  for (auto& tok : tokens) {
    if (!tok.empty() && tok[0] == '#') tok = ascii_lower(tok);
  }
  return tokens;
}

namespace {

std::set<std::string> term_set(const Tweet& t) {
  const auto stream = term_stream(t);
  return {stream.begin(), stream.end()};
}

HeuristicLabel label_terms(const std::set<std::string>& terms, const StanceLexicon& lex) {
  bool has_pro = false;
  bool has_anti = false;
  for (const auto& term : terms) {
    if (lex.pro.count(term)) has_pro = true;
    if (lex.anti.count(term)) has_anti = true;
    if (has_pro && has_anti) break;
  }
  if (has_pro && !has_anti) return HeuristicLabel::Pro;
  if (has_anti && !has_pro) return HeuristicLabel::Anti;
  return HeuristicLabel::Unlabeled;
}

}  // namespace

HeuristicLabel heuristic_label(const Tweet& t, const StanceLexicon& lex) {
  return label_terms(term_set(t), lex);
}

StanceLexicon expand_lexicons(const Corpus& c, const std::set<std::string>& seed_pro,
                              const std::set<std::string>& seed_anti, int iterations,
                              int min_count) {
  if (seed_pro.empty() || seed_anti.empty()) {
    throw std::invalid_argument("expand_lexicons: seed lists must be non-empty");
  }
  for (const auto& term : seed_pro) {
    if (seed_anti.count(term)) {
      throw std::invalid_argument("expand_lexicons: seeds overlap on '" + term + "'");
    }
  }
  if (iterations < 0) throw std::invalid_argument("expand_lexicons: iterations must be >= 0");
  if (min_count < 1) throw std::invalid_argument("expand_lexicons: min_count must be >= 1");

  StanceLexicon lex;
  lex.pro = seed_pro;
  lex.anti = seed_anti;
  for (const auto& term : seed_pro) lex.origin[term] = 0;
  for (const auto& term : seed_anti) lex.origin[term] = 0;

  std::vector<std::set<std::string>> tweet_terms;
  tweet_terms.reserve(c.size());
  for (const auto& t : c.tweets()) tweet_terms.push_back(term_set(t));

  for (int k = 1; k <= iterations; ++k) {
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;  // term -> (pro, anti)
    for (const auto& terms : tweet_terms) {
      const HeuristicLabel label = label_terms(terms, lex);
      if (label == HeuristicLabel::Unlabeled) continue;
      for (const auto& term : terms) {
        auto& entry = counts[term];
        if (label == HeuristicLabel::Pro) {
          ++entry.first;
        } else {
          ++entry.second;
        }
      }
    }
    bool grew = false;
    for (const auto& [term, entry] : counts) {
      if (lex.pro.count(term) || lex.anti.count(term)) continue;
      const auto [pro_docs, anti_docs] = entry;
      if (pro_docs >= min_count && anti_docs == 0) {
        lex.pro.insert(term);
        lex.origin[term] = k;
        grew = true;
      } else if (anti_docs >= min_count && pro_docs == 0) {
        lex.anti.insert(term);
        lex.origin[term] = k;
        grew = true;
      }
    }
    assert(std::all_of(lex.pro.begin(), lex.pro.end(),
                       [&](const std::string& t) { return !lex.anti.count(t); }));
    if (!grew) break;  // fixed point: further iterations cannot change labels
  }
  return lex;
}

double labeled_fraction(const Corpus& c, const StanceLexicon& lex) {
  if (c.empty()) throw DataError("labeled_fraction: empty corpus");
  std::size_t labeled = 0;
  for (const auto& t : c.tweets()) {
    if (heuristic_label(t, lex) != HeuristicLabel::Unlabeled) ++labeled;
  }
  return static_cast<double>(labeled) / static_cast<double>(c.size());
}

std::vector<BurstEntry> burst_hashtags(const Corpus& c, int k, double burst_ratio_min) {
  if (k < 1) throw std::invalid_argument("burst_hashtags: k must be >= 1");
  std::map<std::string, std::map<std::int32_t, std::int64_t>> per_tag;
  std::set<std::int32_t> active_days;
  for (const auto& t : c.tweets()) {
    const std::int32_t day = day_of_timestamp(t.timestamp);
    active_days.insert(day);
    for (const auto& tag : t.hashtags) ++per_tag[tag][day];
  }
  std::vector<BurstEntry> entries;
  for (const auto& [tag, days] : per_tag) {
    BurstEntry entry;
    entry.hashtag = tag;
    std::int64_t total = 0;
    for (const auto& [day, count] : days) {
      entry.series.emplace_back(day, count);
      total += count;
      if (count > entry.peak_count) {
        entry.peak_count = count;
        entry.peak_day = day;
      }
    }
    const double mean = static_cast<double>(total) / static_cast<double>(active_days.size());
    if (static_cast<double>(entry.peak_count) / mean < burst_ratio_min) continue;
    entries.push_back(std::move(entry));
  }
  std::sort(entries.begin(), entries.end(), [](const BurstEntry& a, const BurstEntry& b) {
    if (a.peak_count != b.peak_count) return a.peak_count > b.peak_count;
    return a.hashtag < b.hashtag;
  });
  if (entries.size() > static_cast<std::size_t>(k)) entries.resize(static_cast<std::size_t>(k));
  return entries;
}

std::set<std::string> load_term_list(const std::string& path, const NormalizationRules& rules) {
  const std::string content = read_text_file(path);
  std::set<std::string> terms;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    if (eol == std::string::npos) eol = content.size();
    std::string_view line(content.data() + pos, eol - pos);
    const bool last = eol == content.size();
    pos = eol + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
      line.remove_prefix(1);
    }
    if (!line.empty()) {
      std::string term = normalize_text(line, rules);
      if (!term.empty()) {
        if (term[0] == '#') term = ascii_lower(term);
        terms.insert(std::move(term));
      }
    }
    if (last) break;
  }
  return terms;
}

std::string lexicon_to_json(const StanceLexicon& lex) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [term, origin] : lex.origin) {
    doc[term] = {{"side", lex.pro.count(term) ? "pro" : "anti"}, {"origin", origin}};
  }
  return doc.dump(2) + "\n";
}

StanceLexicon lexicon_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("lexicon: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("lexicon: expected a JSON object");
  StanceLexicon lex;
  for (const auto& [term, entry] : doc.items()) {
    if (!entry.is_object() || !entry.contains("side") || !entry.contains("origin")) {
      throw DataError("lexicon: entry for '" + term + "' needs side and origin");
    }
    const std::string side = entry["side"].get<std::string>();
    if (side == "pro") {
      lex.pro.insert(term);
    } else if (side == "anti") {
      lex.anti.insert(term);
    } else {
      throw DataError("lexicon: unknown side '" + side + "'");
    }
    lex.origin[term] = entry["origin"].get<int>();
  }
  return lex;
}

std::string burst_to_csv(const std::vector<BurstEntry>& entries) {
  std::string out = "hashtag,day,count\n";
  for (const auto& entry : entries) {
    for (const auto& [day, count] : entry.series) {
      out += csv_join({entry.hashtag, format_day(day), std::to_string(count)});
      out.push_back('\n');
    }
  }
  return out;
}

}  // namespace poldyn
