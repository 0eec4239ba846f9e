#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poldyn/corpus.hpp"

namespace poldyn {

enum class Stance : int { Pro = 0, Neutral = 1, Anti = 2 };

inline constexpr std::array<const char*, 3> kStanceNames = {"pro", "neutral", "anti"};

const char* stance_name(Stance s);
std::optional<Stance> stance_from_name(std::string_view name);

// Sparse feature counts keyed by namespaced feature strings:
//   U:<token>           unigram (raw token, hashtags included)
//   B:<tok1> <tok2>     adjacent token bigram
//   H:<#tag>            hashtag (lowercased, as in Tweet::hashtags)
using FeatureVector = std::map<std::string, double>;

FeatureVector extract_features(const Tweet& t);

struct LabeledTweet {
  Tweet tweet;
  Stance label = Stance::Neutral;
};

struct TrainOptions {
  std::uint64_t seed = 0;
  int epochs = 40;
  double reg = 1e-4;
};

// Linear one-vs-all-scored multiclass model trained with the Crammer-Singer
// hinge loss. Deterministic for fixed (data order, options).
struct StanceModel {
  std::map<std::string, std::size_t> vocabulary;  // feature -> id
  std::vector<std::string> feature_names;         // id -> feature, first-seen order
  std::array<std::vector<double>, 3> weights;     // per class, indexed by id
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
};

// Requires at least one example per class (error names the missing class).
StanceModel train(const std::vector<LabeledTweet>& data, const TrainOptions& opt = {});

std::array<double, 3> predict_scores(const StanceModel& m, const Tweet& t);
// Argmax of scores; ties take the lowest class index (Pro < Neutral < Anti).
// Out-of-vocabulary features are ignored; an all-OOV tweet scores (0,0,0).
Stance predict(const StanceModel& m, const Tweet& t);

struct EvalReport {
  std::vector<double> fold_accuracy;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
  std::array<std::array<std::int64_t, 3>, 3> confusion_counts{};  // [truth][pred]
  std::array<std::array<double, 3>, 3> confusion{};               // row-normalized
};

// Deterministic stratified fold assignment: indices grouped by class in data
// order, each group shuffled with the shared seeded engine (class order Pro,
// Neutral, Anti), then dealt round-robin to folds 0..k-1, the deal counter
// carrying over between classes so fold sizes stay within one of each other.
std::vector<int> stratified_folds(const std::vector<Stance>& labels, int k,
                                  std::uint64_t seed);

// k-fold stratified cross-validation; the vocabulary is rebuilt per fold from
// the training split only. opt.seed is replaced by a per-fold derivation of
// `seed`. A class missing from some training split is an error naming the
// fold.
EvalReport cross_validate(const std::vector<LabeledTweet>& data, int k, std::uint64_t seed,
                          const TrainOptions& opt = {});

std::string eval_report_to_json(const EvalReport& report);

std::string model_to_json(const StanceModel& m);
StanceModel model_from_json_text(std::string_view text);
void save_model(const StanceModel& m, const std::string& path);
StanceModel load_model(const std::string& path);

// Regularized Crammer-Singer hinge objective and its subgradient, exposed for
// the finite-difference check: f(W) = reg/2 * sum_c |w_c|^2 +
// 1/n * sum_i max(0, 1 + max_{c != y_i} s_c - s_{y_i}).
using SparseVec = std::vector<std::pair<std::size_t, double>>;
struct SparseExample {
  SparseVec x;
  int y = 0;
};
double cs_hinge_objective(const std::array<std::vector<double>, 3>& w,
                          const std::vector<SparseExample>& data, double reg);
std::array<std::vector<double>, 3> cs_hinge_subgradient(
    const std::array<std::vector<double>, 3>& w, const std::vector<SparseExample>& data,
    double reg);

struct DailyStanceRow {
  std::int32_t day = 0;
  std::int64_t total = 0;             // 0 = empty day (null marker in CSV)
  std::array<double, 3> fraction{};   // pro, neutral, anti; zeros when total == 0
};

// One row per day from the first to the last corpus day inclusive. Empty
// corpus raises DataError.
std::vector<DailyStanceRow> daily_stance_proportions(const Corpus& c, const StanceModel& m);

// Header day,total,pro,neutral,anti; empty days leave the fraction cells
// blank.
std::string daily_stance_to_csv(const std::vector<DailyStanceRow>& rows);

}  // namespace poldyn
