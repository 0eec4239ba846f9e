#include "poldyn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "poldyn/csv.hpp"
#include "poldyn/dates.hpp"
#include "poldyn/errors.hpp"
#include "poldyn/rng.hpp"
#include "poldyn/text.hpp"

namespace poldyn {

const char* stance_name(Stance s) { return kStanceNames[static_cast<int>(s)]; }

std::optional<Stance> stance_from_name(std::string_view name) {
  for (int c = 0; c < 3; ++c) {
    if (name == kStanceNames[c]) return static_cast<Stance>(c);
  }
  return std::nullopt;
}

FeatureVector extract_features(const Tweet& t) {
  FeatureVector fv;
  const auto tokens = tokenize(t.text);
  for (const auto& tok : tokens) fv["U:" + tok] += 1.0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    fv["B:" + tokens[i] + " " + tokens[i + 1]] += 1.0;
  }
  for (const auto& tag : t.hashtags) fv["H:" + tag] += 1.0;
  return fv;
}

namespace {

SparseVec featurize(const Tweet& t, const std::map<std::string, std::size_t>& vocab) {
  SparseVec x;
  for (const auto& [feature, value] : extract_features(t)) {
    const auto it = vocab.find(feature);
    if (it != vocab.end()) x.emplace_back(it->second, value);
  }
  return x;
}

std::array<double, 3> score_sparse(const std::array<std::vector<double>, 3>& w,
                                   const SparseVec& x) {
  std::array<double, 3> s{};
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    for (const auto& [id, value] : x) acc += w[c][id] * value;
    s[c] = acc;
  }
  return s;
}

int argmax_class(const std::array<double, 3>& s) {
  int best = 0;
  for (int c = 1; c < 3; ++c) {
    if (s[c] > s[best]) best = c;
  }
  return best;
}

void check_class_presence(const std::array<std::int64_t, 3>& counts, const std::string& who) {
  for (int c = 0; c < 3; ++c) {
    if (counts[c] == 0) {
      throw std::invalid_argument(who + " lacks class " + kStanceNames[c]);
    }
  }
}

}  // namespace

StanceModel train(const std::vector<LabeledTweet>& data, const TrainOptions& opt) {
  if (data.empty()) throw std::invalid_argument("train: empty data");
  if (opt.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (!(opt.reg > 0.0)) throw std::invalid_argument("train: reg must be > 0");
  std::array<std::int64_t, 3> class_count{};
  for (const auto& ex : data) ++class_count[static_cast<int>(ex.label)];
  check_class_presence(class_count, "train: data");

  StanceModel m;
  m.seed = opt.seed;
  std::vector<SparseVec> xs;
  xs.reserve(data.size());
  for (const auto& ex : data) {
    SparseVec x;
    for (const auto& [feature, value] : extract_features(ex.tweet)) {
      const auto [it, inserted] = m.vocabulary.try_emplace(feature, m.feature_names.size());
      if (inserted) m.feature_names.push_back(feature);
      x.emplace_back(it->second, value);
    }
    xs.push_back(std::move(x));
  }
  const std::size_t dim = m.feature_names.size();
  std::array<std::vector<double>, 3> v;
  for (auto& vc : v) vc.assign(dim, 0.0);
  double scale = 1.0;

  Rng rng(opt.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t t = 2;  // step counter starts past the degenerate 1/(reg*1) step
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      const SparseVec& x = xs[idx];
      const int y = static_cast<int>(data[idx].label);
      std::array<double, 3> s{};
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (const auto& [id, value] : x) acc += v[c][id] * value;
        s[c] = scale * acc;
      }
      int rival = y == 0 ? 1 : 0;
      for (int c = 0; c < 3; ++c) {
        if (c != y && s[c] > s[rival]) rival = c;
      }
      const double lr = 1.0 / (opt.reg * static_cast<double>(t));
      scale *= 1.0 - lr * opt.reg;
      if (s[y] - s[rival] < 1.0) {
        const double g = lr / scale;
        for (const auto& [id, value] : x) {
          v[y][id] += g * value;
          v[rival][id] -= g * value;
        }
      }
      if (scale < 1e-6) {
        for (auto& vc : v) {
          for (auto& value : vc) value *= scale;
        }
        scale = 1.0;
      }
      ++t;
    }
  }
  for (auto& vc : v) {
    for (auto& value : vc) value *= scale;
  }
  m.weights = v;

  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (argmax_class(score_sparse(m.weights, xs[i])) == static_cast<int>(data[i].label)) {
      ++correct;
    }
  }
  m.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return m;
}

std::array<double, 3> predict_scores(const StanceModel& m, const Tweet& t) {
  return score_sparse(m.weights, featurize(t, m.vocabulary));
}

Stance predict(const StanceModel& m, const Tweet& t) {
  return static_cast<Stance>(argmax_class(predict_scores(m, t)));
}

std::vector<int> stratified_folds(const std::vector<Stance>& labels, int k,
                                  std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("stratified_folds: k must be >= 1");
  std::array<std::vector<std::size_t>, 3> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[static_cast<int>(labels[i])].push_back(i);
  }
  Rng rng(derive_seed(seed, "folds"));
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (auto& group : groups) {
    rng.shuffle(group);
    for (const std::size_t idx : group) {
      fold[idx] = next;
      next = (next + 1) % k;
    }
  }
  return fold;
}

EvalReport cross_validate(const std::vector<LabeledTweet>& data, int k, std::uint64_t seed,
                          const TrainOptions& opt) {
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  if (data.size() < static_cast<std::size_t>(k)) {
    throw std::invalid_argument("cross_validate: fewer examples than folds");
  }
  std::vector<Stance> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.label);
  const auto fold_of = stratified_folds(labels, k, seed);

  std::array<std::int64_t, 3> total_count{};
  for (const auto& ex : data) ++total_count[static_cast<int>(ex.label)];
  std::vector<std::array<std::int64_t, 3>> fold_count(k, std::array<std::int64_t, 3>{});
  for (std::size_t i = 0; i < data.size(); ++i) {
    ++fold_count[fold_of[i]][static_cast<int>(data[i].label)];
  }

  EvalReport report;
  const std::uint64_t fold_stream = derive_seed(seed, "cv-fold");
  for (int f = 0; f < k; ++f) {
    for (int c = 0; c < 3; ++c) {
      if (total_count[c] - fold_count[f][c] == 0) {
        throw std::invalid_argument("cross_validate: training split for fold " +
                                    std::to_string(f) + " lacks class " + kStanceNames[c]);
      }
    }
    std::vector<LabeledTweet> train_split;
    std::vector<std::size_t> test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold_of[i] == f) {
        test_idx.push_back(i);
      } else {
        train_split.push_back(data[i]);
      }
    }
    TrainOptions fold_opt = opt;
    fold_opt.seed = mix_seed(fold_stream, static_cast<std::uint64_t>(f));
    const StanceModel model = train(train_split, fold_opt);
    std::size_t correct = 0;
    for (const std::size_t i : test_idx) {
      const Stance guess = predict(model, data[i].tweet);
      ++report.confusion_counts[static_cast<int>(data[i].label)][static_cast<int>(guess)];
      if (guess == data[i].label) ++correct;
    }
    report.fold_accuracy.push_back(static_cast<double>(correct) /
                                   static_cast<double>(test_idx.size()));
  }

  const double n = static_cast<double>(report.fold_accuracy.size());
  report.mean = std::accumulate(report.fold_accuracy.begin(), report.fold_accuracy.end(), 0.0) / n;
  double ss = 0.0;
  for (const double a : report.fold_accuracy) ss += (a - report.mean) * (a - report.mean);
  report.stddev = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  for (int truth = 0; truth < 3; ++truth) {
    std::int64_t row = 0;
    for (int guess = 0; guess < 3; ++guess) row += report.confusion_counts[truth][guess];
    for (int guess = 0; guess < 3; ++guess) {
      report.confusion[truth][guess] =
          row > 0 ? static_cast<double>(report.confusion_counts[truth][guess]) /
                        static_cast<double>(row)
                  : 0.0;
    }
  }
  return report;
}

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["fold_accuracy"] = report.fold_accuracy;
  doc["mean"] = report.mean;
  doc["stddev"] = report.stddev;
  doc["classes"] = {"pro", "neutral", "anti"};
  doc["confusion_counts"] = report.confusion_counts;
  doc["confusion"] = report.confusion;
  return doc.dump(2) + "\n";
}

std::string model_to_json(const StanceModel& m) {
  nlohmann::json doc;
  doc["format"] = "poldyn-stance-model";
  doc["version"] = 1;
  doc["seed"] = m.seed;
  doc["train_accuracy"] = m.train_accuracy;
  doc["classes"] = {"pro", "neutral", "anti"};
  doc["features"] = m.feature_names;
  doc["weights"] = m.weights;
  return doc.dump() + "\n";
}

StanceModel model_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != "poldyn-stance-model") {
    throw DataError("model: missing format tag");
  }
  if (doc.value("version", 0) != 1) throw DataError("model: unsupported version");
  StanceModel m;
  m.seed = doc.value("seed", std::uint64_t{0});
  m.train_accuracy = doc.value("train_accuracy", 0.0);
  m.feature_names = doc.at("features").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
    m.vocabulary[m.feature_names[i]] = i;
  }
  const auto weights = doc.at("weights");
  if (!weights.is_array() || weights.size() != 3) {
    throw DataError("model: expected 3 weight vectors");
  }
  for (int c = 0; c < 3; ++c) {
    m.weights[c] = weights[c].get<std::vector<double>>();
    if (m.weights[c].size() != m.feature_names.size()) {
      throw DataError("model: weight vector length mismatch");
    }
  }
  return m;
}

void save_model(const StanceModel& m, const std::string& path) {
  write_text_file(path, model_to_json(m));
}

StanceModel load_model(const std::string& path) {
  return model_from_json_text(read_text_file(path));
}

double cs_hinge_objective(const std::array<std::vector<double>, 3>& w,
                          const std::vector<SparseExample>& data, double reg) {
  double obj = 0.0;
  for (const auto& wc : w) {
    for (const double value : wc) obj += value * value;
  }
  obj *= reg / 2.0;
  double hinge = 0.0;
  for (const auto& ex : data) {
    const auto s = score_sparse(w, ex.x);
    int rival = ex.y == 0 ? 1 : 0;
    for (int c = 0; c < 3; ++c) {
      if (c != ex.y && s[c] > s[rival]) rival = c;
    }
    hinge += std::max(0.0, 1.0 + s[rival] - s[ex.y]);
  }
  return obj + hinge / static_cast<double>(data.size());
}

std::array<std::vector<double>, 3> cs_hinge_subgradient(
    const std::array<std::vector<double>, 3>& w, const std::vector<SparseExample>& data,
    double reg) {
  std::array<std::vector<double>, 3> grad;
  for (int c = 0; c < 3; ++c) {
    grad[c].resize(w[c].size());
    for (std::size_t i = 0; i < w[c].size(); ++i) grad[c][i] = reg * w[c][i];
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  for (const auto& ex : data) {
    const auto s = score_sparse(w, ex.x);
    int rival = ex.y == 0 ? 1 : 0;
    for (int c = 0; c < 3; ++c) {
      if (c != ex.y && s[c] > s[rival]) rival = c;
    }
    if (1.0 + s[rival] - s[ex.y] > 0.0) {
      for (const auto& [id, value] : ex.x) {
        grad[ex.y][id] -= inv_n * value;
        grad[rival][id] += inv_n * value;
      }
    }
  }
  return grad;
}

std::vector<DailyStanceRow> daily_stance_proportions(const Corpus& c, const StanceModel& m) {
  if (c.empty()) throw DataError("daily_stance_proportions: empty corpus");
  std::vector<DailyStanceRow> rows;
  const std::int32_t first = c.first_day();
  const std::int32_t last = c.last_day();
  for (std::int32_t day = first; day <= last; ++day) {
    DailyStanceRow row;
    row.day = day;
    const auto it = c.by_day().find(day);
    if (it != c.by_day().end()) {
      std::array<std::int64_t, 3> counts{};
      for (std::size_t i = it->second.first; i < it->second.second; ++i) {
        ++counts[static_cast<int>(predict(m, c[i]))];
      }
      row.total = counts[0] + counts[1] + counts[2];
      for (int k = 0; k < 3; ++k) {
        row.fraction[k] = static_cast<double>(counts[k]) / static_cast<double>(row.total);
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string daily_stance_to_csv(const std::vector<DailyStanceRow>& rows) {
  std::string out = "day,total,pro,neutral,anti\n";
  for (const auto& row : rows) {
    std::vector<std::string> fields{format_day(row.day), std::to_string(row.total)};
    if (row.total > 0) {
      for (int k = 0; k < 3; ++k) fields.push_back(fmt_double(row.fraction[k]));
    } else {
      fields.insert(fields.end(), {"", "", ""});
    }
    out += csv_join(fields);
    out.push_back('\n');
  }
  return out;
}

}  // namespace poldyn
