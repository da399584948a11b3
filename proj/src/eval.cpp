// Copyright 2026 The ctrscode Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ctrs/eval.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "ctrs/errors.hpp"
#include "ctrs/parallel.hpp"

namespace ctrs {

std::vector<std::size_t> FoldPlan::training_rows(int fold) const {
  std::vector<std::size_t> rows;
  for (int f = 0; f < k; ++f) {
    if (f == fold) continue;
    rows.insert(rows.end(), fold_rows[static_cast<std::size_t>(f)].begin(),
                fold_rows[static_cast<std::size_t>(f)].end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

FoldPlan make_folds(const std::vector<std::string>& ids, int k, std::uint64_t seed,
                    const std::vector<int>* stratify_on) {
  if (k < 2) throw ValidationError("make_folds: k must be at least 2");
  if (static_cast<std::size_t>(k) > ids.size()) {
    throw ValidationError("make_folds: k = " + std::to_string(k) +
                          " exceeds the number of sessions (" +
                          std::to_string(ids.size()) + ")");
  }
  if (stratify_on && stratify_on->size() != ids.size()) {
    throw ValidationError("make_folds: stratification labels misaligned");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.stratified = stratify_on != nullptr;
  plan.fold_rows.assign(static_cast<std::size_t>(k), {});

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  if (stratify_on) {
    std::vector<std::size_t> low, high;
    for (std::size_t i = 0; i < ids.size(); ++i)
      ((*stratify_on)[i] != 0 ? high : low).push_back(i);
    groups = {std::move(high), std::move(low)};
  } else {
    std::vector<std::size_t> all(ids.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    groups = {std::move(all)};
  }
  std::size_t next_fold = 0;
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
    for (std::size_t row : g) {
      plan.fold_rows[next_fold].push_back(row);
      next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
    }
  }
  for (auto& rows : plan.fold_rows) {
    std::sort(rows.begin(), rows.end());
    auto& names = plan.fold_ids.emplace_back();
    for (std::size_t r : rows) names.push_back(ids[r]);
  }
  return plan;
}

double f1_score(long tp, long fp, long fn) {
  if (tp <= 0) return 0.0;
  const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * p * r / (p + r);
}

double pooled_f1(const std::vector<Confusion>& folds) {
  Confusion sum;
  for (const auto& c : folds) sum += c;
  return f1_score(sum.tp, sum.fp, sum.fn);
}

double mean_fold_f1(const std::vector<Confusion>& folds) {
  if (folds.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : folds) s += f1_score(c.tp, c.fp, c.fn);
  return s / static_cast<double>(folds.size());
}

namespace {

Json task_json(const TaskResult& t) {
  Json folds = Json::array();
  for (const auto& c : t.folds)
    folds.push_back(Json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}});
  return Json{{"task", t.name},
              {"f1_high", t.f1_high},
              {"f1_low", t.f1_low},
              {"single_class_folds", t.single_class_folds},
              {"folds", std::move(folds)}};
}

void finish_task(TaskResult& t) {
  Confusion sum;
  for (const auto& c : t.folds) sum += c;
  t.f1_high = f1_score(sum.tp, sum.fp, sum.fn);
  t.f1_low = f1_score(sum.tn, sum.fn, sum.fp);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

std::vector<int> take(const std::vector<int>& y, const std::vector<std::size_t>& rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(y[r]);
  return out;
}

}  // namespace

Json EvalReport::to_json() const {
  Json codes_json = Json::array();
  for (const auto& t : codes) codes_json.push_back(task_json(t));
  return Json{{"feature_set", feature_set},
              {"seed", seed},
              {"folds", folds},
              {"k", k},
              {"c", c},
              {"average_f1", average_f1},
              {"total_f1", total.f1_high},
              {"codes", std::move(codes_json)},
              {"total", task_json(total)}};
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "feature set: " << feature_set << "  (K = " << k << ", folds = " << folds
      << ", seed = " << seed << ")\n";
  char line[96];
  std::snprintf(line, sizeof line, "%-6s %9s %9s\n", "code", "F1(high)", "F1(low)");
  out << line;
  for (const auto& t : codes) {
    std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f\n", t.name.c_str(), t.f1_high,
                  t.f1_low);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-6s %9.4f\n", "avg", average_f1);
  out << line;
  std::snprintf(line, sizeof line, "%-6s %9.4f %9.4f\n", "tot", total.f1_high,
                total.f1_low);
  out << line;
  return out.str();
}

TaskLabels task_labels(const std::vector<std::string>& row_ids,
                       const LabelTable& labels) {
  TaskLabels out;
  std::string missing;
  for (const auto& id : row_ids) {
    auto it = labels.find(id);
    if (it == labels.end()) {
      missing += (missing.empty() ? "" : ", ") + id;
      continue;
    }
    const CodeLabels bin = binarize_scores(it->second);
    for (std::size_t c = 0; c < kNumCodes; ++c) out[c].push_back(bin.high[c] ? 1 : 0);
    out[kTotalTask].push_back(bin.total_high ? 1 : 0);
  }
  if (!missing.empty()) throw ValidationError("missing labels for sessions: " + missing);
  return out;
}

LinearModel fit_fold_model(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                           const std::vector<int>& y,
                           const std::vector<std::size_t>& train_rows, std::size_t k,
                           double c, std::uint64_t seed) {
  const Eigen::MatrixXd x_train = take_rows(x, train_rows);
  if (!x_train.allFinite()) throw NumericalError("non-finite feature value in training rows");
  const std::vector<int> y_train = take(y, train_rows);
  const std::vector<bool> mask =
      select_top_k(anova_f_scores(x_train, y_train), selectable, k);
  const Eigen::MatrixXd selected = select_columns(x_train, mask);
  ScalerStats scaler = fit_scaler(selected);
  SvmOptions options;
  options.c = c;
  options.seed = seed;
  LinearModel model =
      train_svm(apply_scaler(selected, scaler), y_train, class_weights(y_train), options);
  model.feature_mask = mask;
  model.scaler = std::move(scaler);
  return model;
}

TaskResult run_task(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                    const std::vector<int>& y, const FoldPlan& plan, std::size_t k,
                    double c, const FitObserver& observer) {
  TaskResult result;
  for (int f = 0; f < plan.k; ++f) {
    const auto train_rows = plan.training_rows(f);
    const auto& test_rows = plan.fold_rows[static_cast<std::size_t>(f)];
    const std::vector<int> y_train = take(y, train_rows);
    const long n_high = std::count(y_train.begin(), y_train.end(), 1);

    std::vector<int> predicted;
    if (n_high == 0 || n_high == static_cast<long>(y_train.size())) {
      ++result.single_class_folds;
      predicted.assign(test_rows.size(), n_high == 0 ? 0 : 1);
    } else {
      LinearModel model =
          fit_fold_model(x, selectable, y, train_rows, k, c, plan.seed + f);
      if (observer) observer(f, train_rows, model);
      const Eigen::MatrixXd test =
          apply_scaler(select_columns(take_rows(x, test_rows), model.feature_mask),
                       model.scaler);
      for (Eigen::Index i = 0; i < test.rows(); ++i)
        predicted.push_back(predict(model, test.row(i).transpose()));
    }
    Confusion conf;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const int truth = y[test_rows[i]];
      const int guess = predicted[i];
      conf.tp += truth == 1 && guess == 1;
      conf.fp += truth == 0 && guess == 1;
      conf.fn += truth == 1 && guess == 0;
      conf.tn += truth == 0 && guess == 0;
    }
    result.folds.push_back(conf);
  }
  finish_task(result);
  return result;
}

EvalReport run_protocol(const FeatureMatrix& m, const LabelTable& labels,
                        const ProtocolConfig& config) {
  const TaskLabels y = task_labels(m.row_ids, labels);
  const std::vector<bool> selectable = m.space->selectable_mask();
  EvalReport report;
  report.seed = config.seed;
  report.folds = config.folds;
  report.c = config.c;
  const std::size_t n_selectable =
      static_cast<std::size_t>(std::count(selectable.begin(), selectable.end(), true));
  report.k = std::min(config.k, n_selectable);

  std::array<TaskResult, kNumCodes + 1> results;
  parallel_for(kNumCodes + 1, config.threads, [&](std::size_t task) {
    const FoldPlan plan = make_folds(m.row_ids, config.folds,
                                     derive_seed(config.seed, task),
                                     config.stratify ? &y[task] : nullptr);
    results[task] = run_task(m.x, selectable, y[task], plan, report.k, config.c);
    results[task].name =
        task == kTotalTask ? std::string("total") : std::string(kCodeNames[task]);
  });
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumCodes; ++c) {
    report.codes[c] = std::move(results[c]);
    sum += report.codes[c].f1_high;
  }
  report.total = std::move(results[kTotalTask]);
  report.average_f1 = sum / static_cast<double>(kNumCodes);
  return report;
}

std::vector<std::size_t> default_k_grid(std::size_t selectable_dim) {
  std::vector<std::size_t> grid;
  for (std::size_t k : {10, 20, 50, 100, 200, 500, 1000})
    if (k < selectable_dim) grid.push_back(k);
  grid.push_back(selectable_dim);
  return grid;
}

KSelection select_k_by_cv(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                          const std::vector<int>& y_total,
                          const std::vector<std::size_t>& k_grid, int folds,
                          std::uint64_t seed, double c) {
  if (k_grid.empty()) throw ValidationError("select_k_by_cv: empty K grid");
  const std::size_t n_selectable =
      static_cast<std::size_t>(std::count(selectable.begin(), selectable.end(), true));
  std::set<std::size_t> grid(k_grid.begin(), k_grid.end());
  if (*grid.rbegin() > n_selectable) {
    throw ValidationError("select_k_by_cv: K = " + std::to_string(*grid.rbegin()) +
                          " exceeds the " + std::to_string(n_selectable) +
                          " selectable features");
  }
  std::vector<std::string> ids(y_total.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
  const FoldPlan plan = make_folds(ids, folds, derive_seed(seed, kTotalTask), &y_total);

  KSelection out;
  double best = -1.0;
  for (std::size_t k : grid) {
    const double f1 = run_task(x, selectable, y_total, plan, k, c).f1_high;
    out.grid.emplace_back(k, f1);
    if (f1 > best) {
      best = f1;
      out.k = k;
    }
  }
  out.mask = select_top_k(anova_f_scores(x, y_total), selectable, out.k);
  return out;
}

Json FiveByTwoResult::to_json() const {
  Json rows = Json::array();
  for (const auto& r : p) rows.push_back(Json::array({r[0], r[1]}));
  Json f = std::isfinite(f_statistic) ? Json(f_statistic) : Json("inf");
  if (no_difference) f = nullptr;
  return Json{{"p", std::move(rows)},
              {"f_statistic", std::move(f)},
              {"degrees", Json::array({10, 5})},
              {"critical_value", critical_value},
              {"p_value", p_value},
              {"significant", significant},
              {"no_difference", no_difference},
              {"degenerate", degenerate}};
}

FiveByTwoResult five_by_two_f_statistic(const std::array<std::array<double, 2>, 5>& p) {
  FiveByTwoResult r;
  r.p = p;
  const boost::math::fisher_f_distribution<double> dist(10.0, 5.0);
  r.critical_value = boost::math::quantile(dist, 1.0 - kSignificanceLevel);
  double num = 0.0, den = 0.0;
  for (const auto& row : p) {
    const double mean = 0.5 * (row[0] + row[1]);
    den += (row[0] - mean) * (row[0] - mean) + (row[1] - mean) * (row[1] - mean);
    num += row[0] * row[0] + row[1] * row[1];
  }
  if (num == 0.0) {
    r.no_difference = true;
    r.f_statistic = std::numeric_limits<double>::quiet_NaN();
    r.p_value = 1.0;
    return r;
  }
  if (den == 0.0) {
    r.degenerate = true;
    r.f_statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.significant = true;
    return r;
  }
  r.f_statistic = num / (2.0 * den);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.f_statistic));
  r.significant = r.f_statistic > r.critical_value;
  return r;
}

FiveByTwoResult five_by_two_cv_f_test(const FeatureMatrix& a, std::size_t k_a,
                                      const FeatureMatrix& b, std::size_t k_b,
                                      const std::vector<int>& y, std::uint64_t seed,
                                      double c) {
  if (a.row_ids != b.row_ids) {
    throw ValidationError("5x2cv: the two feature sets cover different sessions");
  }
  if (y.size() != a.row_ids.size()) throw ValidationError("5x2cv: labels misaligned");
  const auto sel_a = a.space->selectable_mask();
  const auto sel_b = b.space->selectable_mask();
  auto error_rate = [&](const FeatureMatrix& m, const std::vector<bool>& sel,
                        std::size_t k, const FoldPlan& plan, int fold) {
    const auto& test_rows = plan.fold_rows[static_cast<std::size_t>(fold)];
    const auto train_rows = plan.training_rows(fold);
    const std::vector<int> y_train = take(y, train_rows);
    const long n_high = std::count(y_train.begin(), y_train.end(), 1);
    long wrong = 0;
    if (n_high == 0 || n_high == static_cast<long>(y_train.size())) {
      const int constant = n_high == 0 ? 0 : 1;
      for (std::size_t r : test_rows) wrong += y[r] != constant;
    } else {
      const LinearModel model =
          fit_fold_model(m.x, sel, y, train_rows, k, c, plan.seed + fold);
      const Eigen::MatrixXd test = apply_scaler(
          select_columns(take_rows(m.x, test_rows), model.feature_mask), model.scaler);
      for (std::size_t i = 0; i < test_rows.size(); ++i)
        wrong += predict(model, test.row(static_cast<Eigen::Index>(i)).transpose()) !=
                 y[test_rows[i]];
    }
    return static_cast<double>(wrong) / static_cast<double>(test_rows.size());
  };

  std::array<std::array<double, 2>, 5> p{};
  for (int rep = 0; rep < 5; ++rep) {
    const FoldPlan plan =
        make_folds(a.row_ids, 2, derive_seed(seed, 100 + static_cast<std::uint64_t>(rep)), &y);
    for (int fold = 0; fold < 2; ++fold) {
      p[static_cast<std::size_t>(rep)][static_cast<std::size_t>(fold)] =
          error_rate(a, sel_a, k_a, plan, fold) - error_rate(b, sel_b, k_b, plan, fold);
    }
  }
  return five_by_two_f_statistic(p);
}

}  // namespace ctrs
