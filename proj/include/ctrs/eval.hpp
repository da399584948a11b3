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

#ifndef CTRS_EVAL_HPP_
#define CTRS_EVAL_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/classify.hpp"
#include "ctrs/corpus.hpp"
#include "ctrs/features.hpp"

namespace ctrs {

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = false;
  std::vector<std::vector<std::string>> fold_ids;
  std::vector<std::vector<std::size_t>> fold_rows;  // sorted row indices

  // Rows of every fold except `fold`, sorted.
  std::vector<std::size_t> training_rows(int fold) const;
};

// Shuffled partition into k folds whose sizes differ by at most one. With
// `stratify_on`, each class is dealt round-robin so per-fold class counts
// stay within one of the global ratio. Throws ValidationError if k < 2 or
// k > n.
FoldPlan make_folds(const std::vector<std::string>& ids, int k, std::uint64_t seed,
                    const std::vector<int>* stratify_on = nullptr);

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  Confusion& operator+=(const Confusion& o) {
    tp += o.tp; fp += o.fp; fn += o.fn; tn += o.tn;
    return *this;
  }
  bool operator==(const Confusion&) const = default;
};

// F1 from counts; 0 when there are no true positives.
double f1_score(long tp, long fp, long fn);
// F1 of the summed counts over folds (not the mean of per-fold F1).
double pooled_f1(const std::vector<Confusion>& folds);
double mean_fold_f1(const std::vector<Confusion>& folds);

struct TaskResult {
  std::string name;
  double f1_high = 0.0;
  double f1_low = 0.0;
  std::vector<Confusion> folds;
  int single_class_folds = 0;  // folds whose training half had one class
};

struct EvalReport {
  std::string feature_set;
  std::uint64_t seed = 0;
  int folds = 0;
  std::size_t k = 0;
  double c = 1.0;
  std::array<TaskResult, kNumCodes> codes;
  TaskResult total;
  double average_f1 = 0.0;  // mean high-class F1 over the 11 codes

  Json to_json() const;
  // Fixed-width text table: one row per code plus "avg" and "tot".
  std::string to_table() const;
};

struct ProtocolConfig {
  static constexpr std::size_t kAllFeatures = std::numeric_limits<std::size_t>::max();
  std::size_t k = kAllFeatures;  // K best selectable features
  double c = 1.0;
  int folds = 5;
  std::uint64_t seed = 0;
  bool stratify = true;
  int threads = 1;
};

// Called once per fold with the rows a fit saw and the trained model.
using FitObserver = std::function<void(int fold, const std::vector<std::size_t>&,
                                       const LinearModel&)>;

// Labels aligned to rows: [0..10] the codes, [11] the total.
using TaskLabels = std::array<std::vector<int>, kNumCodes + 1>;
inline constexpr std::size_t kTotalTask = kNumCodes;

// Throws ValidationError listing every row id absent from the table.
TaskLabels task_labels(const std::vector<std::string>& row_ids,
                       const LabelTable& labels);

// F-selection, scaling and the SVM fitted on the training rows only.
LinearModel fit_fold_model(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                           const std::vector<int>& y,
                           const std::vector<std::size_t>& train_rows, std::size_t k,
                           double c, std::uint64_t seed);

TaskResult run_task(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                    const std::vector<int>& y, const FoldPlan& plan, std::size_t k,
                    double c, const FitObserver& observer = nullptr);

// Full cross-validation over the 11 codes and the total. Each task gets its
// own fold plan, stratified on that task's labels.
EvalReport run_protocol(const FeatureMatrix& m, const LabelTable& labels,
                        const ProtocolConfig& config);

struct KSelection {
  std::size_t k = 0;
  std::vector<bool> mask;  // top-k by F on all rows, plus fixed blocks
  std::vector<std::pair<std::size_t, double>> grid;  // (k, pooled total F1)
};

// Picks the K with the best pooled total-CTRS F1 (ties to the smaller K).
KSelection select_k_by_cv(const Eigen::MatrixXd& x, const std::vector<bool>& selectable,
                          const std::vector<int>& y_total,
                          const std::vector<std::size_t>& k_grid, int folds,
                          std::uint64_t seed, double c = 1.0);

// Default grid: 10, 20, 50, 100, 200, 500, 1000 (those below the selectable
// width) plus the full selectable width.
std::vector<std::size_t> default_k_grid(std::size_t selectable_dim);

struct FiveByTwoResult {
  std::array<std::array<double, 2>, 5> p{};  // error(A) - error(B)
  double f_statistic = 0.0;
  double p_value = 1.0;
  double critical_value = 0.0;  // F(10, 5) at 0.05
  bool significant = false;
  bool no_difference = false;  // every p_ij is zero
  bool degenerate = false;     // all s_i^2 zero but some p_ij non-zero

  Json to_json() const;
};

inline constexpr double kSignificanceLevel = 0.05;

// Combined 5x2cv F statistic from the difference matrix.
FiveByTwoResult five_by_two_f_statistic(const std::array<std::array<double, 2>, 5>& p);

// Five replications of stratified 2-fold CV on one task; p_ij is the
// error-rate difference on fold j of replication i.
FiveByTwoResult five_by_two_cv_f_test(const FeatureMatrix& a, std::size_t k_a,
                                      const FeatureMatrix& b, std::size_t k_b,
                                      const std::vector<int>& y, std::uint64_t seed,
                                      double c = 1.0);

}  // namespace ctrs

#endif  // CTRS_EVAL_HPP_
