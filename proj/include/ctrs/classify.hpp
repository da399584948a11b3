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

#ifndef CTRS_CLASSIFY_HPP_
#define CTRS_CLASSIFY_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ctrs/artifact.hpp"
#include "ctrs/features.hpp"

namespace ctrs {

// Binary labels are 0 = low, 1 = high throughout; the solver maps them to
// -1/+1 internally.
struct ClassWeights {
  double low = 1.0;
  double high = 1.0;

  double operator()(int label) const { return label != 0 ? high : low; }
};

// w_c = N / (2 N_c). Throws ValidationError unless both classes occur.
ClassWeights class_weights(const std::vector<int>& labels);

struct SvmOptions {
  double c = 1.0;
  double kkt_tolerance = 1e-10;  // maximal violating pair gap
  long max_iterations = 20'000'000;
  std::uint64_t seed = 0;
};

struct LinearModel {
  std::vector<double> weights;  // over the selected, scaled features
  double bias = 0.0;
  double c = 1.0;
  ClassWeights class_weights;
  std::uint64_t seed = 0;

  // How raw features reach the weights: mask over the full space, then z-scale.
  std::string feature_space_id;
  std::vector<bool> feature_mask;
  ScalerStats scaler;

  // Solver diagnostics.
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  long iterations = 0;

  // Decision value on an already selected and scaled vector.
  double decision(const Eigen::VectorXd& x) const;
  Json to_json() const;
  static LinearModel from_json(const Json& doc);
};

// (1/2)||w||^2 + C * sum_i weight(y_i) * max(0, 1 - s_i (w.x_i + b)),
// s_i = -1/+1 for y_i = 0/1.
double svm_objective(const std::vector<double>& w, double b,
                     const Eigen::MatrixXd& x, const std::vector<int>& y, double c,
                     const ClassWeights& weights);

// Dual SMO (maximal-violating-pair with second-order working-set choice),
// followed by an exact line minimization of the primal over the intercept.
// Deterministic: the seed is recorded but no step is random.
LinearModel train_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                      const ClassWeights& weights, const SvmOptions& options = {});

// high (1) iff w.x + b > 0; an exact zero is low.
int predict(const LinearModel& model, const Eigen::VectorXd& x);

// Applies the stored mask and scaler to a full-space raw feature vector.
int predict_raw(const LinearModel& model, const Eigen::VectorXd& raw);

// Columns of `x` kept by `mask`, in order.
Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x, const std::vector<bool>& mask);

}  // namespace ctrs

#endif  // CTRS_CLASSIFY_HPP_
