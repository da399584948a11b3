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

#ifndef CTRS_OPTIMIZE_HPP_
#define CTRS_OPTIMIZE_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ctrs {

// Objective callback: writes the gradient into `grad` and returns the value.
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

struct MinimizeOptions {
  double gradient_tolerance = 1e-4;  // on the Euclidean norm of the gradient
  int max_iterations = 500;
  int history = 10;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  // Objective after each accepted step, starting with the initial point.
  std::vector<double> trace;
};

// Limited-memory BFGS with a backtracking Armijo line search. Deterministic:
// no randomness, fixed evaluation order.
MinimizeResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                              const MinimizeOptions& options = {});

}  // namespace ctrs

#endif  // CTRS_OPTIMIZE_HPP_
