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

#include "ctrs/optimize.hpp"

#include <cmath>
#include <deque>
#include <numeric>

#include "ctrs/errors.hpp"

namespace ctrs {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

MinimizeResult minimize_lbfgs(const Objective& f, std::vector<double> x0,
                              const MinimizeOptions& options) {
  const std::size_t n = x0.size();
  MinimizeResult result;
  result.x = std::move(x0);
  std::vector<double> g(n), x_new(n), g_new(n), dir(n), alpha_buf;
  double fx = f(result.x, g);
  if (!std::isfinite(fx)) throw NumericalError("objective is not finite at x0");
  result.trace.push_back(fx);

  std::deque<Pair> history;
  for (int iter = 0;; ++iter) {
    const double gnorm = norm(g);
    result.value = fx;
    result.gradient_norm = gnorm;
    result.iterations = iter;
    if (gnorm <= options.gradient_tolerance) {
      result.converged = true;
      result.stop_reason = "gradient tolerance reached";
      return result;
    }
    if (iter >= options.max_iterations) {
      result.stop_reason = "maximum iterations reached";
      return result;
    }

    // Two-loop recursion for dir = -H g.
    for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i];
    alpha_buf.assign(history.size(), 0.0);
    for (std::size_t k = history.size(); k-- > 0;) {
      alpha_buf[k] = history[k].rho * dot(history[k].s, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha_buf[k] * history[k].y[i];
    }
    double gamma = 1.0 / std::max(gnorm, 1.0);
    if (!history.empty()) {
      const Pair& last = history.back();
      gamma = dot(last.s, last.y) / dot(last.y, last.y);
    }
    for (double& d : dir) d *= gamma;
    for (std::size_t k = 0; k < history.size(); ++k) {
      double beta = history[k].rho * dot(history[k].y, dir);
      for (std::size_t i = 0; i < n; ++i)
        dir[i] += (alpha_buf[k] - beta) * history[k].s[i];
    }
    double slope = dot(g, dir);
    if (!(slope < 0.0)) {
      // Not a descent direction; restart from steepest descent.
      history.clear();
      for (std::size_t i = 0; i < n; ++i) dir[i] = -g[i] / std::max(gnorm, 1.0);
      slope = dot(g, dir);
    }

    double step = 1.0;
    bool accepted = false;
    double f_new = fx;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = result.x[i] + step * dir[i];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || !(f_new < fx || norm(g_new) < gnorm)) {
      result.stop_reason = "line search made no progress";
      return result;
    }

    Pair p;
    p.s.resize(n);
    p.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      p.s[i] = x_new[i] - result.x[i];
      p.y[i] = g_new[i] - g[i];
    }
    const double sy = dot(p.s, p.y);
    if (sy > 1e-12 * norm(p.s) * norm(p.y)) {
      p.rho = 1.0 / sy;
      history.push_back(std::move(p));
      if (history.size() > static_cast<std::size_t>(options.history))
        history.pop_front();
    }
    result.x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    result.trace.push_back(fx);
  }
}

}  // namespace ctrs
