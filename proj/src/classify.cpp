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

#include "ctrs/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ctrs/errors.hpp"

namespace ctrs {

ClassWeights class_weights(const std::vector<int>& labels) {
  std::size_t n_high = 0;
  for (int v : labels) n_high += v != 0;
  const std::size_t n = labels.size();
  const std::size_t n_low = n - n_high;
  if (n_high == 0 || n_low == 0) {
    throw ValidationError("class_weights: both classes must be present");
  }
  ClassWeights w;
  w.low = static_cast<double>(n) / (2.0 * static_cast<double>(n_low));
  w.high = static_cast<double>(n) / (2.0 * static_cast<double>(n_high));
  return w;
}

double LinearModel::decision(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != weights.size()) {
    throw ValidationError("predict: dimension mismatch (model has " +
                          std::to_string(weights.size()) + ", vector has " +
                          std::to_string(x.size()) + ")");
  }
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j)
    s += weights[j] * x(static_cast<Eigen::Index>(j));
  return s;
}

Json LinearModel::to_json() const {
  Json doc = artifact_envelope("linear_model", seed);
  doc["c"] = c;
  doc["class_weights"] = Json{{"low", class_weights.low}, {"high", class_weights.high}};
  doc["feature_space_id"] = feature_space_id;
  std::vector<int> mask(feature_mask.begin(), feature_mask.end());
  doc["feature_mask"] = mask;
  doc["scaler"] = scaler.to_json();
  doc["weights"] = weights;
  doc["bias"] = bias;
  doc["solver"] = Json{{"primal_objective", primal_objective},
                       {"dual_objective", dual_objective},
                       {"iterations", iterations}};
  return doc;
}

LinearModel LinearModel::from_json(const Json& doc) {
  check_artifact(doc, "linear_model");
  LinearModel m;
  m.seed = doc.at("created_by").at("seed").get<std::uint64_t>();
  m.c = doc.at("c").get<double>();
  m.class_weights.low = doc.at("class_weights").at("low").get<double>();
  m.class_weights.high = doc.at("class_weights").at("high").get<double>();
  m.feature_space_id = doc.at("feature_space_id").get<std::string>();
  for (int v : doc.at("feature_mask").get<std::vector<int>>())
    m.feature_mask.push_back(v != 0);
  m.scaler = ScalerStats::from_json(doc.at("scaler"));
  m.weights = doc.at("weights").get<std::vector<double>>();
  m.bias = doc.at("bias").get<double>();
  m.primal_objective = doc.at("solver").at("primal_objective").get<double>();
  m.dual_objective = doc.at("solver").at("dual_objective").get<double>();
  m.iterations = doc.at("solver").at("iterations").get<long>();
  if (m.scaler.mean.size() != m.weights.size()) {
    throw ValidationError("linear model scaler and weights disagree");
  }
  for (double w : m.weights) {
    if (!std::isfinite(w)) throw NumericalError("linear model has non-finite weights");
  }
  return m;
}

double svm_objective(const std::vector<double>& w, double b,
                     const Eigen::MatrixXd& x, const std::vector<int>& y, double c,
                     const ClassWeights& weights) {
  double reg = 0.0;
  for (double v : w) reg += v * v;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = b;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      s += w[static_cast<std::size_t>(j)] * x(i, j);
    const int yi = y[static_cast<std::size_t>(i)];
    const double sign = yi != 0 ? 1.0 : -1.0;
    loss += weights(yi) * std::max(0.0, 1.0 - sign * s);
  }
  return 0.5 * reg + c * loss;
}

namespace {

// Hinge part of the primal as a function of the intercept only.
double intercept_loss(const Eigen::VectorXd& scores, const std::vector<double>& sign,
                      const std::vector<double>& upper, double b) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    loss += upper[k] * std::max(0.0, 1.0 - sign[k] * (scores(i) + b));
  }
  return loss;
}

}  // namespace

LinearModel train_svm(const Eigen::MatrixXd& x, const std::vector<int>& y,
                      const ClassWeights& weights, const SvmOptions& options) {
  const Eigen::Index n = x.rows();
  if (static_cast<std::size_t>(n) != y.size()) {
    throw ValidationError("train_svm: row/label count mismatch");
  }
  if (!x.allFinite()) throw NumericalError("train_svm: non-finite features");
  if (!(options.c > 0.0)) throw ValidationError("train_svm: C must be positive");
  bool has[2] = {false, false};
  for (int v : y) has[v != 0] = true;
  if (!has[0] || !has[1]) {
    throw ValidationError("train_svm: need at least one sample per class");
  }

  std::vector<double> sign(static_cast<std::size_t>(n)), upper(sign.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    sign[k] = y[k] != 0 ? 1.0 : -1.0;
    upper[k] = options.c * weights(y[k]);
  }
  const Eigen::MatrixXd kernel = x * x.transpose();

  // Dual: min 1/2 a'Qa - e'a, Q_ij = s_i s_j K_ij, 0 <= a_i <= U_i, s'a = 0.
  std::vector<double> alpha(sign.size(), 0.0), grad(sign.size(), -1.0);
  auto q = [&](Eigen::Index i, Eigen::Index j) {
    return sign[static_cast<std::size_t>(i)] * sign[static_cast<std::size_t>(j)] *
           kernel(i, j);
  };
  auto in_up = [&](std::size_t t) {
    return (sign[t] > 0 && alpha[t] < upper[t]) || (sign[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (sign[t] > 0 && alpha[t] > 0) || (sign[t] < 0 && alpha[t] < upper[t]);
  };
  constexpr double kTau = 1e-12;

  long iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i_sel = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto k = static_cast<std::size_t>(t);
      if (in_up(k) && -sign[k] * grad[k] > gmax) {
        gmax = -sign[k] * grad[k];
        i_sel = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    Eigen::Index j_sel = -1;
    double best_gain = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto k = static_cast<std::size_t>(t);
      if (!in_low(k)) continue;
      const double v = -sign[k] * grad[k];
      gmin = std::min(gmin, v);
      if (i_sel < 0 || v >= gmax) continue;
      const double b = gmax - v;
      double a = kernel(i_sel, i_sel) + kernel(t, t) - 2.0 * kernel(i_sel, t);
      if (a <= 0) a = kTau;
      const double gain = -(b * b) / a;
      if (gain < best_gain) {
        best_gain = gain;
        j_sel = t;
      }
    }
    if (i_sel < 0 || j_sel < 0 || gmax - gmin < options.kkt_tolerance) break;

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_i = alpha[i], old_j = alpha[j];
    const double ci = upper[i], cj = upper[j];
    if (sign[i] != sign[j]) {
      double quad = kernel(i_sel, i_sel) + kernel(j_sel, j_sel) +
                    2.0 * q(i_sel, j_sel);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = kernel(i_sel, i_sel) + kernel(j_sel, j_sel) -
                    2.0 * q(i_sel, j_sel);
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    if (di == 0.0 && dj == 0.0) break;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[static_cast<std::size_t>(t)] += q(t, i_sel) * di + q(t, j_sel) * dj;
    }
  }

  // Intercept from free vectors (or the midpoint of the feasible interval).
  double ub = std::numeric_limits<double>::infinity();
  double lb = -ub;
  double free_sum = 0.0;
  int n_free = 0;
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    const double yg = sign[t] * grad[t];
    const bool at_upper = alpha[t] >= upper[t];
    const bool at_lower = alpha[t] <= 0.0;
    if (at_upper) {
      if (sign[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (sign[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / n_free : 0.5 * (ub + lb);

  LinearModel model;
  model.c = options.c;
  model.class_weights = weights;
  model.seed = options.seed;
  model.iterations = iter;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto k = static_cast<std::size_t>(t);
    coef(t) = alpha[k] * sign[k];
  }
  const Eigen::VectorXd w = x.transpose() * coef;
  model.weights.assign(w.data(), w.data() + w.size());

  // Exact minimization over the intercept; the hinge sum is piecewise linear
  // in b with kinks at b = s_i - w.x_i.
  const Eigen::VectorXd scores = x * w;
  double best_b = std::isfinite(rho) ? -rho : 0.0;
  double best_loss = intercept_loss(scores, sign, upper, best_b);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double kink = sign[static_cast<std::size_t>(t)] - scores(t);
    const double loss = intercept_loss(scores, sign, upper, kink);
    if (loss < best_loss - 1e-12 * (1.0 + std::abs(best_loss))) {
      best_loss = loss;
      best_b = kink;
    }
  }
  model.bias = best_b;

  double dual = 0.0;
  for (std::size_t t = 0; t < alpha.size(); ++t)
    dual += alpha[t] - 0.5 * alpha[t] * (grad[t] + 1.0);
  model.dual_objective = dual;
  model.primal_objective = 0.5 * w.squaredNorm() + best_loss;
  if (!std::isfinite(model.primal_objective) || !w.allFinite()) {
    throw NumericalError("train_svm: solver produced non-finite weights");
  }
  return model;
}

int predict(const LinearModel& model, const Eigen::VectorXd& x) {
  return model.decision(x) > 0.0 ? 1 : 0;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& x,
                               const std::vector<bool>& mask) {
  if (static_cast<std::size_t>(x.cols()) != mask.size()) {
    throw ValidationError("feature mask does not match the matrix width");
  }
  Eigen::Index kept = 0;
  for (bool m : mask) kept += m;
  Eigen::MatrixXd out(x.rows(), kept);
  Eigen::Index c = 0;
  for (std::size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) out.col(c++) = x.col(static_cast<Eigen::Index>(j));
  return out;
}

int predict_raw(const LinearModel& model, const Eigen::VectorXd& raw) {
  Eigen::MatrixXd row = raw.transpose();
  Eigen::MatrixXd scaled = apply_scaler(select_columns(row, model.feature_mask),
                                        model.scaler);
  return predict(model, scaled.row(0).transpose());
}

}  // namespace ctrs
