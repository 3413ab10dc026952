// Copyright 2026 The qrem-bias Authors
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

#pragma once

/**
 * @file
 * Deterministic Nelder-Mead simplex minimizer with restarts.
 *
 * With `adaptive` off the coefficients are the standard reflection 1,
 * expansion 2, contraction 0.5 and shrink 0.5. With it on they follow the
 * dimension-dependent choice of Gao and Han (expansion 1 + 2/d, contraction
 * 0.75 - 1/(2d), shrink 1 - 1/d), which converges far better for d > 5.
 * A run stops once the spread of simplex values falls below
 * `ftol`. The search then restarts from a fresh axis-aligned simplex around
 * the best point; it finishes when a restart improves the best value by
 * less than `ftol`, or after `max_restarts` restarts.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "qrem/error.hpp"

namespace qrem {

struct NelderMeadConfig {
  std::size_t max_evaluations = 20000;
  double ftol = 1e-10;
  double initial_step = 0.1;
  std::size_t max_restarts = 4;
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  /// Best value after each iteration; non-increasing.
  std::vector<double> history;
  std::size_t evaluations = 0;
  bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                                    std::vector<double> x0, const NelderMeadConfig& cfg = {}) {
  if (!(cfg.ftol >= 0.0) || !(cfg.initial_step > 0.0))
    throw DomainError("nelder_mead: ftol must be >= 0 and step > 0");
  const std::size_t dim = x0.size();
  NelderMeadResult res;
  bool budget_hit = false;
  auto eval = [&](const std::vector<double>& x) {
    if (res.evaluations >= cfg.max_evaluations) budget_hit = true;
    ++res.evaluations;
    const double v = f(x);
    if (!std::isfinite(v)) throw DomainError("nelder_mead: objective is not finite");
    if (res.evaluations == 1 || v < res.value) {
      res.value = v;
      res.x = x;
    }
    return v;
  };

  eval(x0);
  res.history.push_back(res.value);
  if (dim == 0) {
    res.converged = true;
    return res;
  }

  std::vector<std::vector<double>> pts(dim + 1);
  std::vector<double> vals(dim + 1);
  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);

  const double dd = static_cast<double>(dim);
  const double expand = cfg.adaptive ? 1.0 + 2.0 / dd : 2.0;
  const double contract = cfg.adaptive ? 0.75 - 0.5 / dd : 0.5;
  const double shrink = cfg.adaptive ? 1.0 - 1.0 / dd : 0.5;

  auto combine = [&](std::vector<double>& out, double a, const std::vector<double>& u,
                     const std::vector<double>& v) {
    for (std::size_t i = 0; i < dim; ++i) out[i] = u[i] + a * (v[i] - u[i]);
  };

  for (std::size_t restart = 0; restart <= cfg.max_restarts; ++restart) {
    const double start_best = res.value;
    pts[0] = res.x;
    vals[0] = res.value;
    for (std::size_t i = 0; i < dim && !budget_hit; ++i) {
      pts[i + 1] = res.x;
      pts[i + 1][i] += cfg.initial_step;
      vals[i + 1] = eval(pts[i + 1]);
    }
    while (!budget_hit) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t best = order.front(), worst = order.back(),
                        second = order[dim - 1];
      res.history.push_back(res.value);
      if (vals[worst] - vals[best] <= cfg.ftol) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k <= dim; ++k) {
        if (k == worst) continue;
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += pts[k][i];
      }
      for (double& c : centroid) c /= static_cast<double>(dim);

      combine(trial, -1.0, centroid, pts[worst]);  // reflection
      const double fr = eval(trial);
      if (fr < vals[best]) {
        combine(trial2, -expand, centroid, pts[worst]);  // expansion
        const double fe = eval(trial2);
        if (fe < fr) {
          pts[worst] = trial2;
          vals[worst] = fe;
        } else {
          pts[worst] = trial;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = trial;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      combine(trial2, outside ? -contract : contract, centroid, pts[worst]);
      const double fc = eval(trial2);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = trial2;
        vals[worst] = fc;
        continue;
      }
      for (std::size_t k = 0; k <= dim && !budget_hit; ++k) {  // shrink
        if (k == best) continue;
        combine(pts[k], shrink, pts[best], pts[k]);
        vals[k] = eval(pts[k]);
      }
    }
    if (budget_hit) break;
    if (restart > 0 && start_best - res.value < cfg.ftol) break;
  }
  res.converged = !budget_hit;
  return res;
}

}  // namespace qrem
