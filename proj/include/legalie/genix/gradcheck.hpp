#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "legalie/error.hpp"
#include "legalie/genix/model.hpp"
#include "legalie/rng.hpp"

namespace legalie::genix {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // tensor[index] with the largest error
  std::size_t coords = 0;
  std::set<std::string> tensors;  // tensors with at least one checked coordinate
};

// Central differences against the analytic gradient. Every tensor gets at
// least one coordinate; the rest are spread at random up to `min_coords`.
// Relative error is |a - n| / max(|a|, |n|, floor) so that coordinates whose
// true gradient is ~0 do not divide rounding noise by zero.
template <typename T>
GradCheckResult grad_check(Model<T>& m, const Example& ex, double eps, std::size_t min_coords = 200,
                           std::uint64_t seed = 1, double floor = 1e-6) {
  if (!(eps > 0)) throw Error("epsilon must be positive");
  Weights<T> grad = zeros_like(m.w);
  loss_and_grad(m, ex, &grad);

  std::vector<std::pair<std::string, Mat<T>*>> params;
  std::vector<const Mat<T>*> grads;
  for_each_tensor(m.w, [&](const std::string& n, Mat<T>& t) { params.emplace_back(n, &t); });
  for_each_tensor(grad, [&](const std::string&, const Mat<T>& t) { grads.push_back(&t); });

  Rng rng(seed);
  std::vector<std::pair<std::size_t, Eigen::Index>> coords;
  for (std::size_t i = 0; i < params.size(); ++i)
    coords.emplace_back(i, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(params[i].second->size()))));
  while (coords.size() < min_coords) {
    auto i = rng.below(params.size());
    coords.emplace_back(i, static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(params[i].second->size()))));
  }

  GradCheckResult res;
  for (auto [i, k] : coords) {
    T& p = params[i].second->data()[k];
    const T saved = p;
    p = saved + T(eps);
    double up = static_cast<double>(loss_and_grad<T>(m, ex, nullptr));
    p = saved - T(eps);
    double down = static_cast<double>(loss_and_grad<T>(m, ex, nullptr));
    p = saved;
    double numeric = (up - down) / (2 * eps);
    double analytic = static_cast<double>(grads[i]->data()[k]);
    double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
    if (rel > res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst = params[i].first + "[" + std::to_string(k) + "]";
    }
    res.tensors.insert(params[i].first);
    ++res.coords;
  }
  return res;
}

}  // namespace legalie::genix
