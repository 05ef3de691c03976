/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "diffcore/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcgat::diff {

namespace {

double Evaluate(const ScalarFunction& f, const ParameterStore& params) {
  Binding binding(params, /*track_gradients=*/false);
  return f(binding).item();
}

}  // namespace

GradCheckResult GradCheck(const ScalarFunction& f, ParameterStore& params,
                          double eps) {
  auto analytic = ZeroGradients(params);
  {
    Binding binding(params);
    const Var out = f(binding);
    Backward(out);
    binding.AccumulateGradients(analytic);
  }

  GradCheckResult result;
  result.value = Evaluate(f, params);
  for (std::size_t p = 0; p < params.size(); ++p) {
    Parameter& param = params[p];
    if (!param.trainable) continue;
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      const double saved = param.value[i];
      param.value[i] = saved + eps;
      const double up = Evaluate(f, params);
      param.value[i] = saved - eps;
      const double down = Evaluate(f, params);
      param.value[i] = saved;

      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[p][i];
      const double err =
          std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      ++result.coordinates;
      result.analytic.push_back(a);
      result.numeric.push_back(numeric);
      if (err > result.max_relative_error || result.worst_parameter.empty()) {
        result.max_relative_error = std::max(result.max_relative_error, err);
        if (err >= result.max_relative_error) {
          result.worst_parameter = param.name;
          result.worst_index = i;
          result.worst_analytic = a;
          result.worst_numeric = numeric;
        }
      }
    }
  }
  return result;
}

std::size_t CountOutside(const GradCheckResult& r, double rel, double floor) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.analytic.size(); ++i) {
    const double a = r.analytic[i];
    const double d = r.numeric[i];
    if (std::abs(a - d) > rel * (std::abs(a) + std::abs(d)) + floor) ++n;
  }
  return n;
}

double DifferenceResolution(double value, double eps, double ulps) {
  return ulps * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(value)) / eps;
}

}  // namespace gcgat::diff
