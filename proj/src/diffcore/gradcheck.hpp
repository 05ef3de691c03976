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

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "diffcore/params.hpp"

namespace gcgat::diff {

// A scalar function of the parameters in a store. It must rebuild its graph
// from the binding on every call and be deterministic (freeze any noise).
using ScalarFunction = std::function<Var(Binding&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  double value = 0.0;             // f at the unperturbed parameters
  std::vector<double> analytic;   // every trainable coordinate, store order
  std::vector<double> numeric;
};

// Coordinates with |analytic - numeric| > rel * (|analytic| + |numeric|) +
// floor. A floor of a few ulps of f divided by eps separates gradient bugs
// from the resolution limit of the difference quotient.
std::size_t CountOutside(const GradCheckResult& r, double rel, double floor);

// Difference-quotient resolution: ulps * machine epsilon * max(1, |f|) / eps.
double DifferenceResolution(double value, double eps, double ulps = 4.0);

// Compares reverse-mode gradients against central differences
// (f(x + eps) - f(x - eps)) / (2 eps) over every trainable coordinate. The
// error of one coordinate is |analytic - numeric| / max(1e-8, |analytic| +
// |numeric|). Parameter values are restored before returning.
GradCheckResult GradCheck(const ScalarFunction& f, ParameterStore& params,
                          double eps = 1e-5);

}  // namespace gcgat::diff
