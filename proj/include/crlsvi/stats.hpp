// Copyright 2026 The crlsvi Authors.
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

#include <functional>
#include <span>
#include <vector>

namespace crlsvi::stats {

double normal_cdf(double x);

double mean(std::span<const double> xs);
// Unbiased sample variance; zero for fewer than two samples.
double variance(std::span<const double> xs);
double median(std::vector<double> xs);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Asymptotic Kolmogorov survival function with the usual small-sample
// correction of the argument.
double kolmogorov_survival(double lambda);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// Half-width of the two-sided 95% normal-approximation interval for a mean.
double ci95_half_width(std::span<const double> xs);

}  // namespace crlsvi::stats
