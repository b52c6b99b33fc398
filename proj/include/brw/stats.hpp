/*
   Copyright 2026 The brwlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/


#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace brw {

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for k successes out of n trials.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kWilsonZ95);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;     ///< HC1 heteroscedasticity-robust
    double intercept_se = 0.0; ///< HC1
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares of y on x with HC1 standard errors. Needs at least
/// three points and two distinct x values (EmptyWindow otherwise).
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

/// P(Bin(n, p) <= k).
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

/// One-sided exact conditional test of H0: p_late >= p_early against
/// p_late < p_early, given k_early / n_early and k_late / n_late successes.
/// Returns the p-value P(K_late <= k_late | K_early + K_late).
double decay_test_pvalue(std::uint64_t k_early, std::uint64_t n_early, std::uint64_t k_late,
                         std::uint64_t n_late);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/// Sample mean and its standard error (sample standard deviation / sqrt n),
/// accumulated with compensated sums.
MeanSe mean_se(std::span<const double> v);

} // namespace brw
