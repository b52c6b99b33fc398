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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace brw {

/// Finite-support offspring law: (value, probability) pairs.
struct OffspringLaw {
    std::vector<std::pair<int, double>> pmf;

    double mean() const;
    double mgf(double lambda) const; ///< E[e^{lambda nu}]
    int max_value() const;
};

struct IGWSpec {
    std::vector<OffspringLaw> laws; ///< laws[i] is used by generation i, i = 0..n-1
    int n = 0;
    std::uint64_t ell = 1;          ///< X_0
    double alpha = 2.0;
    double h = 1.0;
    double lambda = 0.1;
};

/// Same law for every generation.
IGWSpec make_igw(const OffspringLaw& law, int n, std::uint64_t ell, double alpha, double h,
                 double lambda);

/// Throws ConfigError unless every law is a probability vector on values
/// >= 0 and laws.size() == n.
void validate_igw(const IGWSpec& spec);

struct IGWSample {
    std::uint64_t value = 0;
    bool cap_hit = false; ///< population exceeded the cap; value is cap + 1
};

/// R independent trajectories. Replicate r draws from mt19937_64 seeded with
/// the (seed, r) stream key.
std::vector<IGWSample> igw_simulate(const IGWSpec& spec, std::uint64_t replicates,
                                    std::uint64_t seed, std::uint64_t cap, int threads = 1);

struct IGWDistribution {
    std::vector<double> p; ///< P(X_n = x, population never above cap), x = 0..cap
    /// Mass of trajectories whose population exceeded the cap at some
    /// generation (a population above the cap may still die out later).
    double mass_above_cap = 0.0;
};

/// Exact law of X_n by Horner-style composition of the offspring generating
/// functions, truncated at cap. Throws BudgetExceeded when the operation
/// count estimate exceeds `max_ops`.
IGWDistribution igw_exact_dp(const IGWSpec& spec, std::uint64_t cap, double max_ops = 2e10);

/// max{ell, (alpha + h)^n ell max_{0 <= i < n} prod_{j=i}^{n-1} m_j}
double igw_threshold(const IGWSpec& spec);

/// n exp(-h ell lambda / (alpha + h) + lambda)
double igw_rhs(int n, double h, std::uint64_t ell, double lambda, double alpha);

struct IGWBoundReport {
    double threshold = 0.0;
    double lhs = 0.0;           ///< P(X_n >= threshold), or an upper bound
    bool lhs_exact = true;      ///< false when the threshold lies beyond the cap
    double rhs = 0.0;
    double mass_above_cap = 0.0;
    bool holds = false;
};

/// Throws MomentConditionFailed naming the first generation with
/// E[e^{lambda nu_i}] > e^{alpha lambda m_i}.
IGWBoundReport igw_bound_check(const IGWSpec& spec, std::uint64_t cap);

/// Total variation distance between a DP law and simulated samples; cap
/// overflow is treated as one extra atom.
double igw_total_variation(const IGWDistribution& d, const std::vector<IGWSample>& samples);

} // namespace brw
