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
#include <optional>
#include <string>
#include <vector>

#include "brw/martingales.hpp"

namespace brw {

struct RegionPoint {
    int t = 0;           ///< depth
    double lower = 0.0;  ///< L - sqrt(2T(T ln 2 - M)), T = n - t
    double upper = 0.0;  ///< L + sqrt(2T(T ln 2 - M))
};

struct RegionCurve {
    RegionSpec region;
    std::vector<RegionPoint> points; ///< depths where the level set is nonempty
};

/// Boundary {(t, s): varphi(n - t, L - s) = M} for t = 0..n-1. Empty when M
/// exceeds n ln 2.
RegionCurve region_boundary(const RegionSpec& region);

/// Plot data: t s_lower s_upper per line.
std::string region_plot_data(const RegionCurve& c);

struct GridPoint {
    double t = 0.0;
    double lambda = 0.0;
};

struct CheckResult {
    bool holds = false;
    double margin = 0.0; ///< smallest slack of the concluded inequality
    std::optional<GridPoint> counterexample;
    std::size_t points = 0; ///< feasible points examined
};

struct Inclusion43 {
    double beta = 1.0;
    double Delta = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    int n = 0;
    int k = 0;
    int ell = 0;
    double a = 0.0;
};

/// Checks that every (t, Lambda) with 1 <= t <= n and
/// varphi(t, Lambda) >= (a - eps) n satisfies
/// Lambda <= (beta - delta) t - (ell + k) / 2, on a density x density grid
/// plus the exact upper boundary at every grid t and at t = t_min, n.
/// Throws PreconditionViolated naming the failed constraint.
CheckResult check_inclusion_43(const Inclusion43& p, int density);

struct Disjoint44 {
    double beta = 1.0;
    double theta = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    int n = 0;
    int k = 0;
    double b = 0.0;
};

/// Checks that every (t, Lambda) with 1 <= t <= n and
/// varphi(t, Lambda) >= b n + beta (k + delta n) - 3 eps n satisfies
/// Lambda <= (beta - sqrt(eps)) t - (delta n + k) / 2.
CheckResult check_disjoint_44(const Disjoint44& p, int density);

/// Constraint names used in PreconditionViolated errors, in checking order.
std::vector<std::string> inclusion_43_constraints();
std::vector<std::string> disjoint_44_constraints();

} // namespace brw
