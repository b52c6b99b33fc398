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
#include <vector>

namespace brw {

struct BigginsConfig {
    double a = 0.0;
    int n = 22;
    std::uint64_t replicates = 50;
    std::uint64_t seed = 0;
    int threads = 1;
    int bootstrap = 1000;
};

struct BigginsResult {
    double estimate = 0.0;  ///< median over replicates of (1/n) ln L_n(a n, inf)
    double lo = 0.0;        ///< bootstrap percentile interval, 95%
    double hi = 0.0;
    double limit = 0.0;     ///< ln 2 - a^2/2 1{a >= 0}
    std::vector<std::uint64_t> counts;
    std::vector<double> rates; ///< -inf where the level set is empty
};

double biggins_limit(double a);

/// Throws Extinct when every replicate has an empty level set.
BigginsResult biggins_rate(const BigginsConfig& config);

} // namespace brw
