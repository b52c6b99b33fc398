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


#include "brw/biggins.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "brw/engine.hpp"
#include "brw/error.hpp"
#include "brw/martingales.hpp"
#include "brw/parallel.hpp"

namespace brw {

namespace {

// Bootstrap draws use a stream that no replicate can reach.
constexpr std::uint64_t kBootstrapStream = ~std::uint64_t{0};

double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

} // namespace

double biggins_limit(double a)
{
    return a >= 0 ? kLn2 - 0.5 * a * a : kLn2;
}

BigginsResult biggins_rate(const BigginsConfig& config)
{
    if (config.n < 1 || config.n > kMaxDepth)
        throw Error(ErrorKind::ConfigError, "n out of range", "n");
    if (config.replicates < 1)
        throw Error(ErrorKind::ConfigError, "replicates must be >= 1", "replicates");
    BigginsResult res;
    res.limit = biggins_limit(config.a);
    res.counts.assign(config.replicates, 0);
    // The walk itself does not depend on beta; any admissible value will do.
    SimSpec base;
    base.params = derive_params(1.0);
    base.n = config.n;
    base.seed = config.seed;
    const double level = config.a * config.n;
    parallel_for(config.replicates, config.threads, [&](std::size_t r) {
        SimSpec spec = base;
        spec.replicate = r;
        LevelCounter counter(level, INFINITY);
        run_dfs(spec, counter);
        res.counts[r] = counter.count();
    });
    bool any = false;
    for (std::uint64_t c : res.counts) {
        res.rates.push_back(c ? std::log(static_cast<double>(c)) / config.n : -INFINITY);
        any = any || c > 0;
    }
    if (!any)
        throw Error(ErrorKind::Extinct, "every replicate has an empty level set");
    res.estimate = median_of(res.rates);

    std::mt19937_64 rng(stream_key(config.seed, kBootstrapStream).value);
    std::uniform_int_distribution<std::size_t> pick(0, res.rates.size() - 1);
    std::vector<double> meds(std::max(1, config.bootstrap));
    std::vector<double> draw(res.rates.size());
    for (double& m : meds) {
        for (double& d : draw)
            d = res.rates[pick(rng)];
        m = median_of(draw);
    }
    std::sort(meds.begin(), meds.end());
    const auto at = [&](double q) {
        const std::size_t i = static_cast<std::size_t>(std::floor(q * (meds.size() - 1) + 0.5));
        return meds[i];
    };
    res.lo = at(0.025);
    res.hi = at(0.975);
    return res;
}

} // namespace brw
