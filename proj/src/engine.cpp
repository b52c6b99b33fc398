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

#include "brw/engine.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "brw/error.hpp"
#include "brw/io.hpp"
#include "brw/summation.hpp"

namespace brw {

BandSchedule::BandSchedule(const ModelParams& params, int n) : n_(n)
{
    if (n < 0 || n > kMaxDepth)
        throw Error(ErrorKind::DomainError, "band schedule horizon out of range");
    samplers_.reserve(static_cast<std::size_t>(n));
    for (int g = 1; g <= n; ++g)
        samplers_.emplace_back(band(n - g, params));
}

double BandSchedule::log_weight() const
{
    CompensatedSum acc;
    for (int g = 1; g <= n_; ++g) {
        const Band& b = samplers_[g - 1].band;
        acc.add(std::ldexp(std::log(norm_mass(b.lo, b.hi)), g));
    }
    return acc.value();
}

void check_bfs_budget(int depth, std::size_t budget_bytes)
{
    if (depth < 0 || depth > kMaxDepth)
        throw Error(ErrorKind::DomainError, "generation out of range");
    if (depth >= 40 || (std::size_t{8} << depth) > budget_bytes) {
        throw Error(ErrorKind::BudgetExceeded,
                    "generation " + std::to_string(depth) + " exceeds the BFS memory budget");
    }
}

void expand_level(const SimSpec& spec, StreamKey key, int child_generation,
                  std::uint64_t first_parent, std::span<const double> parents,
                  std::span<double> children)
{
    const std::uint64_t first_child = 2 * first_parent;
    if (spec.conditioning && child_generation <= spec.conditioning->horizon()) {
        fill_truncated_gaussians(key, first_child,
                                 spec.conditioning->for_generation(child_generation), children);
    } else {
        fill_gaussians(key, first_child, children);
    }
    const std::size_t m = parents.size();
    double* c = children.data();
    const double* p = parents.data();
    for (std::size_t i = 0; i < m; ++i) {
        c[2 * i] = p[i] + c[2 * i];
        c[2 * i + 1] = p[i] + c[2 * i + 1];
    }
}

std::vector<Generation> run_bfs(const SimSpec& spec, std::size_t budget_bytes)
{
    check_bfs_budget(spec.n, budget_bytes);
    std::vector<Generation> out(static_cast<std::size_t>(spec.n) + 1);
    const StreamKey key = stream_key(spec.seed, spec.replicate);
    out[0].n = 0;
    out[0].positions.assign(1, spec.x);
    for (int g = 1; g <= spec.n; ++g) {
        const std::size_t parents = std::size_t{1} << (g - 1);
        out[g].n = g;
        out[g].positions.resize(2 * parents);
        expand_level(spec, key, g, parents, out[g - 1].positions, out[g].positions);
    }
    return out;
}

Generation extend(const SimSpec& spec, const Generation& base, int m, std::size_t budget_bytes)
{
    if (m < 0)
        throw Error(ErrorKind::DomainError, "extend requires m >= 0");
    if (base.positions.size() != (std::size_t{1} << base.n))
        throw Error(ErrorKind::PreconditionViolated, "base generation has the wrong size");
    if (m == 0)
        return base;
    check_bfs_budget(base.n + m, budget_bytes);
    const StreamKey key = stream_key(spec.seed, spec.replicate);
    Generation cur = base;
    for (int j = 1; j <= m; ++j) {
        const int g = base.n + j;
        const std::size_t parents = std::size_t{1} << (g - 1);
        Generation next;
        next.n = g;
        next.positions.resize(2 * parents);
        expand_level(spec, key, g, parents, cur.positions, next.positions);
        cur = std::move(next);
    }
    return cur;
}

void write_generation_csv(std::ostream& os, std::uint64_t replicate,
                          const std::vector<Generation>& gens)
{
    os << "replicate,generation,heap_index,position\n";
    for (const Generation& g : gens) {
        const std::uint64_t first = std::uint64_t{1} << g.n;
        for (std::size_t i = 0; i < g.positions.size(); ++i) {
            os << replicate << ',' << g.n << ',' << (first + i) << ','
               << format_double(g.positions[i]) << '\n';
        }
    }
}

} // namespace brw
