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

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "brw/model.hpp"
#include "brw/parallel.hpp"

namespace brw {

/// Band-conditioned law of the first n generations: every increment of
/// generation g (1 <= g <= n) is drawn from band(n - g).
class BandSchedule {
public:
    BandSchedule(const ModelParams& params, int n);

    int horizon() const { return n_; }
    /// Sampler for generation g in [1, horizon()].
    const BandSampler& for_generation(int g) const { return samplers_[g - 1]; }
    /// Sum over generations of 2^g ln P(xi in band(n - g)).
    double log_weight() const;

private:
    int n_;
    std::vector<BandSampler> samplers_;
};

struct SimSpec {
    ModelParams params;
    int n = 0;
    double x = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::shared_ptr<const BandSchedule> conditioning; ///< null for the plain law
};

struct Generation {
    int n = 0;
    std::vector<double> positions; ///< x + S_u in heap order
};

/// Largest single generation the BFS engine will materialize: 2^24 doubles.
inline constexpr std::size_t kDefaultBfsBudget = std::size_t{128} << 20;

/// Throws BudgetExceeded when generation `depth` would not fit `budget_bytes`.
void check_bfs_budget(int depth, std::size_t budget_bytes);

/// Children of the contiguous parent range starting at heap index
/// `first_parent`, placed into `children` (twice the parent count).
/// Increments of generations 1..horizon() of the schedule are band-conditioned
/// when the spec carries one; later generations are always free.
void expand_level(const SimSpec& spec, StreamKey key, int child_generation,
                  std::uint64_t first_parent, std::span<const double> parents,
                  std::span<double> children);

std::vector<Generation> run_bfs(const SimSpec& spec, std::size_t budget_bytes = kDefaultBfsBudget);

/// Continues `base` by m generations using heap indices below each particle.
Generation extend(const SimSpec& spec, const Generation& base, int m,
                  std::size_t budget_bytes = kDefaultBfsBudget);

/// Reusable ping-pong buffers for streaming one generation at a time.
class GenerationSweep {
public:
    /// Calls fn(g, positions) for g = 0..depth. Generations past the
    /// conditioning horizon are unconditioned.
    template <class Fn>
    void run(const SimSpec& spec, int depth, Fn&& fn,
             std::size_t budget_bytes = kDefaultBfsBudget)
    {
        check_bfs_budget(depth, budget_bytes);
        const StreamKey key = stream_key(spec.seed, spec.replicate);
        const std::size_t cap = std::size_t{1} << depth;
        if (a_.size() < cap) {
            a_.resize(cap);
            b_.resize(cap);
        }
        double* cur = a_.data();
        double* nxt = b_.data();
        cur[0] = spec.x;
        fn(0, std::span<const double>(cur, 1));
        for (int g = 1; g <= depth; ++g) {
            const std::size_t parents = std::size_t{1} << (g - 1);
            expand_level(spec, key, g, parents, {cur, parents}, {nxt, 2 * parents});
            std::swap(cur, nxt);
            fn(g, std::span<const double>(cur, 2 * parents));
        }
    }

private:
    std::vector<double> a_;
    std::vector<double> b_;
};

/// Raw-generation dump: replicate,generation,heap_index,position.
void write_generation_csv(std::ostream& os, std::uint64_t replicate,
                          const std::vector<Generation>& gens);

// ---------------------------------------------------------------------------
// Depth-first engine.
//
// A visitor may implement any of
//   on_node(int depth, double position)           internal nodes, pre-order
//   on_leaf(double position)                      leaves, left to right
//   on_leaves(std::span<const double>)            leaf blocks, left to right
//   on_level(int depth, std::span<const double>)  every depth incl. n, blocks
//                                                 left to right within a depth
//   bool done() const                             stop early
// Visitors that also provide `V fork() const` and `void merge(const V&)` are
// treated as order-insensitive: the engine then splits the tree at a fixed
// depth, runs the subtrees on a worker pool and merges the partial visitors
// in subtree order, so results do not depend on the thread count.

template <class V>
concept NodeVisitor = requires(V& v, int d, double p) { v.on_node(d, p); };
template <class V>
concept LeafVisitor = requires(V& v, double p) { v.on_leaf(p); };
template <class V>
concept LeafBlockVisitor = requires(V& v, std::span<const double> s) { v.on_leaves(s); };
template <class V>
concept LevelVisitor = requires(V& v, int d, std::span<const double> s) { v.on_level(d, s); };
template <class V>
concept StoppableVisitor = requires(const V& v) {
    { v.done() } -> std::convertible_to<bool>;
};
template <class V>
concept MergeableVisitor = requires(V& v, const V& w) {
    { w.fork() } -> std::same_as<V>;
    v.merge(w);
};

struct DfsOptions {
    int block_levels = 11; ///< generations expanded breadth-first below each frontier node
    int split_depth = 6;   ///< subtree roots for parallel runs of mergeable visitors
    int threads = 1;
};

namespace detail {

template <class V>
bool visitor_done(const V& v)
{
    if constexpr (StoppableVisitor<V>)
        return v.done();
    else
        return false;
}

template <class... Vs>
bool all_done(const Vs&... vs)
{
    if constexpr (sizeof...(Vs) == 0)
        return false;
    else
        return (visitor_done(vs) && ...);
}

template <class V>
void emit_node(V& v, int depth, double pos)
{
    if constexpr (NodeVisitor<V>)
        v.on_node(depth, pos);
    if constexpr (LevelVisitor<V>)
        v.on_level(depth, std::span<const double>(&pos, 1));
}

template <class V>
void emit_leaves(V& v, std::span<const double> leaves)
{
    if constexpr (LeafBlockVisitor<V>) {
        v.on_leaves(leaves);
    } else if constexpr (LeafVisitor<V>) {
        for (double p : leaves)
            v.on_leaf(p);
    }
}

class DfsWalker {
public:
    DfsWalker(const SimSpec& spec, int block_levels)
        : spec_(spec), key_(stream_key(spec.seed, spec.replicate))
    {
        const int b = std::max(1, block_levels);
        frontier_ = std::max(0, spec.n - b);
        levels_ = spec.n - frontier_;
        offsets_.resize(static_cast<std::size_t>(levels_) + 2);
        std::size_t off = 0;
        for (int j = 0; j <= levels_; ++j) {
            offsets_[j] = off;
            off += std::size_t{1} << j;
        }
        offsets_[levels_ + 1] = off;
        block_.resize(off);
    }

    int frontier() const { return frontier_; }

    double child_position(std::uint64_t child, double parent_pos) const
    {
        double xi = 0.0;
        const int g = node_depth(child);
        if (spec_.conditioning && g <= spec_.conditioning->horizon())
            fill_truncated_gaussians(key_, child, spec_.conditioning->for_generation(g), {&xi, 1});
        else
            fill_gaussians(key_, child, {&xi, 1});
        return parent_pos + xi;
    }

    /// Pre-order traversal of the subtree rooted at (node, pos). Returns
    /// false when every visitor asked to stop.
    template <class... Vs>
    bool walk(std::uint64_t node, double pos, Vs&... vs)
    {
        const int d = node_depth(node);
        if (d == frontier_)
            return expand_block(node, pos, vs...);
        (emit_node(vs, d, pos), ...);
        if (all_done(vs...))
            return false;
        const std::uint64_t left = 2 * node;
        if (!walk(left, child_position(left, pos), vs...))
            return false;
        return walk(left + 1, child_position(left + 1, pos), vs...);
    }

private:
    template <class... Vs>
    bool expand_block(std::uint64_t root, double pos, Vs&... vs)
    {
        double* base = block_.data();
        base[0] = pos;
        for (int j = 1; j <= levels_; ++j) {
            const std::size_t parents = std::size_t{1} << (j - 1);
            expand_level(spec_, key_, frontier_ + j, root << (j - 1),
                         {base + offsets_[j - 1], parents}, {base + offsets_[j], 2 * parents});
        }
        constexpr bool any_node = (NodeVisitor<Vs> || ...);
        constexpr bool any_level = (LevelVisitor<Vs> || ...);
        if constexpr (any_node) {
            if (!preorder(0, 0, vs...))
                return false;
        }
        if constexpr (any_level) {
            auto level = [&](auto& v) {
                if constexpr (LevelVisitor<std::remove_reference_t<decltype(v)>>) {
                    for (int j = 0; j <= levels_; ++j)
                        v.on_level(frontier_ + j,
                                   std::span<const double>(base + offsets_[j], std::size_t{1} << j));
                }
            };
            (level(vs), ...);
        }
        const std::span<const double> leaves(base + offsets_[levels_], std::size_t{1} << levels_);
        (emit_leaves(vs, leaves), ...);
        return !all_done(vs...);
    }

    template <class... Vs>
    bool preorder(int j, std::size_t i, Vs&... vs)
    {
        if (j == levels_)
            return true;
        const double p = block_[offsets_[j] + i];
        auto one = [&](auto& v) {
            if constexpr (NodeVisitor<std::remove_reference_t<decltype(v)>>)
                v.on_node(frontier_ + j, p);
        };
        (one(vs), ...);
        if (all_done(vs...))
            return false;
        if (!preorder(j + 1, 2 * i, vs...))
            return false;
        return preorder(j + 1, 2 * i + 1, vs...);
    }

    const SimSpec& spec_;
    StreamKey key_;
    int frontier_ = 0;
    int levels_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<double> block_;
};

/// Visits only the nodes strictly above `split` (used before the subtrees
/// are handed to workers).
template <class... Vs>
void walk_top(const DfsWalker& w, std::uint64_t node, double pos, int split, Vs&... vs)
{
    const int d = node_depth(node);
    if (d == split)
        return;
    (emit_node(vs, d, pos), ...);
    walk_top(w, 2 * node, w.child_position(2 * node, pos), split, vs...);
    walk_top(w, 2 * node + 1, w.child_position(2 * node + 1, pos), split, vs...);
}

inline void collect_roots(const DfsWalker& w, std::uint64_t node, double pos, int split,
                          std::vector<std::pair<std::uint64_t, double>>& out)
{
    if (node_depth(node) == split) {
        out.emplace_back(node, pos);
        return;
    }
    collect_roots(w, 2 * node, w.child_position(2 * node, pos), split, out);
    collect_roots(w, 2 * node + 1, w.child_position(2 * node + 1, pos), split, out);
}

} // namespace detail

template <class... Vs>
void run_dfs(const SimSpec& spec, const DfsOptions& opts, Vs&... visitors)
{
    detail::DfsWalker walker(spec, opts.block_levels);
    constexpr bool mergeable = (MergeableVisitor<Vs> && ...);
    const int split = std::min(opts.split_depth, walker.frontier());
    if constexpr (mergeable) {
        if (split > 0) {
            detail::walk_top(walker, 1, spec.x, split, visitors...);
            std::vector<std::pair<std::uint64_t, double>> roots;
            detail::collect_roots(walker, 1, spec.x, split, roots);
            std::vector<std::tuple<Vs...>> parts;
            parts.reserve(roots.size());
            for (std::size_t i = 0; i < roots.size(); ++i)
                parts.emplace_back(visitors.fork()...);
            parallel_for(roots.size(), opts.threads, [&](std::size_t i) {
                detail::DfsWalker local(spec, opts.block_levels);
                std::apply([&](auto&... v) { local.walk(roots[i].first, roots[i].second, v...); },
                           parts[i]);
            });
            for (auto& part : parts)
                std::apply([&](const auto&... v) { (visitors.merge(v), ...); }, part);
            return;
        }
    }
    walker.walk(1, spec.x, visitors...);
}

template <class... Vs>
void run_dfs(const SimSpec& spec, Vs&... visitors)
{
    run_dfs(spec, DfsOptions{}, visitors...);
}

} // namespace brw
