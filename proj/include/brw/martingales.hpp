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
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brw/engine.hpp"
#include "brw/summation.hpp"

namespace brw {

struct MartingaleSnapshot {
    int n = 0;
    double x = 0.0;
    double W = 1.0;
    double Z = 0.0;
    double Z_shifted = 0.0; ///< e^{beta x}(Z - x W)
    std::map<std::string, double> extras;
};

/// Streaming fold of W_n and Z_n over generation-n positions. Positions are
/// x + S_u; the fold subtracts `x` before forming the terms, so W() and Z()
/// are the unshifted martingales (exact when x == 0).
///
/// Also a DFS leaf-block visitor (order-insensitive, mergeable).
class MartingaleFold {
public:
    MartingaleFold(double beta, int n, double x = 0.0);

    void add(std::span<const double> positions);
    void on_leaves(std::span<const double> positions) { add(positions); }

    MartingaleFold fork() const { return MartingaleFold(beta_, n_, x_); }
    void merge(const MartingaleFold& other);

    double W() const;
    double Z() const;
    /// Sum of |terms| of Z normalized like Z; the natural scale for relative
    /// error statements about a sign-indefinite sum.
    double Z_abs() const;
    double shifted_Z() const;
    MartingaleSnapshot snapshot() const;
    std::uint64_t count() const { return count_; }

private:
    double beta_;
    int n_;
    double x_;
    LaneSum w_;
    LaneSum z_;
    LaneSum zabs_;
    CompensatedSum w_merged_;
    CompensatedSum z_merged_;
    CompensatedSum zabs_merged_;
    std::uint64_t count_ = 0;
};

// Leaf-stream forms. `leaves` holds S_u for the 2^n particles of generation n
// (root at 0).
double additive_W(std::span<const double> leaves, double beta, int n);
double derivative_Z(std::span<const double> leaves, double beta, int n);
/// Direct evaluation of 2^-n sum (beta n - x - S_u) e^{beta (x + S_u) - beta^2 n / 2}.
double shifted_Z(std::span<const double> leaves, double beta, int n, double x);

/// Finite union of half-open intervals (a, b]; a may be -inf, b may be +inf.
class IntervalSet {
public:
    IntervalSet() = default;
    static IntervalSet real_line();
    IntervalSet& add(double a, double b);
    bool contains(double y) const;
    const std::vector<std::pair<double, double>>& intervals() const { return iv_; }

private:
    std::vector<std::pair<double, double>> iv_;
};

double restricted_Z(std::span<const double> leaves, double beta, int n, double x,
                    const IntervalSet& set);

struct LevelQuery {
    double a = -std::numeric_limits<double>::infinity();
    double b = std::numeric_limits<double>::infinity();
    double x = 0.0;
};

/// Number of particles with x + S_u in (a, b].
std::uint64_t level_count(std::span<const double> leaves, int n, const LevelQuery& q);

/// DFS visitor counting generation-n particles in (a, b] (positions already
/// include the shift).
class LevelCounter {
public:
    LevelCounter(double a, double b) : a_(a), b_(b) {}
    void on_leaves(std::span<const double> positions)
    {
        for (double p : positions)
            count_ += (p > a_ && p <= b_) ? 1 : 0;
    }
    LevelCounter fork() const { return LevelCounter(a_, b_); }
    void merge(const LevelCounter& o) { count_ += o.count_; }
    std::uint64_t count() const { return count_; }

private:
    double a_;
    double b_;
    std::uint64_t count_ = 0;
};

struct RegionSpec {
    int n = 0;
    double L = 0.0;
    double M = 0.0;
    double x = 0.0;
};

struct HitWitness {
    int depth = 0;
    double position = 0.0;
};

struct HitResult {
    bool hit = false;
    std::optional<HitWitness> witness;
};

/// Event A: some node u with |u| < n has varphi(n - |u|, L - (x + S_u)) >= M.
/// Depth-n nodes are not examined. The witness is the first hit in pre-order.
HitResult hit_event_A(const SimSpec& spec, const RegionSpec& region);

double exact_second_moment_W(double beta, int n);
double exact_second_moment_Z(double beta, int n);

/// Deterministic cap (beta e)^-1 e^{n beta^2 / 2} on Z_n.
double derivative_cap(double beta, int n);

} // namespace brw
