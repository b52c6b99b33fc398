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

#include "brw/martingales.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brw/error.hpp"
#include "brw/vector_math.hpp"

namespace brw {

namespace {

constexpr std::size_t kFoldChunk = 256;
constexpr double kMaxExpArg = 700.0;

} // namespace

MartingaleFold::MartingaleFold(double beta, int n, double x) : beta_(beta), n_(n), x_(x) {}

void MartingaleFold::add(std::span<const double> positions)
{
    alignas(64) double s[kFoldChunk];
    alignas(64) double arg[kFoldChunk];
    alignas(64) double e[kFoldChunk];
    const double bn = beta_ * n_;
    const double shift = 0.5 * beta_ * beta_ * n_;
    for (std::size_t off = 0; off < positions.size(); off += kFoldChunk) {
        const std::size_t m = std::min(kFoldChunk, positions.size() - off);
        const double* p = positions.data() + off;
        double hi = -INFINITY;
        for (std::size_t i = 0; i < m; ++i) {
            s[i] = p[i] - x_;
            arg[i] = beta_ * s[i] - shift;
            hi = std::max(hi, arg[i]);
        }
        if (hi > kMaxExpArg)
            throw Error(ErrorKind::DomainError, "exponent argument exceeds 700");
        vecmath::exp_n(arg, e, m);
        w_.add({e, m});
        for (std::size_t i = 0; i < m; ++i)
            arg[i] = (bn - s[i]) * e[i];
        z_.add({arg, m});
        for (std::size_t i = 0; i < m; ++i)
            arg[i] = std::fabs(arg[i]);
        zabs_.add({arg, m});
    }
    count_ += positions.size();
}

void MartingaleFold::merge(const MartingaleFold& other)
{
    w_merged_.add(other.w_.total());
    w_merged_.add(other.w_merged_);
    z_merged_.add(other.z_.total());
    z_merged_.add(other.z_merged_);
    zabs_merged_.add(other.zabs_.total());
    zabs_merged_.add(other.zabs_merged_);
    count_ += other.count_;
}

double MartingaleFold::W() const
{
    CompensatedSum t = w_.total();
    t.add(w_merged_);
    return std::ldexp(t.value(), -n_);
}

double MartingaleFold::Z() const
{
    CompensatedSum t = z_.total();
    t.add(z_merged_);
    return std::ldexp(t.value(), -n_);
}

double MartingaleFold::Z_abs() const
{
    CompensatedSum t = zabs_.total();
    t.add(zabs_merged_);
    return std::ldexp(t.value(), -n_);
}

double MartingaleFold::shifted_Z() const
{
    return std::exp(beta_ * x_) * (Z() - x_ * W());
}

MartingaleSnapshot MartingaleFold::snapshot() const
{
    MartingaleSnapshot s;
    s.n = n_;
    s.x = x_;
    s.W = W();
    s.Z = Z();
    s.Z_shifted = shifted_Z();
    return s;
}

double additive_W(std::span<const double> leaves, double beta, int n)
{
    MartingaleFold f(beta, n);
    f.add(leaves);
    return f.W();
}

double derivative_Z(std::span<const double> leaves, double beta, int n)
{
    MartingaleFold f(beta, n);
    f.add(leaves);
    return f.Z();
}

double shifted_Z(std::span<const double> leaves, double beta, int n, double x)
{
    MartingaleFold f(beta, n);
    std::vector<double> shifted(leaves.begin(), leaves.end());
    for (double& v : shifted)
        v += x;
    f.add(shifted);
    return f.Z();
}

IntervalSet IntervalSet::real_line()
{
    IntervalSet s;
    s.add(-INFINITY, INFINITY);
    return s;
}

IntervalSet& IntervalSet::add(double a, double b)
{
    if (!(a < b))
        throw Error(ErrorKind::DomainError, "interval requires a < b");
    iv_.emplace_back(a, b);
    return *this;
}

bool IntervalSet::contains(double y) const
{
    for (const auto& [a, b] : iv_) {
        if (y > a && y <= b)
            return true;
    }
    return false;
}

double restricted_Z(std::span<const double> leaves, double beta, int n, double x,
                    const IntervalSet& set)
{
    std::vector<double> kept;
    kept.reserve(leaves.size());
    for (double s : leaves) {
        const double y = x + s;
        if (set.contains(y))
            kept.push_back(y);
    }
    MartingaleFold f(beta, n);
    f.add(kept);
    return f.Z();
}

std::uint64_t level_count(std::span<const double> leaves, int /*n*/, const LevelQuery& q)
{
    if (!(q.a < q.b))
        throw Error(ErrorKind::DomainError, "level query requires a < b");
    std::uint64_t c = 0;
    for (double s : leaves) {
        const double y = q.x + s;
        c += (y > q.a && y <= q.b) ? 1 : 0;
    }
    return c;
}

namespace {

class HitDetector {
public:
    explicit HitDetector(const RegionSpec& r) : r_(r) {}

    void on_node(int depth, double pos)
    {
        if (result_.hit)
            return;
        if (varphi(r_.n - depth, r_.L - pos) >= r_.M) {
            result_.hit = true;
            result_.witness = HitWitness{depth, pos};
        }
    }
    bool done() const { return result_.hit; }
    const HitResult& result() const { return result_; }

private:
    RegionSpec r_;
    HitResult result_;
};

} // namespace

HitResult hit_event_A(const SimSpec& spec, const RegionSpec& region)
{
    if (region.n != spec.n)
        throw Error(ErrorKind::PreconditionViolated, "region horizon differs from spec", "n");
    if (region.x != spec.x)
        throw Error(ErrorKind::PreconditionViolated, "region shift differs from spec", "x");
    if (spec.n == 0 || region.M > spec.n * kLn2)
        return {};
    HitDetector det(region);
    run_dfs(spec, det);
    return det.result();
}

double exact_second_moment_W(double beta, int n)
{
    if (n < 0)
        throw Error(ErrorKind::DomainError, "n must be >= 0");
    const double qp = 0.5 * std::exp(beta * beta);
    CompensatedSum acc;
    for (int j = 0; j < n; ++j)
        acc.add(0.5 * std::pow(qp, j));
    acc.add(std::pow(qp, n));
    return acc.value();
}

double exact_second_moment_Z(double beta, int n)
{
    if (n < 0)
        throw Error(ErrorKind::DomainError, "n must be >= 0");
    const double qp = 0.5 * std::exp(beta * beta);
    const double b2 = beta * beta;
    auto pair_term = [&](int j) {
        const double jj = j;
        return std::pow(qp, j) * (b2 * jj * jj + jj);
    };
    CompensatedSum acc;
    for (int j = 0; j < n; ++j)
        acc.add(0.5 * pair_term(j));
    acc.add(pair_term(n));
    return acc.value();
}

double derivative_cap(double beta, int n)
{
    return std::exp(0.5 * beta * beta * n - 1.0) / beta;
}

} // namespace brw
