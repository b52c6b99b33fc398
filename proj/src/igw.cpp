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


#include "brw/igw.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "brw/error.hpp"
#include "brw/model.hpp"
#include "brw/parallel.hpp"
#include "brw/summation.hpp"

namespace brw {

double OffspringLaw::mean() const
{
    CompensatedSum s;
    for (const auto& [v, p] : pmf)
        s.add(v * p);
    return s.value();
}

double OffspringLaw::mgf(double lambda) const
{
    CompensatedSum s;
    for (const auto& [v, p] : pmf)
        s.add(p * std::exp(lambda * v));
    return s.value();
}

int OffspringLaw::max_value() const
{
    int m = 0;
    for (const auto& [v, p] : pmf)
        if (p > 0)
            m = std::max(m, v);
    return m;
}

IGWSpec make_igw(const OffspringLaw& law, int n, std::uint64_t ell, double alpha, double h,
                 double lambda)
{
    IGWSpec s;
    s.laws.assign(n, law);
    s.n = n;
    s.ell = ell;
    s.alpha = alpha;
    s.h = h;
    s.lambda = lambda;
    validate_igw(s);
    return s;
}

void validate_igw(const IGWSpec& spec)
{
    if (spec.n < 1)
        throw Error(ErrorKind::ConfigError, "IGW horizon must be >= 1", "n");
    if (static_cast<int>(spec.laws.size()) != spec.n)
        throw Error(ErrorKind::ConfigError, "need one offspring law per generation", "laws");
    if (spec.ell < 1)
        throw Error(ErrorKind::ConfigError, "initial population must be >= 1", "ell");
    if (!(spec.alpha > 1))
        throw Error(ErrorKind::ConfigError, "need alpha > 1", "alpha");
    if (!(spec.h > 0))
        throw Error(ErrorKind::ConfigError, "need h > 0", "h");
    if (!(spec.lambda > 0))
        throw Error(ErrorKind::ConfigError, "need lambda > 0", "lambda");
    for (int i = 0; i < spec.n; ++i) {
        const auto& law = spec.laws[i];
        if (law.pmf.empty())
            throw Error(ErrorKind::ConfigError, "empty offspring law", "generation " + std::to_string(i));
        CompensatedSum total;
        for (const auto& [v, p] : law.pmf) {
            if (v < 0 || !(p >= 0) || p > 1)
                throw Error(ErrorKind::ConfigError, "bad offspring atom",
                            "generation " + std::to_string(i));
            total.add(p);
        }
        if (std::fabs(total.value() - 1.0) > 1e-12)
            throw Error(ErrorKind::ConfigError, "offspring probabilities do not sum to 1",
                        "generation " + std::to_string(i));
    }
}

std::vector<IGWSample> igw_simulate(const IGWSpec& spec, std::uint64_t replicates,
                                    std::uint64_t seed, std::uint64_t cap, int threads)
{
    validate_igw(spec);
    std::vector<IGWSample> out(replicates);
    parallel_for(replicates, threads, [&](std::size_t r) {
        std::mt19937_64 rng(stream_key(seed, r).value);
        std::uint64_t x = spec.ell;
        IGWSample s;
        for (int i = 0; i < spec.n && x > 0; ++i) {
            const auto& pmf = spec.laws[i].pmf;
            std::uint64_t rem = x, next = 0;
            double p_rem = 1.0;
            for (std::size_t a = 0; a + 1 < pmf.size() && rem > 0; ++a) {
                const double p = p_rem > 0 ? std::clamp(pmf[a].second / p_rem, 0.0, 1.0) : 1.0;
                const std::uint64_t c = std::binomial_distribution<std::uint64_t>(rem, p)(rng);
                next += c * static_cast<std::uint64_t>(pmf[a].first);
                rem -= c;
                p_rem -= pmf[a].second;
            }
            next += rem * static_cast<std::uint64_t>(pmf.back().first);
            x = next;
            if (x > cap) {
                s.cap_hit = true;
                x = cap + 1;
                break;
            }
        }
        s.value = x;
        out[r] = s;
    });
    return out;
}

IGWDistribution igw_exact_dp(const IGWSpec& spec, std::uint64_t cap, double max_ops)
{
    validate_igw(spec);
    // Operation estimate: generation i runs S_i Horner steps over vectors of
    // at most min(cap, S_{i+1}) + 1 entries, one pass per atom.
    double ops = 0.0;
    double S = static_cast<double>(std::min<std::uint64_t>(spec.ell, cap));
    for (int i = 0; i < spec.n; ++i) {
        const double next = std::min<double>(static_cast<double>(cap), S * spec.laws[i].max_value());
        ops += S * (next + 1) * static_cast<double>(spec.laws[i].pmf.size());
        S = next;
    }
    if (ops > max_ops)
        throw Error(ErrorKind::BudgetExceeded,
                    "exact IGW distribution needs about " + std::to_string(ops) + " operations");

    std::vector<double> P;
    IGWDistribution d;
    if (spec.ell > cap) {
        d.p.assign(1, 0.0);
        d.mass_above_cap = 1.0;
        return d;
    }
    P.assign(spec.ell + 1, 0.0);
    P[spec.ell] = 1.0;
    std::vector<double> acc, tmp;
    for (int i = 0; i < spec.n; ++i) {
        const auto& pmf = spec.laws[i].pmf;
        const std::size_t top = P.size() - 1;
        const std::size_t vmax = static_cast<std::size_t>(spec.laws[i].max_value());
        const std::size_t limit = std::min<std::size_t>(cap, top * vmax) + 1;
        acc.assign(limit, 0.0);
        tmp.assign(limit, 0.0);
        std::size_t len = 1;
        acc[0] = P[top];
        for (std::size_t x = top; x-- > 0;) {
            const std::size_t new_len = std::min(limit, len + vmax);
            std::fill(tmp.begin(), tmp.begin() + new_len, 0.0);
            for (const auto& [v, p] : pmf) {
                if (p == 0.0)
                    continue;
                const std::size_t off = static_cast<std::size_t>(v);
                if (off >= new_len)
                    continue;
                const std::size_t m = std::min(len, new_len - off);
                double* dst = tmp.data() + off;
                const double* src = acc.data();
                for (std::size_t j = 0; j < m; ++j)
                    dst[j] += p * src[j];
            }
            std::swap(acc, tmp);
            len = new_len;
            acc[0] += P[x];
        }
        acc.resize(len);
        P = acc;
    }
    CompensatedSum kept;
    for (double v : P)
        kept.add(v);
    d.mass_above_cap = std::max(0.0, 1.0 - kept.value());
    d.p = std::move(P);
    return d;
}

double igw_threshold(const IGWSpec& spec)
{
    double best = 0.0, prod = 1.0;
    for (int i = spec.n - 1; i >= 0; --i) {
        prod *= spec.laws[i].mean();
        best = std::max(best, prod);
    }
    const double ell = static_cast<double>(spec.ell);
    return std::max(ell, std::pow(spec.alpha + spec.h, spec.n) * ell * best);
}

double igw_rhs(int n, double h, std::uint64_t ell, double lambda, double alpha)
{
    return n * std::exp(-h * static_cast<double>(ell) * lambda / (alpha + h) + lambda);
}

IGWBoundReport igw_bound_check(const IGWSpec& spec, std::uint64_t cap)
{
    validate_igw(spec);
    if (!(spec.alpha > 1) || !(spec.h > 0) || !(spec.lambda > 0))
        throw Error(ErrorKind::ConfigError, "need alpha > 1, h > 0, lambda > 0", "alpha");
    for (int i = 0; i < spec.n; ++i) {
        const auto& law = spec.laws[i];
        const double lhs = law.mgf(spec.lambda);
        const double rhs = std::exp(spec.alpha * spec.lambda * law.mean());
        if (lhs > rhs * (1 + 1e-14))
            throw Error(ErrorKind::MomentConditionFailed,
                        "E[exp(lambda nu)] exceeds exp(alpha lambda m) at generation " + std::to_string(i),
                        "generation " + std::to_string(i));
    }
    IGWBoundReport r;
    r.threshold = igw_threshold(spec);
    r.rhs = igw_rhs(spec.n, spec.h, spec.ell, spec.lambda, spec.alpha);
    const IGWDistribution d = igw_exact_dp(spec, cap);
    r.mass_above_cap = d.mass_above_cap;
    const double first = std::ceil(r.threshold);
    CompensatedSum tail;
    for (std::size_t x = 0; x < d.p.size(); ++x)
        if (static_cast<double>(x) >= first)
            tail.add(d.p[x]);
    tail.add(d.mass_above_cap);
    r.lhs = tail.value();
    r.lhs_exact = d.mass_above_cap == 0.0;
    r.holds = r.lhs <= r.rhs;
    return r;
}

double igw_total_variation(const IGWDistribution& d, const std::vector<IGWSample>& samples)
{
    std::vector<std::uint64_t> count(d.p.size(), 0);
    std::uint64_t over = 0, beyond = 0;
    for (const auto& s : samples) {
        if (s.cap_hit)
            ++over;
        else if (s.value < count.size())
            ++count[s.value];
        else
            ++beyond;
    }
    const double R = static_cast<double>(samples.size());
    CompensatedSum tv;
    for (std::size_t x = 0; x < count.size(); ++x)
        tv.add(std::fabs(static_cast<double>(count[x]) / R - d.p[x]));
    tv.add(std::fabs(static_cast<double>(over) / R - d.mass_above_cap));
    tv.add(static_cast<double>(beyond) / R);
    return 0.5 * tv.value();
}

} // namespace brw
