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


#include "brw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "brw/error.hpp"
#include "brw/summation.hpp"

namespace brw {

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z)
{
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2 * nn)) / denom;
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    Interval iv{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    if (k == 0)
        iv.lo = 0.0;
    if (k == n)
        iv.hi = 1.0;
    return iv;
}

LinearFit ols_fit(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = x.size();
    if (n != y.size())
        throw Error(ErrorKind::DomainError, "ols: x and y differ in length");
    if (n < 3)
        throw Error(ErrorKind::EmptyWindow, "ols: fewer than three points");
    CompensatedSum sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
    }
    const double mx = sx.value() / n, my = sy.value() / n;
    CompensatedSum sxx, sxy, syy;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    if (!(sxx.value() > 0))
        throw Error(ErrorKind::EmptyWindow, "ols: x has no spread");
    LinearFit f;
    f.points = n;
    f.slope = sxy.value() / sxx.value();
    f.intercept = my - f.slope * mx;

    // HC1 sandwich on centred x, where X'X is diagonal.
    CompensatedSum ss_res, m00, m01, m11;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double e = y[i] - f.intercept - f.slope * x[i];
        ss_res.add(e * e);
        m00.add(e * e);
        m01.add(e * e * dx);
        m11.add(e * e * dx * dx);
    }
    const double nn = static_cast<double>(n);
    const double scale = nn / (nn - 2);
    const double s2 = sxx.value();
    const double v_aa = m00.value() / (nn * nn);
    const double v_ab = m01.value() / (nn * s2);
    const double v_bb = m11.value() / (s2 * s2);
    f.slope_se = std::sqrt(scale * v_bb);
    f.intercept_se = std::sqrt(std::max(0.0, scale * (v_aa - 2 * mx * v_ab + mx * mx * v_bb)));
    f.r2 = syy.value() > 0 ? 1.0 - ss_res.value() / syy.value() : 1.0;
    return f;
}

double binomial_cdf(std::uint64_t k, std::uint64_t n, double p)
{
    if (k >= n)
        return 1.0;
    if (p <= 0.0)
        return 1.0;
    if (p >= 1.0)
        return 0.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    const double ln_n1 = std::lgamma(static_cast<double>(n) + 1);
    auto log_pmf = [&](std::uint64_t i) {
        const double di = static_cast<double>(i);
        return ln_n1 - std::lgamma(di + 1) - std::lgamma(static_cast<double>(n - i) + 1) + di * lp +
               static_cast<double>(n - i) * lq;
    };
    // Sum in log space relative to the largest term.
    double hi = -INFINITY;
    std::vector<double> terms(k + 1);
    for (std::uint64_t i = 0; i <= k; ++i) {
        terms[i] = log_pmf(i);
        hi = std::max(hi, terms[i]);
    }
    CompensatedSum s;
    for (double t : terms)
        s.add(std::exp(t - hi));
    return std::min(1.0, std::exp(hi) * s.value());
}

double decay_test_pvalue(std::uint64_t k_early, std::uint64_t n_early, std::uint64_t k_late,
                         std::uint64_t n_late)
{
    const std::uint64_t total = k_early + k_late;
    if (total == 0)
        return 1.0;
    const double p = static_cast<double>(n_late) / static_cast<double>(n_early + n_late);
    return binomial_cdf(k_late, total, p);
}

MeanSe mean_se(std::span<const double> v)
{
    if (v.empty())
        return {};
    CompensatedSum s;
    for (double x : v)
        s.add(x);
    const double n = static_cast<double>(v.size());
    const double m = s.value() / n;
    CompensatedSum ss;
    for (double x : v)
        ss.add((x - m) * (x - m));
    const double var = v.size() > 1 ? ss.value() / (n - 1) : 0.0;
    return {m, std::sqrt(var / n)};
}

} // namespace brw
