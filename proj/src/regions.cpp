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


#include "brw/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brw/error.hpp"
#include "brw/io.hpp"

namespace brw {

RegionCurve region_boundary(const RegionSpec& region)
{
    RegionCurve c;
    c.region = region;
    for (int t = 0; t < region.n; ++t) {
        const double T = region.n - t;
        const double room = T * kLn2 - region.M;
        if (room < 0)
            continue;
        const double half = std::sqrt(2 * T * room);
        c.points.push_back({t, region.L - half, region.L + half});
    }
    return c;
}

std::string region_plot_data(const RegionCurve& c)
{
    std::string out = "# t s_lower s_upper\n";
    for (const auto& p : c.points)
        out += std::to_string(p.t) + ' ' + format_double(p.lower) + ' ' + format_double(p.upper) + '\n';
    return out;
}

namespace {

void require(bool ok, const char* name, const std::string& what)
{
    if (!ok)
        throw Error(ErrorKind::PreconditionViolated, what, name);
}

bool on_lattice(double value, double origin, double step)
{
    const double j = (value - origin) / step;
    return j > -1e-9 && std::fabs(j - std::round(j)) <= 1e-9 * std::max(1.0, std::fabs(j));
}

// Verifies Lambda <= slope t - offset on {1 <= t <= n, t ln 2 - Lambda^2/(2t) >= M}.
CheckResult check_level_set(int n, double M, double slope, double offset, int density)
{
    if (density < 2)
        throw Error(ErrorKind::ConfigError, "grid density must be >= 2", "density");
    auto edge = [&](double t) { return std::sqrt(std::max(0.0, 2 * t * (t * kLn2 - M))); };
    CheckResult r;
    r.margin = std::numeric_limits<double>::infinity();
    auto visit = [&](double t, double lam) {
        const double slack = slope * t - offset - lam;
        ++r.points;
        if (slack < r.margin) {
            r.margin = slack;
            if (slack < 0)
                r.counterexample = GridPoint{t, lam};
        }
    };
    const double top = edge(n);
    const double t_min = M / kLn2;
    for (int i = 0; i < density; ++i) {
        const double t = 1.0 + (n - 1.0) * i / (density - 1);
        if (t * kLn2 < M)
            continue;
        for (int j = 0; j < density; ++j) {
            const double lam = -top + 2 * top * j / (density - 1);
            if (t * kLn2 - lam * lam / (2 * t) >= M)
                visit(t, lam);
        }
        visit(t, edge(t));
    }
    if (t_min >= 1 && t_min <= n)
        visit(t_min, 0.0);
    visit(n, top);
    r.holds = r.margin > 0;
    if (r.holds)
        r.counterexample.reset();
    return r;
}

} // namespace

std::vector<std::string> inclusion_43_constraints()
{
    return {"n_range", "epsilon_range", "delta_two_sqrt_epsilon", "delta_below_half_beta", "three_beta_delta",
            "three_delta_over_beta", "k_range", "ell_range", "ell_plus_k", "a_lattice", "a_range"};
}

CheckResult check_inclusion_43(const Inclusion43& p, int density)
{
    const ModelParams params = derive_params(p.beta);
    const double beta = p.beta, eps = p.epsilon, D = p.Delta, dl = p.delta;
    const double n = p.n;
    require(p.n >= 1, "n_range", "n must be >= 1");
    require(eps > 0 && eps < D / 4, "epsilon_range", "need 0 < epsilon < Delta/4");
    require(std::fabs(dl - 2 * std::sqrt(eps)) <= 1e-9 * dl, "delta_two_sqrt_epsilon",
            "need delta = 2 sqrt(epsilon)");
    require(dl < beta / 2, "delta_below_half_beta", "need delta < beta/2");
    require(3 * beta * dl <= D / 2 - eps, "three_beta_delta", "need 3 beta delta <= Delta/2 - epsilon");
    require(3 * dl / beta <= (D / 2 - eps) / kLn2, "three_delta_over_beta",
            "need 3 delta / beta <= (Delta/2 - epsilon) / ln 2");
    require(p.k >= 1 && p.k <= beta * n / 2, "k_range", "need 1 <= k <= beta n / 2");
    require(p.ell >= 1 && p.ell <= dl * n, "ell_range", "need 1 <= ell <= delta n");
    require(p.ell + p.k >= dl * n, "ell_plus_k", "need ell + k >= delta n");
    require(on_lattice(p.a, 0.0, eps / 2), "a_lattice", "a must be a multiple of epsilon/2");
    const double a_lo = beta * p.k + params.phi_beta * n + D * n / 2;
    const double a_hi = n * kLn2 - eps * n / 2;
    require(a_lo <= p.a * n * (1 + 1e-12) && p.a * n <= a_hi * (1 + 1e-12), "a_range",
            "need beta k + Phi(beta) n + Delta n / 2 <= a n <= n ln 2 - epsilon n / 2");
    return check_level_set(p.n, (p.a - eps) * n, beta - dl, (p.ell + p.k) / 2.0, density);
}

std::vector<std::string> disjoint_44_constraints()
{
    return {"n_range", "theta_range", "epsilon_range", "delta_below_theta", "delta_quartic_root",
            "beta_delta_six_epsilon", "phi_margin", "k_range", "b_lattice", "b_range"};
}

CheckResult check_disjoint_44(const Disjoint44& p, int density)
{
    const ModelParams params = derive_params(p.beta);
    const double beta = p.beta, eps = p.epsilon, dl = p.delta, th = p.theta;
    const double n = p.n;
    require(p.n >= 1, "n_range", "n must be >= 1");
    require(th > 0 && th < beta / 2, "theta_range", "need 0 < theta < beta/2");
    require(eps > 0 && eps < 1, "epsilon_range", "need 0 < epsilon < 1");
    require(dl > 0 && dl < th, "delta_below_theta", "need 0 < delta < theta");
    require(dl >= 4 * std::pow(eps, 0.25) * (1 - 1e-12), "delta_quartic_root",
            "need delta >= 4 epsilon^(1/4)");
    require(beta * dl > 6 * eps, "beta_delta_six_epsilon", "need beta delta > 6 epsilon");
    require(3 * eps + dl * kLn2 / (beta - std::sqrt(eps)) < std::min(params.phi_beta, kLn2 / 2),
            "phi_margin", "need 3 epsilon + delta ln 2 / (beta - sqrt(epsilon)) < min(Phi(beta), ln 2 / 2)");
    const double bt = beta - th;
    const double lambda = (bt + dl) * (bt + dl) / (2 * beta);
    require(p.k >= 1 && p.k <= lambda * n, "k_range", "need 1 <= k <= lambda n");
    const double b0 = kLn2 - (bt + dl) * (bt + dl) / 2;
    require(on_lattice(p.b, b0, eps), "b_lattice", "b must be Phi(beta - theta + delta) + j epsilon");
    require(p.b >= b0 * (1 - 1e-12) && p.b <= kLn2, "b_range", "need Phi(beta - theta + delta) <= b <= ln 2");
    const double M = p.b * n + beta * (p.k + dl * n) - 3 * eps * n;
    return check_level_set(p.n, M, beta - std::sqrt(eps), (dl * n + p.k) / 2.0, density);
}

} // namespace brw
