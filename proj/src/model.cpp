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

#include "brw/model.hpp"

#include <cmath>
#include <string>

#include "brw/error.hpp"

namespace brw {

const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::OutOfRegime: return "OutOfRegime";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateBand: return "DegenerateBand";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::Extinct: return "Extinct";
    case ErrorKind::MomentConditionFailed: return "MomentConditionFailed";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

double critical_beta() { return std::sqrt(2.0 * kLn2); }

ModelParams derive_params(double beta)
{
    const double bc = critical_beta();
    if (!(beta > 0.0) || !(beta < bc)) {
        throw Error(ErrorKind::OutOfRegime,
                    "beta must lie in (0, beta_c); got " + std::to_string(beta));
    }
    ModelParams p;
    p.beta = beta;
    p.beta_c = bc;
    // 2 ln 2 / beta^2 rather than (bc/beta)^2: keeps gamma * beta^2 / 2 == ln 2
    // up to a single rounding.
    p.gamma = 2.0 * kLn2 / (beta * beta);
    p.phi_beta = kLn2 - 0.5 * beta * beta;
    p.q = 0.5 * std::exp(0.5 * beta * beta);
    return p;
}

double varphi(double t, double x)
{
    if (!(t >= 1.0))
        throw Error(ErrorKind::DomainError, "varphi requires t >= 1");
    return t * kLn2 - x * x / (2.0 * t);
}

Band band(int k, const ModelParams& params)
{
    const double b = params.beta;
    Band out;
    out.k = k;
    out.lo = b - std::ldexp(1.0 / b, -k);
    out.hi = b - std::ldexp(1.0 / b, -(k + 1));
    return out;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double norm_sf(double x) { return 0.5 * std::erfc(x * 0.70710678118654752440); }

double norm_mass(double lo, double hi)
{
    if (lo >= 0.0)
        return norm_sf(lo) - norm_sf(hi);
    return norm_cdf(hi) - norm_cdf(lo);
}

namespace {

inline std::uint64_t mix64(std::uint64_t z)
{
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

StreamKey stream_key(std::uint64_t seed, std::uint64_t replicate)
{
    const std::uint64_t s = mix64(seed ^ 0x243f6a8885a308d3ULL);
    return StreamKey{mix64(s + replicate * 0x9e3779b97f4a7c15ULL)};
}

double node_uniform(StreamKey key, std::uint64_t node_index)
{
    const std::uint64_t h = mix64((node_index * 0x9e3779b97f4a7c15ULL) ^ key.value);
    return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

BandSampler::BandSampler(const Band& b) : band(b)
{
    if (!(b.lo < b.hi))
        throw Error(ErrorKind::DegenerateBand, "band requires lo < hi");
    cdf_lo = norm_cdf(b.lo);
    cdf_hi = norm_cdf(b.hi);
    if (!(cdf_hi - cdf_lo > 0.0))
        throw Error(ErrorKind::DegenerateBand, "band has no representable normal mass");
}

double node_gaussian(const RngAddress& addr)
{
    double v = 0.0;
    fill_gaussians(stream_key(addr.seed, addr.replicate), addr.node_index, {&v, 1});
    return v;
}

double truncated_node_gaussian(const RngAddress& addr, const Band& b)
{
    const BandSampler sampler(b);
    double v = 0.0;
    fill_truncated_gaussians(stream_key(addr.seed, addr.replicate), addr.node_index, sampler,
                             {&v, 1});
    return v;
}

} // namespace brw
