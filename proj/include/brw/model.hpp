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

#include <bit>
#include <cstdint>
#include <span>

namespace brw {

inline constexpr double kLn2 = 0.69314718055994530942;

/// Heap indices are 64 bit, so generation 62 is the deepest addressable one.
inline constexpr int kMaxDepth = 62;

struct ModelParams {
    double beta = 1.0;
    double beta_c = 0.0;   ///< sqrt(2 ln 2)
    double gamma = 0.0;    ///< (beta_c / beta)^2
    double phi_beta = 0.0; ///< ln 2 - beta^2 / 2
    double q = 0.0;        ///< exp(beta^2 / 2) / 2
};

/// Throws OutOfRegime unless 0 < beta < beta_c.
ModelParams derive_params(double beta);

double critical_beta();

/// t ln 2 - x^2 / (2t). Throws DomainError for t < 1.
double varphi(double t, double x);

struct Band {
    int k = 0;
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// [beta - 1/(beta 2^k), beta - 1/(beta 2^(k+1))]
Band band(int k, const ModelParams& params);

double norm_cdf(double x);
/// Upper tail 1 - norm_cdf(x) without cancellation.
double norm_sf(double x);
/// P(lo <= xi <= hi) for a standard Gaussian, evaluated on the side of zero
/// where it does not cancel.
double norm_mass(double lo, double hi);

/// Inverse of the standard normal CDF (AS241). Throws DomainError outside (0,1).
double inv_norm_cdf(double p);

struct RngAddress {
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    std::uint64_t node_index = 1;
};

inline int node_depth(std::uint64_t node_index)
{
    return 63 - std::countl_zero(node_index);
}

/// Per (seed, replicate) stream key; node uniforms are a pure function of
/// (key, node_index).
struct StreamKey {
    std::uint64_t value = 0;
};

StreamKey stream_key(std::uint64_t seed, std::uint64_t replicate);

/// Uniform in the open interval (0, 1), resolution 2^-52.
double node_uniform(StreamKey key, std::uint64_t node_index);

double node_gaussian(const RngAddress& addr);
double truncated_node_gaussian(const RngAddress& addr, const Band& b);

/// Precomputed CDF values of a band; construction throws DegenerateBand when
/// the band carries no representable probability mass.
struct BandSampler {
    explicit BandSampler(const Band& b);
    Band band;
    double cdf_lo = 0.0;
    double cdf_hi = 0.0;
};

/// Gaussian increments for the contiguous node range [first, first + out.size()).
/// Every engine goes through these two calls, which is what makes leaf
/// positions bit-identical across engines.
void fill_gaussians(StreamKey key, std::uint64_t first, std::span<double> out);
void fill_truncated_gaussians(StreamKey key, std::uint64_t first, const BandSampler& band,
                              std::span<double> out);

} // namespace brw
