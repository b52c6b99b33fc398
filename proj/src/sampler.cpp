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

// Batched inverse normal CDF (Wichura, AS241 PPND16).
//
// Every element first gets the central rational approximation, which
// vectorizes. Elements with |p - 0.5| > 0.425 (about 15%) are then compacted,
// their logarithms taken in one vector call, and the tail approximation
// overwrites the central value. The scalar entry points run the same code on
// a batch of one, so scalar and batched draws agree bit for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>

#if defined(__AVX512F__) && defined(__AVX512VL__)
#include <immintrin.h>
#endif

#include "brw/error.hpp"
#include "brw/model.hpp"
#include "brw/vector_math.hpp"

namespace brw {
namespace {

constexpr std::size_t kChunk = 512;

inline double central(double q)
{
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
}

// r = sqrt(-log(min(p, 1-p))). Both branches are evaluated so the loop stays
// branch free.
inline double tail(double r)
{
    const double a = r - 1.6;
    const double b = r - 5.0;
    const double near =
        (((((((a * 7.7454501427834140764e-4 + 0.0227238449892691845833) * a +
              0.24178072517745061177) * a + 1.27045825245236838258) * a +
            3.64784832476320460504) * a + 5.7694972214606914055) * a +
          4.6303378461565452959) * a + 1.42343711074968357734) /
        (((((((a * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * a +
              0.0151986665636164571966) * a + 0.14810397642748007459) * a +
            0.68976733498510000455) * a + 1.6763848301838038494) * a +
          2.05319162663775882187) * a + 1.0);
    const double far =
        (((((((b * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * b +
              0.0012426609473880784386) * b + 0.026532189526576123093) * b +
            0.29656057182850489123) * b + 1.7848265399172913358) * b +
          5.4637849111641143699) * b + 6.6579046435011037772) /
        (((((((b * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * b +
              1.8463183175100546818e-5) * b + 7.868691311456132591e-4) * b +
            0.0148753612908506148525) * b + 0.13692988092273580531) * b +
          0.59983220655588793769) * b + 1.0);
    return r <= 5.0 ? near : far;
}

struct TailScratch {
    alignas(64) double r[kChunk + 8];
    alignas(64) double sign[kChunk + 8];
    alignas(64) double lg[kChunk + 8];
    alignas(64) std::uint32_t idx[kChunk + 8];
};

inline std::size_t compact_scalar(const double* p, std::size_t begin, std::size_t n,
                                  TailScratch& s, std::size_t c)
{
    for (std::size_t i = begin; i < n; ++i) {
        const double q = p[i] - 0.5;
        s.idx[c] = static_cast<std::uint32_t>(i);
        s.r[c] = std::min(p[i], 1.0 - p[i]);
        s.sign[c] = q;
        c += std::fabs(q) > 0.425 ? 1 : 0;
    }
    return c;
}

std::size_t compact_tails(const double* p, std::size_t n, TailScratch& s)
{
    std::size_t c = 0;
    std::size_t i = 0;
#if defined(__AVX512F__) && defined(__AVX512VL__)
    const __m512d half = _mm512_set1_pd(0.5);
    const __m512d one = _mm512_set1_pd(1.0);
    const __m512d lim = _mm512_set1_pd(0.425);
    const __m256i lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
    for (; i + 8 <= n; i += 8) {
        const __m512d u = _mm512_loadu_pd(p + i);
        const __m512d q = _mm512_sub_pd(u, half);
        const __mmask8 m = _mm512_cmp_pd_mask(_mm512_abs_pd(q), lim, _CMP_GT_OQ);
        const __m512d r = _mm512_min_pd(u, _mm512_sub_pd(one, u));
        _mm512_mask_compressstoreu_pd(s.r + c, m, r);
        _mm512_mask_compressstoreu_pd(s.sign + c, m, q);
        _mm256_mask_compressstoreu_epi32(
            s.idx + c, m, _mm256_add_epi32(lane, _mm256_set1_epi32(static_cast<int>(i))));
        c += static_cast<std::size_t>(__builtin_popcount(m));
    }
#endif
    return compact_scalar(p, i, n, s, c);
}

// out[i] = inverse CDF of p[i] for n <= kChunk values in (0, 1).
void inv_cdf_chunk(const double* p, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = central(p[i] - 0.5);

    TailScratch s;
    const std::size_t c = compact_tails(p, n, s);
    if (c == 0)
        return;
    vecmath::log_n(s.r, s.lg, c);
    for (std::size_t j = 0; j < c; ++j)
        s.r[j] = std::copysign(tail(std::sqrt(-s.lg[j])), s.sign[j]);
    for (std::size_t j = 0; j < c; ++j)
        out[s.idx[j]] = s.r[j];
}

} // namespace

double inv_norm_cdf(double p)
{
    if (!(p > 0.0) || !(p < 1.0))
        throw Error(ErrorKind::DomainError, "inv_norm_cdf requires 0 < p < 1");
    double v = 0.0;
    inv_cdf_chunk(&p, &v, 1);
    return v;
}

void fill_gaussians(StreamKey key, std::uint64_t first, std::span<double> out)
{
    alignas(64) double u[kChunk];
    for (std::size_t off = 0; off < out.size(); off += kChunk) {
        const std::size_t n = std::min(kChunk, out.size() - off);
        const std::uint64_t base = first + off;
        for (std::size_t i = 0; i < n; ++i)
            u[i] = node_uniform(key, base + i);
        inv_cdf_chunk(u, out.data() + off, n);
    }
}

void fill_truncated_gaussians(StreamKey key, std::uint64_t first, const BandSampler& band,
                              std::span<double> out)
{
    constexpr double kMinP = 0x1.0p-1022;
    constexpr double kMaxP = 1.0 - 0x1.0p-53;
    const double lo = band.band.lo;
    const double hi = band.band.hi;
    const double mass = band.cdf_hi - band.cdf_lo;
    alignas(64) double p[kChunk];
    for (std::size_t off = 0; off < out.size(); off += kChunk) {
        const std::size_t n = std::min(kChunk, out.size() - off);
        const std::uint64_t base = first + off;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = band.cdf_lo + node_uniform(key, base + i) * mass;
            p[i] = std::clamp(v, kMinP, kMaxP);
        }
        double* dst = out.data() + off;
        inv_cdf_chunk(p, dst, n);
        // Rounding in F(lo) + u(F(hi) - F(lo)) can leave the band by an ulp.
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = std::clamp(dst[i], lo, hi);
    }
}

} // namespace brw
