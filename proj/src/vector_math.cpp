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

#include "brw/vector_math.hpp"

#include <cmath>

namespace brw::vecmath {
namespace {

inline void exp8(const double* __restrict in, double* __restrict out)
{
#if defined(BRW_HAVE_MVEC)
#pragma omp simd simdlen(8)
#endif
    for (int j = 0; j < 8; ++j)
        out[j] = std::exp(in[j]);
}

inline void log8(const double* __restrict in, double* __restrict out)
{
#if defined(BRW_HAVE_MVEC)
#pragma omp simd simdlen(8)
#endif
    for (int j = 0; j < 8; ++j)
        out[j] = std::log(in[j]);
}

template <void (*Kernel)(const double* __restrict, double* __restrict)>
void apply(const double* in, double* out, std::size_t n, double pad)
{
    alignas(64) double a[8];
    alignas(64) double b[8];
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        for (int j = 0; j < 8; ++j)
            a[j] = in[i + j];
        Kernel(a, b);
        for (int j = 0; j < 8; ++j)
            out[i + j] = b[j];
    }
    if (i < n) {
        const std::size_t rest = n - i;
        for (std::size_t j = 0; j < 8; ++j)
            a[j] = j < rest ? in[i + j] : pad;
        Kernel(a, b);
        for (std::size_t j = 0; j < rest; ++j)
            out[i + j] = b[j];
    }
}

} // namespace

void exp_n(const double* in, double* out, std::size_t n) { apply<exp8>(in, out, n, 0.0); }

void log_n(const double* in, double* out, std::size_t n) { apply<log8>(in, out, n, 1.0); }

} // namespace brw::vecmath
