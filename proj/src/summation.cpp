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

#include "brw/summation.hpp"

namespace brw {

namespace {

inline void kahan(double& s, double& c, double x)
{
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
}

} // namespace

void LaneSum::add(std::span<const double> xs)
{
    const std::size_t n = xs.size();
    const double* x = xs.data();
    std::size_t i = 0;
    while (i < n && ((count_ + i) & 7) != 0) {
        const std::size_t l = (count_ + i) & 7;
        kahan(s_[l], c_[l], x[i]);
        ++i;
    }
    // Local copies keep the lanes in registers; the members could alias x.
    double s[kLanes], c[kLanes];
    for (int l = 0; l < kLanes; ++l) {
        s[l] = s_[l];
        c[l] = c_[l];
    }
    for (; i + kLanes <= n; i += kLanes) {
        for (int l = 0; l < kLanes; ++l)
            kahan(s[l], c[l], x[i + l]);
    }
    for (int l = 0; l < kLanes; ++l) {
        s_[l] = s[l];
        c_[l] = c[l];
    }
    for (; i < n; ++i) {
        const std::size_t l = (count_ + i) & 7;
        kahan(s_[l], c_[l], x[i]);
    }
    count_ += n;
}

CompensatedSum LaneSum::total() const
{
    CompensatedSum out;
    for (int l = 0; l < kLanes; ++l)
        out.add(s_[l]);
    for (int l = 0; l < kLanes; ++l)
        out.add(-c_[l]);
    return out;
}

} // namespace brw
