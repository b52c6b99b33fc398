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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace brw {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    void add(const CompensatedSum& other)
    {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Kahan summation over eight interleaved lanes: element i of the stream
/// (counted from the first add) goes to lane i mod 8. The result therefore
/// depends only on the order of the stream, never on how it was split into
/// calls, and the inner loop vectorizes.
class LaneSum {
public:
    static constexpr int kLanes = 8;

    void add(std::span<const double> xs);
    void add(double x) { add(std::span<const double>(&x, 1)); }

    CompensatedSum total() const;
    std::uint64_t count() const { return count_; }

private:
    double s_[kLanes] = {};
    double c_[kLanes] = {};
    std::uint64_t count_ = 0;
};

} // namespace brw
