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

#include <cstddef>

namespace brw::vecmath {

// Elementwise exp/log over n values. Lanes are evaluated independently in
// groups of eight (the remainder is padded), so the value produced for an
// element never depends on its neighbours or on n.
void exp_n(const double* in, double* out, std::size_t n);
void log_n(const double* in, double* out, std::size_t n);

} // namespace brw::vecmath
