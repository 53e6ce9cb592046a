// Copyright 2026 The SynGen Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#ifndef SYNGEN_SYNTH_HPP_
#define SYNGEN_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "data.hpp"

namespace syngen {

// Template-generated restaurant-review sentences with fixed POS tags, a
// random dependency tree and complete (aspect, opinion, polarity) gold.
// Output depends only on (count, seed).
std::vector<Sentence> Synthesize(std::size_t count, std::uint64_t seed);

}  // namespace syngen

#endif  // SYNGEN_SYNTH_HPP_
