// Copyright 2026 The planted Authors
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

#ifndef PLANTED_BASELINE_H_
#define PLANTED_BASELINE_H_

#include <cstdint>

#include "planted/graphgen.h"
#include "planted/recovery.h"

namespace planted {

// Greedy common-neighbour clustering: take the smallest unassigned vertex,
// join it with the s-1 unassigned vertices sharing the most neighbours with
// it (counted inside the unassigned subgraph, ties to the smaller index),
// and repeat. Fewer than s remaining vertices become leftovers. Throws
// kZeroSize when s < 1.
RecoveryResult baseline_common_neighbors(const Graph& g, std::int64_t s);

}  // namespace planted

#endif  // PLANTED_BASELINE_H_
