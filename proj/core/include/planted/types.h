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

#ifndef PLANTED_TYPES_H_
#define PLANTED_TYPES_H_

#include <cstdint>
#include <vector>

namespace planted {

// Vertices are 0-based everywhere in code and in every file format.
using Vertex = std::int64_t;

// A vertex set, kept sorted ascending and duplicate-free by every producer
// in this library.
using VertexSet = std::vector<Vertex>;

}  // namespace planted

#endif  // PLANTED_TYPES_H_
