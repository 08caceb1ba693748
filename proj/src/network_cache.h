// Copyright 2026 The unimod Authors
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

#pragma once

#include <mutex>
#include <vector>

#include "unimod/canonical.h"
#include "unimod/network.h"

namespace unimod::detail {

struct NetworkCache {
  std::once_flag distances_once;
  std::vector<int> distances;  // row-major n x n
  int diameter = 0;

  std::once_flag unrooted_once;
  CanonicalKey unrooted;

  std::once_flag rooted_once;
  std::vector<CanonicalKey> rooted;
  OrbitPartition orbits;

  std::once_flag pairs_once;
  std::vector<CanonicalKey> pairs;  // row-major n x n
};

}  // namespace unimod::detail
