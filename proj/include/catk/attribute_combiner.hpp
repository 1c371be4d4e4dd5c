// Copyright 2026 The CATK Authors
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

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "catk/error.hpp"
#include "catk/rng.hpp"

namespace catk {

/// A bipartition of the attribute indices {1..m} into two disjoint,
/// non-empty groups. Index lists are 1-based and sorted ascending.
struct CombinationSplit {
  std::vector<std::size_t> c1;
  std::vector<std::size_t> c2;
  std::size_t m = 0;
};

/// Draws one split uniformly over all 2^m - 2 ordered assignments, which
/// is equivalently uniform over the 2^(m-1) - 1 unordered bipartitions
/// with a fair coin deciding which side is c1. Every index lands in c1
/// with probability exactly 1/2.
///
/// Drawing rule (pinned for reproducibility): mask = 1 + bounded(2^m - 2);
/// bit b of mask set means index b+1 goes to c1.
inline CombinationSplit combine(std::size_t m, SeededRng& rng) {
  if (m < 2) throw InvalidInput("insufficient attributes");
  if (m > 63) throw InvalidInput("attribute count too large (max 63)");
  const std::uint64_t range = (std::uint64_t{1} << m) - 2;
  const std::uint64_t mask = 1 + rng.bounded(range);
  CombinationSplit split;
  split.m = m;
  for (std::size_t b = 0; b < m; ++b) {
    if (mask & (std::uint64_t{1} << b))
      split.c1.push_back(b + 1);
    else
      split.c2.push_back(b + 1);
  }
  return split;
}

/// All unordered non-empty bipartitions of {1..m}, one representative each
/// (the side holding index 1 is c1), sorted lexicographically by c1.
/// Count is 2^(m-1) - 1. Serves as the enumeration oracle for uniformity
/// tests.
inline std::vector<CombinationSplit> enumerate_splits(std::size_t m) {
  if (m < 2 || m > 16)
    throw InvalidInput("enumerable attribute count must be in [2, 16]");
  std::vector<CombinationSplit> splits;
  const std::uint64_t rest = std::uint64_t{1} << (m - 1);
  for (std::uint64_t pick = 0; pick + 1 < rest; ++pick) {
    CombinationSplit s;
    s.m = m;
    s.c1.push_back(1);
    for (std::size_t b = 0; b + 1 < m; ++b) {
      if (pick & (std::uint64_t{1} << b))
        s.c1.push_back(b + 2);
      else
        s.c2.push_back(b + 2);
    }
    splits.push_back(std::move(s));
  }
  std::sort(splits.begin(), splits.end(),
            [](const CombinationSplit& a, const CombinationSplit& b) {
              return a.c1 < b.c1;
            });
  return splits;
}

/// Canonical unordered form: the side containing index 1 becomes c1.
inline CombinationSplit canonical(CombinationSplit split) {
  if (!split.c2.empty() && split.c2.front() == 1) std::swap(split.c1, split.c2);
  return split;
}

}  // namespace catk
