#pragma once

#include <vector>

#include "icorate/encoder.hpp"
#include "icorate/random.hpp"

namespace icorate::testing {

/// A run of n sentences of 1-3 random word ids, each paired with its neighbors.
inline std::vector<skipthought::Triple> random_triples(Rng& rng, int vocab, int n) {
  auto sentence = [&](std::size_t len) {
    std::vector<int> s;
    for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(vocab))));
    return s;
  };
  std::vector<skipthought::Triple> out;
  for (int i = 0; i < n; ++i) {
    skipthought::Triple t;
    t.current = sentence(1 + rng.below(3));
    if (i > 0) t.previous = sentence(1 + rng.below(3));
    if (i + 1 < n) t.next = sentence(1 + rng.below(3));
    out.push_back(t);
  }
  return out;
}

}  // namespace icorate::testing
