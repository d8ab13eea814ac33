#pragma once

// Ground set / subset-family representation shared by the set cover
// algorithm and its offline oracles.

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace compols {

struct SetSystem {
  int n = 0;                                   // ground elements 0..n-1
  std::vector<std::vector<int>> membership;    // subset -> sorted elements
  std::vector<std::vector<int>> element_sets;  // element -> subsets containing it

  int m() const { return static_cast<int>(membership.size()); }

  static SetSystem build(int n, std::vector<std::vector<int>> subsets) {
    if (n < 1) throw std::invalid_argument("SetSystem: n must be >= 1");
    SetSystem sys;
    sys.n = n;
    sys.membership = std::move(subsets);
    sys.element_sets.assign(n, {});
    for (std::size_t s = 0; s < sys.membership.size(); ++s) {
      auto& elems = sys.membership[s];
      std::sort(elems.begin(), elems.end());
      elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
      for (int e : elems) {
        if (e < 0 || e >= n)
          throw std::invalid_argument("SetSystem: element index out of range");
        sys.element_sets[e].push_back(static_cast<int>(s));
      }
    }
    return sys;
  }
};

}  // namespace compols
