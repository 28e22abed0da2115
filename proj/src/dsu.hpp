#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

namespace qli::detail {

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n = 0) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int add() {
    p.push_back(static_cast<int>(p.size()));
    return p.back();
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  // The smaller root survives so class representatives are deterministic.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace qli::detail
