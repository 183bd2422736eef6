#pragma once

#include <numeric>
#include <vector>

#include "naesat/frozen.hpp"
#include "naesat/graphs.hpp"

namespace naesat::testing {

// Cyclomatic number of every G# component, with one edge per free slot of a
// clause that has >= 2 free slots and constant evaluation on its rigid slots.
inline int max_gsharp_cycles(const FactorGraph& g, const LiteralAssignment& L, const std::vector<std::uint8_t>& eta) {
  const int n = g.n(), m = g.m(), k = g.k();
  std::vector<int> parent(n + m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> edges(n + m, 0);
  std::vector<char> used(n + m, 0);
  std::vector<std::pair<int, int>> es;
  for (int a = 0; a < m; ++a) {
    int frees = 0, seen = -1;
    bool constant = true;
    for (int j = 0; j < k; ++j) {
      int s = a * k + j;
      auto e = eta[g.var_at(s)];
      if (e == kFree) {
        ++frees;
      } else {
        int ev = L.bits[s] ^ e;
        if (seen >= 0 && seen != ev) constant = false;
        seen = ev;
      }
    }
    if (frees < 2 || !constant) continue;
    for (int j = 0; j < k; ++j) {
      int v = g.var_at(a, j);
      if (eta[v] == kFree) es.emplace_back(v, n + a);
    }
  }
  for (auto [u, w] : es) {
    used[u] = used[w] = 1;
    parent[find(u)] = find(w);
  }
  std::vector<int> nodes(n + m, 0);
  for (int x = 0; x < n + m; ++x)
    if (used[x]) ++nodes[find(x)];
  for (auto [u, w] : es) ++edges[find(u)];
  int worst = 0;
  for (int r = 0; r < n + m; ++r)
    if (nodes[r] > 0) worst = std::max(worst, edges[r] - nodes[r] + 1);
  return worst;
}

}  // namespace naesat::testing
