#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "posetmc/partial_order.hpp"

namespace posetmc::testing {

/// Five-actor order 1>2, 1>3, 3>4, 2>5, 4>5 (0-based below).
inline PartialOrder h0() {
  const std::vector<Edge> edges{{0, 1}, {0, 2}, {2, 3}, {1, 4}, {3, 4}};
  return PartialOrder::from_edges(5, edges);
}

/// h0 with actors 3 and 4 tied.
inline TiedPartialOrder h0_tied() {
  Relation r(5);
  const std::vector<Edge> strict{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 4}, {2, 4}, {3, 4}};
  for (const Edge& e : strict) r.set(e.from, e.to);
  r.set(2, 3);
  r.set(3, 2);
  return TiedPartialOrder::validated(r);
}

/// Random order on n actors: keep each forward pair of a random permutation
/// with probability `density`, then close.
template <class Urbg>
PartialOrder random_order(int n, double density, Urbg& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::bernoulli_distribution keep(density);
  std::vector<Edge> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (keep(rng)) edges.push_back({perm[a], perm[b]});
  return PartialOrder::from_edges(n, edges);
}

/// All permutations of 0..m-1 in lexicographic order.
inline std::vector<std::vector<int>> permutations(int m) {
  std::vector<int> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

/// Restricted growth strings: every set partition of n actors once.
inline std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  auto rec = [&](auto&& self, int i, int top) -> void {
    if (i == n) {
      out.push_back(a);
      return;
    }
    for (int c = 0; c <= top + 1; ++c) {
      a[i] = c;
      self(self, i + 1, std::max(top, c));
    }
  };
  if (n == 0) return {{}};
  a[0] = 0;
  rec(rec, 1, 0);
  return out;
}

/// Packs an n <= 8 relation into one integer.
inline std::uint64_t relation_key(const Relation& r) {
  std::uint64_t k = 0;
  for (int i = 0; i < r.size(); ++i) k |= static_cast<std::uint64_t>(r.row(i)) << (i * r.size());
  return k;
}

template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
  std::map<Key, double> diff = p;
  for (const auto& [k, v] : q) diff[k] -= v;
  double tv = 0.0;
  for (const auto& [k, v] : diff) tv += std::abs(v);
  return tv / 2.0;
}

template <class Key>
std::map<Key, double> normalized(const std::map<Key, long>& counts) {
  long total = 0;
  for (const auto& [k, c] : counts) total += c;
  std::map<Key, double> out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

/// Largest gap between the empirical CDF of `xs` and `cdf`.
template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf&& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

}  // namespace posetmc::testing
