#pragma once

// Exact linear-extension counting, enumeration and sampling by dynamic
// programming over the set of actors still to be placed.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "posetmc/bits.hpp"
#include "posetmc/partial_order.hpp"

namespace posetmc {

using BigCount = boost::multiprecision::cpp_int;

struct CountingLimits {
  int max_actors = 30;
  std::size_t max_extensions = 1'000'000;
};

/// Counts extensions of h restricted to any remaining subset. The memo lives
/// as long as the counter, so create one per evaluation.
template <class Count = BigCount>
class ExtensionCounter {
 public:
  explicit ExtensionCounter(const PartialOrder& h, const CountingLimits& limits = {})
      : h_(&h), memo_(h.size()) {
    if (h.size() > limits.max_actors)
      fail(ErrorCode::SizeLimitExceeded, std::to_string(h.size()) + " actors exceeds the counting cap of " +
                                             std::to_string(limits.max_actors));
  }

  /// Maximal elements of h[remaining].
  Mask tops(Mask remaining) const {
    Mask out = 0;
    for_each_bit(remaining, [&](int k) {
      if ((h_->above(k) & remaining) == 0) out |= bit(k);
    });
    return out;
  }

  const Count& count(Mask remaining) {
    if (const Count* hit = memo_.find(remaining)) return *hit;
    Count total;
    if (popcount(remaining) <= 1) {
      total = 1;
    } else {
      total = 0;
      for_each_bit(tops(remaining), [&](int k) { total += count(remaining & ~bit(k)); });
    }
    return memo_.put(remaining, std::move(total));
  }

 private:
  const PartialOrder* h_;
  SubsetMemo<Count> memo_;
};

template <class Count = BigCount>
struct ExtensionCount {
  Count total;
  /// per_top[k] = number of extensions headed by k.
  std::vector<Count> per_top;
};

template <class Count = BigCount>
ExtensionCount<Count> count_linear_extensions(const PartialOrder& h, const CountingLimits& limits = {}) {
  ExtensionCounter<Count> counter(h, limits);
  ExtensionCount<Count> out;
  out.total = counter.count(h.all());
  out.per_top.assign(h.size(), Count(0));
  for_each_bit(counter.tops(h.all()), [&](int k) { out.per_top[k] = counter.count(h.all() & ~bit(k)); });
  return out;
}

/// All extensions in lexicographic order.
inline std::vector<RankList> enumerate_linear_extensions(const PartialOrder& h, const CountingLimits& limits = {}) {
  ExtensionCounter<BigCount> counter(h, limits);
  const BigCount& total = counter.count(h.all());
  require(total <= BigCount(limits.max_extensions), ErrorCode::TooManyExtensions,
          "poset has " + total.str() + " linear extensions");
  std::vector<RankList> out;
  out.reserve(static_cast<std::size_t>(total));
  RankList prefix;
  auto recurse = [&](auto&& self, Mask remaining) -> void {
    if (remaining == 0) {
      out.push_back(prefix);
      return;
    }
    for_each_bit(counter.tops(remaining), [&](int k) {
      prefix.push_back(k);
      self(self, remaining & ~bit(k));
      prefix.pop_back();
    });
  };
  recurse(recurse, h.all());
  return out;
}

/// Uniform draw from the linear extensions of h.
template <class Urbg>
RankList sample_linear_extension(const PartialOrder& h, Urbg& rng, const CountingLimits& limits = {}) {
  ExtensionCounter<double> counter(h, limits);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RankList out;
  out.reserve(h.size());
  Mask remaining = h.all();
  while (remaining) {
    const Mask t = counter.tops(remaining);
    double u = unif(rng) * counter.count(remaining);
    int pick = -1;
    for_each_bit(t, [&](int k) {
      if (pick >= 0) return;
      u -= counter.count(remaining & ~bit(k));
      if (u < 0) pick = k;
    });
    if (pick < 0) pick = 63 - std::countl_zero(t);  // rounding at the upper edge
    out.push_back(pick);
    remaining &= ~bit(pick);
  }
  return out;
}

/// One move of the adjacent-swap chain with the position already drawn:
/// positions index and index+1 swap unless that breaks h. index == size-1
/// is the lazy no-op.
inline void neighbor_swap_step(const PartialOrder& h, RankList& state, int index) {
  const int n = static_cast<int>(state.size());
  if (index < 0 || index >= n - 1) return;
  if (!h.dominates(state[index], state[index + 1])) std::swap(state[index], state[index + 1]);
}

/// Runs the adjacent-swap chain, whose stationary law is uniform on the
/// linear extensions of h.
template <class Urbg>
RankList neighbor_swap_chain(const PartialOrder& h, RankList start, long long steps, Urbg& rng) {
  require(static_cast<int>(start.size()) == h.size() && is_linear_extension(h, start),
          ErrorCode::StartNotExtension, "start list is not a linear extension");
  Mask seen = 0;
  for (int a : start) seen |= bit(a);
  require(seen == h.all(), ErrorCode::StartNotExtension, "start list is not a permutation");
  std::uniform_int_distribution<int> pos(0, h.size() - 1);
  for (long long t = 0; t < steps; ++t) neighbor_swap_step(h, start, pos(rng));
  return start;
}

}  // namespace posetmc
