#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace posetmc {

/// One bit per actor. Orders are stored as one mask per row, so the library
/// handles at most 64 actors.
using Mask = std::uint64_t;

inline constexpr int kMaxActors = 64;

constexpr Mask bit(int i) { return Mask{1} << i; }

constexpr Mask low_bits(int n) { return n >= 64 ? ~Mask{0} : (bit(n) - 1); }

constexpr bool has(Mask m, int i) { return (m >> i) & 1U; }

constexpr int popcount(Mask m) { return std::popcount(m); }

/// Calls f(i) for every set bit i, lowest first.
template <class F>
constexpr void for_each_bit(Mask m, F&& f) {
  while (m) {
    int i = std::countr_zero(m);
    f(i);
    m &= m - 1;
  }
}

/// Memo table keyed by a subset mask. Dense storage when the ground set is
/// small enough, hashed otherwise.
template <class T>
class SubsetMemo {
 public:
  explicit SubsetMemo(int ground_size) {
    if (ground_size <= kDenseLimit) {
      dense_.resize(std::size_t{1} << ground_size);
      filled_.assign(dense_.size(), false);
    } else {
      sparse_.reserve(1024);
    }
  }

  const T* find(Mask key) const {
    if (!dense_.empty()) return filled_[key] ? &dense_[key] : nullptr;
    auto it = sparse_.find(key);
    return it == sparse_.end() ? nullptr : &it->second;
  }

  const T& put(Mask key, T value) {
    if (!dense_.empty()) {
      filled_[key] = true;
      return dense_[key] = std::move(value);
    }
    return sparse_[key] = std::move(value);
  }

 private:
  static constexpr int kDenseLimit = 12;
  std::vector<T> dense_;
  std::vector<bool> filled_;
  std::unordered_map<Mask, T> sparse_;
};

}  // namespace posetmc
