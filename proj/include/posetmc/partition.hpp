#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "posetmc/error.hpp"

namespace posetmc {

/// A set partition of actors 0..n-1. Blocks are numbered by their least
/// member, so two equal partitions always compare equal.
class Partition {
 public:
  Partition() = default;

  static Partition singletons(int n) {
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) a[i] = i;
    return from_assignment(std::move(a));
  }

  static Partition one_block(int n) { return from_assignment(std::vector<int>(n, 0)); }

  /// Arbitrary integer labels; relabelled canonically.
  static Partition from_assignment(std::vector<int> labels) {
    Partition p;
    std::vector<std::pair<int, int>> seen;  // (raw label, canonical)
    p.assignment_.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto it = std::find_if(seen.begin(), seen.end(),
                             [&](const auto& s) { return s.first == labels[i]; });
      int c;
      if (it == seen.end()) {
        c = static_cast<int>(seen.size());
        seen.emplace_back(labels[i], c);
      } else {
        c = it->second;
      }
      p.assignment_[i] = c;
    }
    p.blocks_ = static_cast<int>(seen.size());
    return p;
  }

  static Partition from_blocks(const std::vector<std::vector<int>>& blocks, int n) {
    std::vector<int> a(n, -1);
    for (std::size_t c = 0; c < blocks.size(); ++c) {
      require(!blocks[c].empty(), ErrorCode::ShapeMismatch, "empty block");
      for (int i : blocks[c]) {
        require(i >= 0 && i < n, ErrorCode::UnknownLabel, "actor " + std::to_string(i));
        require(a[i] < 0, ErrorCode::DuplicateActor, "actor in two blocks");
        a[i] = static_cast<int>(c);
      }
    }
    for (int x : a) require(x >= 0, ErrorCode::ShapeMismatch, "blocks do not cover all actors");
    return from_assignment(std::move(a));
  }

  int size() const { return static_cast<int>(assignment_.size()); }
  int num_blocks() const { return blocks_; }
  int block_of(int i) const { return assignment_[i]; }
  const std::vector<int>& assignment() const { return assignment_; }

  std::vector<std::vector<int>> blocks() const {
    std::vector<std::vector<int>> out(blocks_);
    for (int i = 0; i < size(); ++i) out[assignment_[i]].push_back(i);
    return out;
  }

  std::vector<int> block_sizes() const {
    std::vector<int> out(blocks_, 0);
    for (int c : assignment_) ++out[c];
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> assignment_;
  int blocks_ = 0;
};

}  // namespace posetmc
