#pragma once

// Partial orders (with and without ties) stored as bitset relation rows.
//
// Actor indices are 0-based throughout the library; the text formats in io.hpp
// translate to and from the 1-based labels used in data files.

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "posetmc/bits.hpp"
#include "posetmc/error.hpp"
#include "posetmc/partition.hpp"

namespace posetmc {

/// An ordered list of distinct actors, highest status first.
using RankList = std::vector<int>;

/// A directed pair: `from` dominates `to`.
struct Edge {
  int from = 0;
  int to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Square boolean matrix, one bit row per actor. No invariants.
class Relation {
 public:
  Relation() = default;
  explicit Relation(int n) : n_(n), rows_(n, 0) {
    if (n < 0 || n > kMaxActors)
      fail(ErrorCode::SizeLimitExceeded, "at most " + std::to_string(kMaxActors) + " actors");
  }

  template <class Matrix>
  static Relation from_matrix(const Matrix& m) {
    Relation r(static_cast<int>(m.size()));
    for (int i = 0; i < r.n_; ++i) {
      require(static_cast<int>(m[i].size()) == r.n_, ErrorCode::ShapeMismatch,
              "relation matrix is not square");
      for (int j = 0; j < r.n_; ++j)
        if (m[i][j]) r.set(i, j);
    }
    return r;
  }

  int size() const { return n_; }
  bool operator()(int i, int j) const { return has(rows_[i], j); }
  void set(int i, int j, bool value = true) {
    if (value)
      rows_[i] |= bit(j);
    else
      rows_[i] &= ~bit(j);
  }
  Mask row(int i) const { return rows_[i]; }
  Mask& row(int i) { return rows_[i]; }
  Mask all() const { return low_bits(n_); }

  Mask column(int j) const {
    Mask c = 0;
    for (int i = 0; i < n_; ++i)
      if (has(rows_[i], j)) c |= bit(i);
    return c;
  }

  int count() const {
    int c = 0;
    for (Mask r : rows_) c += popcount(r);
    return c;
  }

  friend bool operator==(const Relation&, const Relation&) = default;

 private:
  int n_ = 0;
  std::vector<Mask> rows_;
};

namespace detail {

/// Union-find over mutual pairs; returns a class label per actor.
inline std::vector<int> mutual_pair_classes(const Relation& rel) {
  const int n = rel.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rel(i, j) && rel(j, i)) parent[find(i)] = find(j);
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) label[i] = find(i);
  return label;
}

/// Warshall closure on bit rows.
inline void close_rows(std::vector<Mask>& rows) {
  const int n = static_cast<int>(rows.size());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (has(rows[i], k)) rows[i] |= rows[k];
}

}  // namespace detail

/// Smallest transitive superset of `rel`. Mutual pairs are read as ties and
/// closed into full tie classes; any strict cycle throws CycleDetected.
inline Relation transitive_closure(const Relation& rel) {
  const int n = rel.size();
  for (int i = 0; i < n; ++i)
    require(!rel(i, i), ErrorCode::CycleDetected, "self loop at actor " + std::to_string(i));
  const Partition classes = Partition::from_assignment(detail::mutual_pair_classes(rel));
  const int c = classes.num_blocks();

  std::vector<Mask> q(c, 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!rel(i, j) || rel(j, i)) continue;
      const int a = classes.block_of(i), b = classes.block_of(j);
      require(a != b, ErrorCode::CycleDetected, "strict edge inside a tie class");
      q[a] |= bit(b);
    }
  detail::close_rows(q);
  for (int a = 0; a < c; ++a)
    require(!has(q[a], a), ErrorCode::CycleDetected, "relation contains a strict cycle");

  Relation out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int a = classes.block_of(i), b = classes.block_of(j);
      if (a == b || has(q[a], b)) out.set(i, j);
    }
  return out;
}

/// Strict partial order: irreflexive, transitive, antisymmetric.
class PartialOrder {
 public:
  PartialOrder() = default;

  static PartialOrder validated(const Relation& rel) {
    const int n = rel.size();
    for (int i = 0; i < n; ++i)
      if (rel(i, i)) fail(ErrorCode::ReflexiveEdge, "actor " + std::to_string(i) + " dominates itself");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (rel(i, j) && (rel.row(j) & ~rel.row(i)))
          fail(ErrorCode::TransitivityViolation,
               "edge " + std::to_string(i) + ">" + std::to_string(j) + " is not closed");
    // transitive + irreflexive already excludes mutual pairs
    return PartialOrder(rel);
  }

  static PartialOrder empty(int n) { return PartialOrder(Relation(n)); }

  /// Total order listing actors from highest to lowest.
  static PartialOrder total(std::span<const int> order, int n) {
    Relation r(n);
    Mask later = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      r.row(*it) = later;
      later |= bit(*it);
    }
    return validated(r);
  }

  /// Closure of the given edges.
  static PartialOrder from_edges(int n, std::span<const Edge> edges) {
    Relation r(n);
    for (const Edge& e : edges) {
      require(e.from >= 0 && e.from < n && e.to >= 0 && e.to < n, ErrorCode::UnknownLabel,
              "edge endpoint out of range");
      r.set(e.from, e.to);
    }
    for (const Edge& e : edges)
      require(!r(e.to, e.from), ErrorCode::CycleDetected, "mutual edge in strict order");
    return validated(transitive_closure(r));
  }

  int size() const { return rel_.size(); }
  bool dominates(int i, int j) const { return rel_(i, j); }
  bool comparable(int i, int j) const { return rel_(i, j) || rel_(j, i); }
  /// Actors dominated by i.
  Mask below(int i) const { return rel_.row(i); }
  /// Actors dominating j.
  Mask above(int j) const { return above_[j]; }
  Mask all() const { return rel_.all(); }
  const Relation& relation() const { return rel_; }
  int edge_count() const { return rel_.count(); }

  friend bool operator==(const PartialOrder& a, const PartialOrder& b) { return a.rel_ == b.rel_; }

 private:
  explicit PartialOrder(Relation rel) : rel_(std::move(rel)), above_(rel_.size(), 0) {
    for (int i = 0; i < rel_.size(); ++i)
      for_each_bit(rel_.row(i), [&](int j) { above_[j] |= bit(i); });
  }

  Relation rel_;
  std::vector<Mask> above_;
};

/// Partial order with ties. A tie is a mutual pair; tied actors relate
/// identically to everyone else.
class TiedPartialOrder {
 public:
  TiedPartialOrder() = default;

  static TiedPartialOrder validated(const Relation& rel) {
    const int n = rel.size();
    for (int i = 0; i < n; ++i)
      if (rel(i, i)) fail(ErrorCode::ReflexiveEdge, "actor " + std::to_string(i) + " dominates itself");
    auto tie_row = [&](int i) {
      Mask t = 0;
      for (int j = 0; j < n; ++j)
        if (j != i && rel(i, j) && rel(j, i)) t |= bit(j);
      return t;
    };
    std::vector<Mask> ties(n);
    for (int i = 0; i < n; ++i) ties[i] = tie_row(i);
    for (int i = 0; i < n; ++i) {
      const Mask cls = ties[i] | bit(i);
      for_each_bit(ties[i], [&](int j) {
        if ((ties[j] | bit(j)) != cls)
          fail(ErrorCode::AsymmetricTie,
               "tie " + std::to_string(i) + "~" + std::to_string(j) + " is not part of a closed tie class");
      });
    }
    for (int i = 0; i < n; ++i) {
      const Mask cls = ties[i] | bit(i);
      for_each_bit(ties[i], [&](int j) {
        const Mask out_i = rel.row(i) & ~cls, out_j = rel.row(j) & ~cls;
        const Mask in_i = rel.column(i) & ~cls, in_j = rel.column(j) & ~cls;
        if (out_i != out_j || in_i != in_j)
          fail(ErrorCode::InconsistentTieBlock,
               "tied actors " + std::to_string(i) + "," + std::to_string(j) + " relate differently to others");
      });
    }
    TiedPartialOrder t;
    t.rel_ = rel;
    t.ties_ = std::move(ties);
    t.strict_ = PartialOrder::validated(t.strict_relation());
    return t;
  }

  static TiedPartialOrder from_untied(const PartialOrder& h) {
    TiedPartialOrder t;
    t.rel_ = h.relation();
    t.ties_.assign(h.size(), 0);
    t.strict_ = h;
    return t;
  }

  int size() const { return rel_.size(); }
  bool tied(int i, int j) const { return has(ties_[i], j); }
  bool dominates(int i, int j) const { return rel_(i, j) && !rel_(j, i); }
  Mask ties_of(int i) const { return ties_[i]; }
  bool has_ties() const {
    return std::any_of(ties_.begin(), ties_.end(), [](Mask m) { return m != 0; });
  }
  const Relation& relation() const { return rel_; }

  /// Same order with every tie read as incomparability. This is what the
  /// observation models see.
  const PartialOrder& as_unordered() const { return strict_; }

  friend bool operator==(const TiedPartialOrder& a, const TiedPartialOrder& b) { return a.rel_ == b.rel_; }

 private:
  Relation strict_relation() const {
    Relation s(size());
    for (int i = 0; i < size(); ++i) s.row(i) = rel_.row(i) & ~ties_[i];
    return s;
  }

  Relation rel_;
  std::vector<Mask> ties_;
  PartialOrder strict_;
};

/// Checks `rel` against the invariants of the requested order type.
inline std::variant<PartialOrder, TiedPartialOrder> validate(const Relation& rel, bool allow_ties) {
  if (allow_ties) return TiedPartialOrder::validated(rel);
  return PartialOrder::validated(rel);
}

/// Unique minimal edge set whose closure is h (covering relations), sorted.
inline std::vector<Edge> transitive_reduction(const PartialOrder& h) {
  std::vector<Edge> out;
  for (int i = 0; i < h.size(); ++i) {
    Mask implied = 0;
    for_each_bit(h.below(i), [&](int k) { implied |= h.below(k); });
    for_each_bit(h.below(i) & ~implied, [&](int j) { out.push_back({i, j}); });
  }
  return out;
}

struct Suborder {
  PartialOrder order;
  /// labels[t] is the original actor at local index t.
  std::vector<int> labels;
};

/// Restriction of h to `members`; local index t stands for members[t].
inline Suborder suborder(const PartialOrder& h, std::span<const int> members) {
  require(!members.empty(), ErrorCode::UnknownLabel, "empty suborder");
  Mask seen = 0;
  for (int a : members) {
    if (a < 0 || a >= h.size()) fail(ErrorCode::UnknownLabel, "actor " + std::to_string(a));
    if (has(seen, a)) fail(ErrorCode::DuplicateActor, "actor " + std::to_string(a) + " repeated");
    seen |= bit(a);
  }
  const int m = static_cast<int>(members.size());
  Relation r(m);
  for (int s = 0; s < m; ++s)
    for (int t = 0; t < m; ++t)
      if (h.dominates(members[s], members[t])) r.set(s, t);
  return {PartialOrder::validated(r), std::vector<int>(members.begin(), members.end())};
}

/// Actors ordered so that every actor comes after everything above it.
inline std::vector<int> topological_order(const PartialOrder& h) {
  std::vector<int> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return popcount(h.above(a)) < popcount(h.above(b)); });
  return order;
}

/// Number of actors on a longest chain.
inline int depth(const PartialOrder& h) {
  if (h.size() == 0) return 0;
  std::vector<int> longest(h.size(), 1);
  int best = 1;
  for (int j : topological_order(h)) {
    for_each_bit(h.above(j), [&](int i) { longest[j] = std::max(longest[j], longest[i] + 1); });
    best = std::max(best, longest[j]);
  }
  return best;
}

inline std::vector<int> maximal_elements(const PartialOrder& h) {
  std::vector<int> out;
  for (int i = 0; i < h.size(); ++i)
    if (h.above(i) == 0) out.push_back(i);
  return out;
}

/// i > j iff i precedes j in every list. Lists must be permutations of 0..n-1.
inline PartialOrder intersection_order(std::span<const RankList> lists, int n) {
  require(!lists.empty(), ErrorCode::LengthMismatch, "no lists");
  Relation r(n);
  for (int i = 0; i < n; ++i) r.row(i) = low_bits(n) & ~bit(i);
  for (const RankList& l : lists) {
    require(static_cast<int>(l.size()) == n, ErrorCode::LengthMismatch, "list is not full length");
    Mask later = low_bits(n), seen = 0;
    for (int a : l) {
      require(a >= 0 && a < n && !has(seen, a), ErrorCode::LengthMismatch, "list is not a permutation");
      seen |= bit(a);
      later &= ~bit(a);
      r.row(a) &= later;
    }
  }
  return PartialOrder::validated(r);
}

/// True iff no later entry of `list` dominates an earlier one. The list may
/// cover a subset of the actors (it is then checked against the suborder).
inline bool is_linear_extension(const PartialOrder& h, std::span<const int> list) {
  Mask earlier = 0;
  for (int a : list) {
    if (h.below(a) & earlier) return false;
    earlier |= bit(a);
  }
  return true;
}

struct CollapsedOrder {
  PartialOrder quotient;
  Partition partition;
};

/// Tie classes become single nodes of the quotient order.
inline CollapsedOrder collapse_ties(const TiedPartialOrder& h) {
  const int n = h.size();
  std::vector<int> label(n);
  for (int i = 0; i < n; ++i) {
    const Mask cls = h.ties_of(i) | bit(i);
    label[i] = std::countr_zero(cls);
  }
  Partition p = Partition::from_assignment(std::move(label));
  const auto blocks = p.blocks();
  Relation q(p.num_blocks());
  for (int a = 0; a < p.num_blocks(); ++a)
    for (int b = 0; b < p.num_blocks(); ++b)
      if (a != b && h.dominates(blocks[a][0], blocks[b][0])) q.set(a, b);
  return {PartialOrder::validated(q), std::move(p)};
}

/// Inverse of collapse_ties.
inline TiedPartialOrder expand(const PartialOrder& quotient, const Partition& partition) {
  require(quotient.size() == partition.num_blocks(), ErrorCode::ShapeMismatch,
          "quotient size differs from block count");
  const int n = partition.size();
  Relation r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int a = partition.block_of(i), b = partition.block_of(j);
      if (a == b || quotient.dominates(a, b)) r.set(i, j);
    }
  return TiedPartialOrder::validated(r);
}

/// Tie classes count once.
inline int depth(const TiedPartialOrder& h) { return depth(collapse_ties(h).quotient); }

/// Vertex-series-parallel test: no induced N (a>c, b>c, b>d, all other pairs
/// incomparable).
inline bool is_vsp(const PartialOrder& h) {
  const int n = h.size();
  auto cmp = [&](int x) { return h.above(x) | h.below(x) | bit(x); };
  for (int b = 0; b < n; ++b) {
    const Mask cmp_b = cmp(b);
    bool found = false;
    for_each_bit(h.below(b), [&](int c) {
      if (found) return;
      const Mask tops = h.above(c) & ~cmp_b;
      const Mask bottoms = h.below(b) & ~cmp(c);
      for_each_bit(tops, [&](int a) {
        if (bottoms & ~cmp(a)) found = true;
      });
    });
    if (found) return false;
  }
  return true;
}

/// Bucket (weak) order test: incomparability is transitive.
inline bool is_bucket_order(const PartialOrder& h) {
  const int n = h.size();
  std::vector<Mask> inc(n);
  for (int x = 0; x < n; ++x) inc[x] = h.all() & ~(h.above(x) | h.below(x) | bit(x));
  for (int j = 0; j < n; ++j) {
    bool ok = true;
    for_each_bit(inc[j], [&](int i) {
      if ((inc[j] & ~bit(i)) & ~inc[i]) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

/// All labelled posets on n <= 4 actors.
inline std::vector<PartialOrder> enumerate_posets(int n) {
  require(n >= 1 && n <= 4, ErrorCode::SizeLimitExceeded, "poset enumeration supports 1 <= n <= 4");
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::vector<PartialOrder> out;
  const unsigned total = 1U << slots.size();
  for (unsigned code = 0; code < total; ++code) {
    Relation r(n);
    for (std::size_t s = 0; s < slots.size(); ++s)
      if ((code >> s) & 1U) r.set(slots[s].first, slots[s].second);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = 0; j < n && ok; ++j)
        if (r(i, j) && (r(j, i) || (r.row(j) & ~r.row(i)))) ok = false;
    if (ok) out.push_back(PartialOrder::validated(r));
  }
  return out;
}

}  // namespace posetmc
