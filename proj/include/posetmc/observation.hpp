#pragma once

// Observation models for rank lists given a partial order: noise-free uniform
// linear extensions, queue-jumping, and Mallows-phi marginalised over the
// extensions of the order.
//
// Every likelihood works in the "list frame": the order is restricted to the
// list's members and re-indexed so that local actor t is the list's t-th
// entry. The observed list is then the identity 0,1,...,m-1.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "posetmc/bits.hpp"
#include "posetmc/error.hpp"
#include "posetmc/linear_extensions.hpp"
#include "posetmc/partial_order.hpp"

namespace posetmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// N lists over actors 0..n-1.
struct ObservationSet {
  int n = 0;
  std::vector<RankList> lists;

  static ObservationSet validated(std::vector<RankList> lists, int n) {
    require(n >= 1 && n <= kMaxActors, ErrorCode::SizeLimitExceeded, "actor count out of range");
    for (std::size_t i = 0; i < lists.size(); ++i) {
      const RankList& l = lists[i];
      if (l.size() < 2) fail(ErrorCode::TooShort, "list " + std::to_string(i + 1) + " has fewer than 2 entries");
      Mask seen = 0;
      for (int a : l) {
        if (a < 0 || a >= n) fail(ErrorCode::UnknownLabel, "list " + std::to_string(i + 1) + " names an unknown actor");
        if (has(seen, a)) fail(ErrorCode::DuplicateActor, "list " + std::to_string(i + 1) + " repeats an actor");
        seen |= bit(a);
      }
    }
    return {n, std::move(lists)};
  }

  std::size_t size() const { return lists.size(); }
  bool empty() const { return lists.empty(); }
};

enum class NoiseModel { NoiseFree, QueueJump, Mallows };

struct NoiseParams {
  NoiseModel model = NoiseModel::NoiseFree;
  double p = 0.0;      // queue-jump probability
  double theta = 1.0;  // Mallows dispersion

  void check() const {
    if (model == NoiseModel::QueueJump) require(p >= 0.0 && p <= 1.0, ErrorCode::BadP, "p must lie in [0,1]");
    if (model == NoiseModel::Mallows) require(theta >= 0.0 && std::isfinite(theta), ErrorCode::BadTheta, "theta must be >= 0");
  }
};

// Mallows normalisers ------------------------------------------------------

/// log psi_i(theta) = log sum_{j=1..i} exp(-(j-1) theta).
inline double log_psi(int i, double theta) {
  if (theta == 0.0) return std::log(static_cast<double>(i));
  return std::log(-std::expm1(-i * theta)) - std::log(-std::expm1(-theta));
}

/// log Psi_m(theta), the normaliser of the Mallows model on m items.
inline double mallows_log_normalizer(int m, double theta) {
  require(theta >= 0.0, ErrorCode::BadTheta, "theta must be >= 0");
  require(m >= 1, ErrorCode::LengthMismatch, "m must be at least 1");
  double s = 0.0;
  for (int i = 2; i <= m; ++i) s += log_psi(i, theta);
  return s;
}

/// Psi_m(theta) = prod_{i<=m} psi_i(theta).
inline double mallows_psi(int m, double theta) { return std::exp(mallows_log_normalizer(m, theta)); }

/// Discordant pairs between two orderings of the same members.
inline int kendall_tau(std::span<const int> y, std::span<const int> l) {
  require(y.size() == l.size(), ErrorCode::MemberMismatch, "lists differ in length");
  int hi = 0;
  for (int a : l) hi = std::max(hi, a + 1);
  std::vector<int> pos(hi, -1);
  for (std::size_t t = 0; t < l.size(); ++t) {
    require(l[t] >= 0 && pos[l[t]] < 0, ErrorCode::MemberMismatch, "reference list repeats an actor");
    pos[l[t]] = static_cast<int>(t);
  }
  std::vector<int> seq;
  seq.reserve(y.size());
  for (int a : y) {
    require(a >= 0 && a < hi && pos[a] >= 0, ErrorCode::MemberMismatch, "lists have different members");
    seq.push_back(pos[a]);
    pos[a] = -2;  // catch repeats in y
  }
  int d = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++d;
  return d;
}

inline double mallows_list_logprob(std::span<const int> y, std::span<const int> l, double theta) {
  require(theta >= 0.0, ErrorCode::BadTheta, "theta must be >= 0");
  return -theta * kendall_tau(y, l) - mallows_log_normalizer(static_cast<int>(y.size()), theta);
}

/// Probability that k is picked next when the reference list restricted to
/// the remaining members is y_rem.
inline double mallows_first_choice_logprob(int k, std::span<const int> y_rem, double theta) {
  require(theta >= 0.0, ErrorCode::BadTheta, "theta must be >= 0");
  auto it = std::find(y_rem.begin(), y_rem.end(), k);
  require(it != y_rem.end(), ErrorCode::NotRemaining, "actor " + std::to_string(k) + " is not among the remaining");
  const auto rank = static_cast<double>(it - y_rem.begin());
  return -theta * rank - log_psi(static_cast<int>(y_rem.size()), theta);
}

// List-frame likelihoods ---------------------------------------------------

namespace detail {

/// The list is the identity in its own frame, so it extends the order iff
/// every edge runs from a lower to a higher index.
inline bool identity_extends(const PartialOrder& local) {
  for (int s = 0; s < local.size(); ++s)
    if (local.below(s) & low_bits(s + 1)) return false;
  return true;
}

inline double log_factorial(int m) { return std::lgamma(m + 1.0); }

}  // namespace detail

/// Restriction of h to the members of y, indexed by position in y.
inline PartialOrder list_frame(const PartialOrder& h, std::span<const int> y) { return suborder(h, y).order; }

inline double noisefree_loglik_local(const PartialOrder& local, const CountingLimits& limits = {}) {
  if (!detail::identity_extends(local)) return kNegInf;
  ExtensionCounter<double> counter(local, limits);
  return -std::log(counter.count(local.all()));
}

inline double qj_loglik_local(const PartialOrder& local, double p, const CountingLimits& limits = {}) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::BadP, "p must lie in [0,1]");
  const int m = local.size();
  ExtensionCounter<double> counter(local, limits);
  double lp = 0.0;
  Mask rest = local.all();
  for (int i = 0; i + 1 < m; ++i) {
    double frac = 0.0;
    if (has(counter.tops(rest), i)) frac = counter.count(rest & ~bit(i)) / counter.count(rest);
    const double factor = p / (m - i) + (1.0 - p) * frac;
    if (factor <= 0.0) return kNegInf;
    lp += std::log(factor);
    rest &= ~bit(i);
  }
  return lp;
}

struct MallowsPoResult {
  double log_lik = 0.0;  // log(f / |L[h]|)
  double log_f = 0.0;
  double count = 0.0;    // |L[h]|
};

/// f(R) = sum over maximal k of h[R] of q(k|R) f(R \ k), in log space.
inline MallowsPoResult mallows_po_local(const PartialOrder& local, double theta, const CountingLimits& limits = {}) {
  require(theta >= 0.0, ErrorCode::BadTheta, "theta must be >= 0");
  const int m = local.size();
  if (m > limits.max_actors)
    fail(ErrorCode::SizeLimitExceeded,
         std::to_string(m) + " actors exceeds the counting cap of " + std::to_string(limits.max_actors));
  const int edges = local.edge_count();
  if (edges == 0) return {-detail::log_factorial(m), 0.0, std::round(std::exp(detail::log_factorial(m)))};
  if (edges == m * (m - 1) / 2) {
    const RankList l = topological_order(local);
    RankList id(m);
    for (int t = 0; t < m; ++t) id[t] = t;
    const double lp = mallows_list_logprob(id, l, theta);
    return {lp, lp, 1.0};
  }

  std::vector<double> lpsi(m + 1, 0.0);
  for (int i = 1; i <= m; ++i) lpsi[i] = log_psi(i, theta);
  ExtensionCounter<double> counter(local, limits);
  SubsetMemo<double> memo(m);
  std::vector<double> terms;
  auto log_f = [&](auto&& self, Mask rest) -> double {
    if (popcount(rest) <= 1) return 0.0;
    if (const double* hit = memo.find(rest)) return *hit;
    const double norm = lpsi[popcount(rest)];
    double best = kNegInf;
    double acc[kMaxActors];
    int used = 0;
    for_each_bit(counter.tops(rest), [&](int k) {
      const int rank = popcount(rest & low_bits(k));
      const double v = -theta * rank - norm + self(self, rest & ~bit(k));
      acc[used++] = v;
      best = std::max(best, v);
    });
    double s = 0.0;
    for (int u = 0; u < used; ++u) s += std::exp(acc[u] - best);
    return memo.put(rest, best + std::log(s));
  };
  const double lf = log_f(log_f, local.all());
  const double count = counter.count(local.all());
  return {lf - std::log(count), lf, count};
}

inline double list_loglik_local(const PartialOrder& local, const NoiseParams& params, const CountingLimits& limits = {}) {
  switch (params.model) {
    case NoiseModel::NoiseFree: return noisefree_loglik_local(local, limits);
    case NoiseModel::QueueJump: return qj_loglik_local(local, params.p, limits);
    case NoiseModel::Mallows: return mallows_po_local(local, params.theta, limits).log_lik;
  }
  return kNegInf;
}

// Public likelihoods on the global order -------------------------------------

inline double noisefree_loglik(std::span<const int> y, const PartialOrder& h, const CountingLimits& limits = {}) {
  return noisefree_loglik_local(list_frame(h, y), limits);
}

inline double qj_loglik(std::span<const int> y, const PartialOrder& h, double p, const CountingLimits& limits = {}) {
  return qj_loglik_local(list_frame(h, y), p, limits);
}

inline MallowsPoResult mallows_po_eval(std::span<const int> y, const PartialOrder& h, double theta,
                                       const CountingLimits& limits = {}) {
  return mallows_po_local(list_frame(h, y), theta, limits);
}

inline double mallows_po_loglik(std::span<const int> y, const PartialOrder& h, double theta,
                                const CountingLimits& limits = {}) {
  return mallows_po_eval(y, h, theta, limits).log_lik;
}

inline double list_loglik(std::span<const int> y, const PartialOrder& h, const NoiseParams& params,
                          const CountingLimits& limits = {}) {
  return list_loglik_local(list_frame(h, y), params, limits);
}

struct DatasetLoglik {
  double total = 0.0;
  std::vector<double> pointwise;
};

inline DatasetLoglik dataset_loglik(const ObservationSet& data, const PartialOrder& h, const NoiseParams& params,
                                    const CountingLimits& limits = {}) {
  params.check();
  require(data.n == h.size(), ErrorCode::ShapeMismatch, "data and order have different actor counts");
  DatasetLoglik out;
  out.pointwise.reserve(data.size());
  for (const RankList& y : data.lists) {
    out.pointwise.push_back(list_loglik(y, h, params, limits));
    out.total += out.pointwise.back();
  }
  return out;
}

/// Ties are read as incomparable pairs.
inline DatasetLoglik dataset_loglik(const ObservationSet& data, const TiedPartialOrder& h, const NoiseParams& params,
                                    const CountingLimits& limits = {}) {
  return dataset_loglik(data, h.as_unordered(), params, limits);
}

// Samplers -------------------------------------------------------------------

/// Queue-jumping (upward) list over `members`: each position is either a
/// uniform pick among the remaining actors (prob p) or the head of a uniform
/// extension of the remaining suborder.
template <class Urbg>
RankList sample_qj(const PartialOrder& h, std::span<const int> members, double p, Urbg& rng,
                   const CountingLimits& limits = {}) {
  require(p >= 0.0 && p <= 1.0, ErrorCode::BadP, "p must lie in [0,1]");
  const Suborder sub = suborder(h, members);
  const int m = sub.order.size();
  ExtensionCounter<double> counter(sub.order, limits);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RankList out;
  out.reserve(m);
  Mask rest = sub.order.all();
  while (rest) {
    int pick = -1;
    if (unif(rng) < p) {
      int r = std::uniform_int_distribution<int>(0, popcount(rest) - 1)(rng);
      for_each_bit(rest, [&](int k) {
        if (r-- == 0) pick = k;
      });
    } else {
      const Mask t = counter.tops(rest);
      double u = unif(rng) * counter.count(rest);
      for_each_bit(t, [&](int k) {
        if (pick >= 0) return;
        u -= counter.count(rest & ~bit(k));
        if (u < 0) pick = k;
      });
      if (pick < 0) pick = 63 - std::countl_zero(t);
    }
    out.push_back(sub.labels[pick]);
    rest &= ~bit(pick);
  }
  return out;
}

/// Sequential-choice sampler: the remaining item at rank r (in l) is picked
/// with probability exp(-theta r) / psi.
template <class Urbg>
RankList sample_mallows(std::span<const int> l, double theta, Urbg& rng) {
  require(theta >= 0.0 && std::isfinite(theta), ErrorCode::BadTheta, "theta must be >= 0");
  std::vector<int> rest(l.begin(), l.end());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RankList out;
  out.reserve(rest.size());
  while (!rest.empty()) {
    const int size = static_cast<int>(rest.size());
    int r = 0;
    if (theta == 0.0) {
      r = std::uniform_int_distribution<int>(0, size - 1)(rng);
    } else {
      double u = unif(rng) * std::exp(log_psi(size, theta));
      double w = 1.0;
      const double step = std::exp(-theta);
      while (r + 1 < size && u >= w) {
        u -= w;
        w *= step;
        ++r;
      }
    }
    out.push_back(rest[r]);
    rest.erase(rest.begin() + r);
  }
  return out;
}

/// Mallows list centred on a uniform extension of h[members].
template <class Urbg>
RankList sample_mallows_po(const PartialOrder& h, std::span<const int> members, double theta, Urbg& rng,
                           const CountingLimits& limits = {}) {
  const Suborder sub = suborder(h, members);
  RankList l = sample_linear_extension(sub.order, rng, limits);
  for (int& a : l) a = sub.labels[a];
  return sample_mallows(l, theta, rng);
}

template <class Urbg>
RankList sample_list(const PartialOrder& h, std::span<const int> members, const NoiseParams& params, Urbg& rng,
                     const CountingLimits& limits = {}) {
  params.check();
  switch (params.model) {
    case NoiseModel::NoiseFree: return sample_qj(h, members, 0.0, rng, limits);
    case NoiseModel::QueueJump: return sample_qj(h, members, params.p, rng, limits);
    case NoiseModel::Mallows: return sample_mallows_po(h, members, params.theta, rng, limits);
  }
  return {};
}

}  // namespace posetmc
