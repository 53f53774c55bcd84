#pragma once

// Posterior summaries over recorded states: edge and tie frequencies,
// thresholded consensus relations, ROC points against a reference order,
// co-clustering, depth histograms, Savage-Dickey ratios and WAIC.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "posetmc/error.hpp"
#include "posetmc/mcmc.hpp"
#include "posetmc/partial_order.hpp"
#include "posetmc/partition.hpp"

namespace posetmc {

using Matrix = std::vector<std::vector<double>>;

inline Matrix zeros(int n) { return Matrix(n, std::vector<double>(n, 0.0)); }

/// Records left after dropping the first `burn_in`.
inline std::span<const TraceRecord> retained(const McmcTrace& trace, std::size_t burn_in) {
  require(trace.records.size() > burn_in, ErrorCode::EmptyTrace,
          "trace has " + std::to_string(trace.records.size()) + " records, burn-in is " + std::to_string(burn_in));
  return std::span<const TraceRecord>(trace.records).subspan(burn_in);
}

struct EdgeProbMatrix {
  int n = 0;
  Matrix strict;  // strict[i][j]: frequency of i > j
  Matrix tie;     // tie[i][j]: frequency of i ~ j
  std::size_t samples = 0;
};

inline EdgeProbMatrix edge_probabilities(std::span<const TiedPartialOrder> samples) {
  require(!samples.empty(), ErrorCode::EmptyTrace, "no samples");
  const int n = samples.front().size();
  EdgeProbMatrix out{n, zeros(n), zeros(n), samples.size()};
  for (const auto& h : samples)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (h.dominates(i, j)) out.strict[i][j] += 1.0;
        if (h.tied(i, j)) out.tie[i][j] += 1.0;
      }
  const double T = static_cast<double>(samples.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.strict[i][j] /= T;
      out.tie[i][j] /= T;
    }
  return out;
}

inline EdgeProbMatrix edge_probabilities(const McmcTrace& trace, std::size_t burn_in) {
  std::vector<TiedPartialOrder> orders;
  for (const auto& r : retained(trace, burn_in)) orders.push_back(r.order);
  return edge_probabilities(orders);
}

struct Consensus {
  int n = 0;
  std::vector<Edge> edges;  // kept strict relations, i > j
  std::vector<Edge> ties;   // kept tie pairs, i < j
  /// Pairs (i, k) with i > j and j > k kept but i > k dropped.
  std::vector<Edge> transitivity_gaps;

  bool has(int i, int j) const { return std::binary_search(edges.begin(), edges.end(), Edge{i, j}); }
};

/// Keeps strict relations with frequency above epsilon (every pair when
/// epsilon <= 0) and ties above tie_threshold. Not closed or repaired.
inline Consensus consensus(const EdgeProbMatrix& p, double epsilon, double tie_threshold = 0.5) {
  Consensus c;
  c.n = p.n;
  std::vector<Mask> rows(p.n, 0);
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) {
      if (i == j) continue;
      if (epsilon <= 0.0 || p.strict[i][j] > epsilon) {
        c.edges.push_back({i, j});
        rows[i] |= bit(j);
      }
      if (i < j && p.tie[i][j] > tie_threshold) c.ties.push_back({i, j});
    }
  for (int i = 0; i < p.n; ++i) {
    Mask reach = 0;
    for_each_bit(rows[i], [&](int j) { reach |= rows[j]; });
    for_each_bit(reach & ~rows[i] & ~bit(i), [&](int k) { c.transitivity_gaps.push_back({i, k}); });
  }
  return c;
}

struct RocPoint {
  double epsilon = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
};

/// Relations are ordered pairs. Positives are the closure edges of the truth
/// with ties read as unordered; every other ordered pair is a negative.
inline std::vector<RocPoint> roc_curve(const EdgeProbMatrix& p, const PartialOrder& truth,
                                       std::span<const double> grid) {
  require(truth.size() == p.n, ErrorCode::ShapeMismatch, "truth and summary have different actor counts");
  const int positives = truth.edge_count();
  require(positives > 0, ErrorCode::NoTruthEdges, "reference order has no relations");
  const int negatives = p.n * (p.n - 1) - positives;
  std::vector<RocPoint> out;
  for (double eps : grid) {
    const Consensus c = consensus(p, eps);
    int tp = 0, fp = 0;
    for (const Edge& e : c.edges) (truth.dominates(e.from, e.to) ? tp : fp) += 1;
    out.push_back({eps, static_cast<double>(tp) / positives, negatives ? static_cast<double>(fp) / negatives : 0.0});
  }
  return out;
}

inline std::vector<double> epsilon_grid(int steps = 100) {
  std::vector<double> g(steps + 1);
  for (int k = 0; k <= steps; ++k) g[k] = static_cast<double>(k) / steps;
  return g;
}

inline Matrix cocluster_matrix(std::span<const Partition> samples) {
  require(!samples.empty(), ErrorCode::EmptyTrace, "no samples");
  const int n = samples.front().size();
  Matrix m = zeros(n);
  for (const auto& s : samples)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (s.block_of(i) == s.block_of(j)) m[i][j] += 1.0;
  for (auto& row : m)
    for (double& x : row) x /= static_cast<double>(samples.size());
  return m;
}

inline Matrix cocluster_matrix(const McmcTrace& trace, std::size_t burn_in) {
  std::vector<Partition> parts;
  for (const auto& r : retained(trace, burn_in)) parts.push_back(r.partition);
  return cocluster_matrix(parts);
}

/// Entry d-1 is the mass at depth d.
inline std::vector<double> depth_histogram(std::span<const int> depths, int n) {
  require(!depths.empty(), ErrorCode::EmptyTrace, "no samples");
  std::vector<double> h(n, 0.0);
  for (int d : depths) {
    require(d >= 1 && d <= n, ErrorCode::ShapeMismatch, "depth out of range");
    h[d - 1] += 1.0;
  }
  for (double& x : h) x /= static_cast<double>(depths.size());
  return h;
}

inline std::vector<double> depth_histogram(const McmcTrace& trace, std::size_t burn_in) {
  std::vector<int> d;
  for (const auto& r : retained(trace, burn_in)) d.push_back(r.depth);
  return depth_histogram(d, trace.n);
}

// Savage-Dickey -------------------------------------------------------------

struct ModelPoint {
  int C = 1;
  int K = 1;
};

struct BayesFactor {
  double bf = 0.0;
  double se = 0.0;  // delta-method, treating both samples as independent draws
  bool infinite = false;
  double prior_freq = 0.0;
  double posterior_freq = 0.0;
};

/// B10 = prior / posterior frequency of the nested point {C = n, K = k0}.
inline BayesFactor savage_dickey_bf(std::span<const ModelPoint> prior, std::span<const ModelPoint> posterior, int n,
                                    int k0) {
  require(!prior.empty() && !posterior.empty(), ErrorCode::EmptyTrace, "need prior and posterior samples");
  auto freq = [&](std::span<const ModelPoint> s) {
    double hits = 0;
    for (const auto& x : s)
      if (x.C == n && x.K == k0) hits += 1;
    return hits / static_cast<double>(s.size());
  };
  BayesFactor out;
  out.prior_freq = freq(prior);
  out.posterior_freq = freq(posterior);
  require(out.prior_freq > 0.0, ErrorCode::ZeroPriorMass, "nested point never drawn under the prior");
  if (out.posterior_freq == 0.0) {
    out.infinite = true;
    out.bf = std::numeric_limits<double>::infinity();
    out.se = std::numeric_limits<double>::infinity();
    return out;
  }
  out.bf = out.prior_freq / out.posterior_freq;
  const double rel = (1.0 - out.prior_freq) / (prior.size() * out.prior_freq) +
                     (1.0 - out.posterior_freq) / (posterior.size() * out.posterior_freq);
  out.se = out.bf * std::sqrt(rel);
  return out;
}

inline std::vector<ModelPoint> model_points(const McmcTrace& trace, std::size_t burn_in) {
  std::vector<ModelPoint> out;
  for (const auto& r : retained(trace, burn_in)) out.push_back({r.C, r.K});
  return out;
}

// WAIC -----------------------------------------------------------------------

struct Waic {
  double elpd = 0.0;
  double se = 0.0;
  std::vector<double> pointwise;
};

/// ll[s][i] is the log-likelihood of list i at sample s.
/// elpd_i = log mean_s exp(ll) - var_s(ll).
inline Waic elpd_waic(const Matrix& ll) {
  require(ll.size() >= 2, ErrorCode::TooShort, "WAIC needs at least 2 samples");
  const std::size_t S = ll.size(), N = ll.front().size();
  require(N >= 1, ErrorCode::TooShort, "WAIC needs at least one list");
  Waic out;
  out.pointwise.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < S; ++s) {
      require(ll[s].size() == N, ErrorCode::ShapeMismatch, "ragged log-likelihood matrix");
      if (!std::isfinite(ll[s][i])) fail(ErrorCode::DegenerateColumn, "list " + std::to_string(i + 1) + " has an infinite log-likelihood");
      best = std::max(best, ll[s][i]);
    }
    double acc = 0.0, mean = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      acc += std::exp(ll[s][i] - best);
      mean += ll[s][i];
    }
    mean /= static_cast<double>(S);
    double var = 0.0;
    for (std::size_t s = 0; s < S; ++s) var += (ll[s][i] - mean) * (ll[s][i] - mean);
    var /= static_cast<double>(S - 1);
    out.pointwise[i] = best + std::log(acc / static_cast<double>(S)) - var;
    out.elpd += out.pointwise[i];
  }
  if (N > 1) {
    const double m = out.elpd / static_cast<double>(N);
    double v = 0.0;
    for (double x : out.pointwise) v += (x - m) * (x - m);
    v /= static_cast<double>(N - 1);
    out.se = std::sqrt(static_cast<double>(N) * v);
  }
  return out;
}

inline Waic elpd_waic(const McmcTrace& trace, std::size_t burn_in) {
  Matrix ll;
  for (const auto& r : retained(trace, burn_in)) ll.push_back(r.pointwise);
  return elpd_waic(ll);
}

/// Series of one recorded scalar after burn-in.
template <class F>
std::vector<double> trace_series(const McmcTrace& trace, std::size_t burn_in, F&& field) {
  std::vector<double> out;
  for (const auto& r : retained(trace, burn_in)) out.push_back(static_cast<double>(field(r)));
  return out;
}

inline double mean(std::span<const double> x) {
  require(!x.empty(), ErrorCode::EmptyTrace, "empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace posetmc
