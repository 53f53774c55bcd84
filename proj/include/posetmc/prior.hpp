#pragma once

// Generative prior over partial orders with ties: actors are clustered by a
// two-parameter Poisson-Dirichlet process, each cluster gets a latent
// K-vector with equicorrelated Gaussian entries, and cluster a dominates
// cluster b when its vector is larger in every coordinate.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "posetmc/error.hpp"
#include "posetmc/partial_order.hpp"
#include "posetmc/partition.hpp"

namespace posetmc {

/// Row correlation rho in [0,1), stored as gap = 1 - rho so that values
/// near one keep full precision.
class Correlation {
 public:
  constexpr Correlation() = default;

  static Correlation from_rho(double rho) {
    require(rho >= 0.0 && rho < 1.0, ErrorCode::BadRho, "rho must lie in [0,1), got " + std::to_string(rho));
    return from_gap(1.0 - rho);
  }
  static Correlation from_gap(double gap) {
    require(gap > 0.0 && gap <= 1.0, ErrorCode::BadRho, "1-rho must lie in (0,1], got " + std::to_string(gap));
    Correlation c;
    c.gap_ = gap;
    return c;
  }

  double rho() const { return 1.0 - gap_; }
  double gap() const { return gap_; }

 private:
  double gap_ = 1.0;
};

struct PriorConfig {
  double eta_a = 0.7;            // PDP discount, [0,1)
  double eta_b = 3.0;            // PDP strength, > -eta_a
  double eta_rho = 1.0 / 6.0;    // rho ~ Beta(1, eta_rho)
  double eta_K = 0.0625;         // K ~ Geometric(eta_K) on {1,2,...}
  std::array<double, 2> theta_prior{3.0, 1.0};  // Gamma(shape, rate)
  std::array<double, 2> p_prior{1.0, 1.0};      // Beta(a, b)
  std::optional<int> fixed_K;
  bool no_ties = false;

  void check() const {
    require(eta_a >= 0.0 && eta_a < 1.0, ErrorCode::BadHyper, "eta_a must lie in [0,1)");
    require(eta_b > -eta_a, ErrorCode::BadHyper, "eta_b must exceed -eta_a");
    require(eta_rho > 0.0, ErrorCode::BadHyper, "eta_rho must be positive");
    require(eta_K > 0.0 && eta_K <= 1.0, ErrorCode::BadHyper, "eta_K must lie in (0,1]");
    require(theta_prior[0] > 0.0 && theta_prior[1] > 0.0, ErrorCode::BadHyper, "theta prior must be positive");
    require(p_prior[0] > 0.0 && p_prior[1] > 0.0, ErrorCode::BadHyper, "p prior must be positive");
    require(!fixed_K || *fixed_K >= 1, ErrorCode::BadHyper, "fixed_K must be at least 1");
  }
};

/// Dense row-major C x K matrix of cluster attribute rows.
class LatentMatrix {
 public:
  LatentMatrix() = default;
  LatentMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  std::span<const double> row(int r) const { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<double> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)}; }

  void append_row(std::span<const double> values) {
    require(static_cast<int>(values.size()) == cols_, ErrorCode::ShapeMismatch, "row length");
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }
  void erase_row(int r) {
    auto first = data_.begin() + static_cast<std::ptrdiff_t>(r) * cols_;
    data_.erase(first, first + cols_);
    --rows_;
  }
  void append_column(std::span<const double> values) {
    require(static_cast<int>(values.size()) == rows_, ErrorCode::ShapeMismatch, "column length");
    std::vector<double> next;
    next.reserve(static_cast<std::size_t>(rows_) * (cols_ + 1));
    for (int r = 0; r < rows_; ++r) {
      auto old = row(r);
      next.insert(next.end(), old.begin(), old.end());
      next.push_back(values[r]);
    }
    data_ = std::move(next);
    ++cols_;
  }
  void drop_last_column() {
    require(cols_ >= 1, ErrorCode::ShapeMismatch, "no column to drop");
    std::vector<double> next;
    next.reserve(static_cast<std::size_t>(rows_) * (cols_ - 1));
    for (int r = 0; r < rows_; ++r) {
      auto old = row(r);
      next.insert(next.end(), old.begin(), old.end() - 1);
    }
    data_ = std::move(next);
    --cols_;
  }

  friend bool operator==(const LatentMatrix&, const LatentMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// K x K equicorrelation matrix: unit diagonal, rho elsewhere.
inline std::vector<std::vector<double>> sigma_rho(int K, Correlation rho) {
  require(K >= 1, ErrorCode::BadHyper, "K must be at least 1");
  std::vector<std::vector<double>> s(K, std::vector<double>(K, rho.rho()));
  for (int i = 0; i < K; ++i) s[i][i] = 1.0;
  return s;
}

/// log N(row; 0, Sigma_rho). Sigma_rho has eigenvalue 1+(K-1)rho along the
/// ones vector and 1-rho on its complement, so the quadratic form splits into
/// the row mean and the deviations from it. The split keeps it accurate as
/// rho -> 1, where the expanded form cancels.
inline double latent_row_logpdf(std::span<const double> row, Correlation rho) {
  const int K = static_cast<int>(row.size());
  const double gap = rho.gap();
  const double spread = K - (K - 1) * gap;  // 1 + (K-1) rho
  double mean = 0.0;
  for (double x : row) mean += x;
  mean /= K;
  double dev = 0.0;
  for (double x : row) dev += (x - mean) * (x - mean);
  const double quad = dev / gap + K * mean * mean / spread;
  const double logdet = (K - 1) * std::log(gap) + std::log(spread);
  return -0.5 * K * std::log(2.0 * std::numbers::pi) - 0.5 * logdet - 0.5 * quad;
}

inline double latent_matrix_logpdf(const LatentMatrix& z, Correlation rho) {
  double total = 0.0;
  for (int r = 0; r < z.rows(); ++r) total += latent_row_logpdf(z.row(r), rho);
  return total;
}

struct Conditional {
  double mean = 0.0;
  double variance = 1.0;
};

/// Law of one coordinate given the other coordinates of the same row.
inline Conditional coordinate_conditional(std::span<const double> others, Correlation rho) {
  const int m = static_cast<int>(others.size());  // K - 1
  if (m == 0) return {};
  double sum = 0.0;
  for (double x : others) sum += x;
  const double r = rho.rho();
  const double spread = 1.0 + (m - 1) * r;  // 1 + (K-2) rho
  // 1 - m r^2 / spread, rewritten to stay accurate as rho -> 1
  const double variance = rho.gap() * (1.0 + m * r) / spread;
  return {r * sum / spread, variance};
}

/// Same as coordinate_conditional with coordinate `skip` of `row` removed.
inline Conditional coordinate_conditional(std::span<const double> row, int skip, Correlation rho) {
  const int m = static_cast<int>(row.size()) - 1;
  if (m == 0) return {};
  double sum = 0.0;
  for (int k = 0; k <= m; ++k)
    if (k != skip) sum += row[k];
  const double r = rho.rho();
  const double spread = 1.0 + (m - 1) * r;
  return {r * sum / spread, rho.gap() * (1.0 + m * r) / spread};
}

template <class Urbg>
void fill_latent_row(std::span<double> row, Correlation rho, Urbg& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shared = std::sqrt(rho.rho()) * normal(rng);
  const double own = std::sqrt(rho.gap());
  for (double& x : row) x = shared + own * normal(rng);
}

/// C i.i.d. rows from MVN(0, Sigma_rho).
template <class Urbg>
LatentMatrix sample_latent_rows(int C, int K, Correlation rho, Urbg& rng) {
  require(K >= 1 && C >= 0, ErrorCode::BadHyper, "bad latent shape");
  LatentMatrix z(C, K);
  for (int r = 0; r < C; ++r) fill_latent_row(z.row(r), rho, rng);
  return z;
}

/// Cluster a dominates cluster b iff its row is larger in every coordinate.
/// Returns one mask per cluster row of dominated clusters.
inline std::vector<Mask> cluster_dominance(const LatentMatrix& z) {
  const int C = z.rows(), K = z.cols();
  std::vector<Mask> dom(C, 0);
  for (int a = 0; a < C; ++a)
    for (int b = 0; b < C; ++b) {
      if (a == b) continue;
      bool all = true;
      for (int k = 0; k < K && all; ++k) all = z(a, k) > z(b, k);
      if (all) dom[a] |= bit(b);
    }
  return dom;
}

/// Actors in one block are tied; across blocks dominance is coordinatewise.
inline TiedPartialOrder latent_to_poset(const Partition& s, const LatentMatrix& z) {
  require(z.rows() == s.num_blocks(), ErrorCode::ShapeMismatch,
          "latent matrix has " + std::to_string(z.rows()) + " rows for " + std::to_string(s.num_blocks()) + " blocks");
  const auto dom = cluster_dominance(z);
  const int n = s.size();
  Relation r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int a = s.block_of(i), b = s.block_of(j);
      if (a == b || has(dom[a], b)) r.set(i, j);
    }
  return TiedPartialOrder::validated(r);
}

/// Exchangeable partition probability of the two-parameter Poisson-Dirichlet
/// process, in product form (covers eta_a = 0, the Dirichlet-process case).
inline double pdp_log_prob(const Partition& s, double eta_a, double eta_b) {
  require(eta_a >= 0.0 && eta_a < 1.0 && eta_b > -eta_a, ErrorCode::BadHyper, "need 0 <= eta_a < 1, eta_b > -eta_a");
  const int n = s.size();
  const int C = s.num_blocks();
  double lp = 0.0;
  for (int i = 1; i < C; ++i) lp += std::log(eta_b + i * eta_a);
  for (int i = 1; i < n; ++i) lp -= std::log(eta_b + i);
  for (int size : s.block_sizes())
    for (int j = 1; j < size; ++j) lp += std::log(j - eta_a);
  return lp;
}

/// Sequential seating: actor m+1 joins block c w.p. (n_c - a)/(m + b) and
/// opens a new block w.p. (b + a C)/(m + b).
template <class Urbg>
Partition sample_pdp_partition(int n, double eta_a, double eta_b, Urbg& rng) {
  require(eta_a >= 0.0 && eta_a < 1.0 && eta_b > -eta_a, ErrorCode::BadHyper, "need 0 <= eta_a < 1, eta_b > -eta_a");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> label(n, 0);
  std::vector<int> sizes;
  for (int m = 0; m < n; ++m) {
    const int C = static_cast<int>(sizes.size());
    if (m == 0) {
      sizes.push_back(1);
      continue;
    }
    double u = unif(rng) * (m + eta_b);
    int pick = C;
    for (int c = 0; c < C; ++c) {
      u -= sizes[c] - eta_a;
      if (u < 0) {
        pick = c;
        break;
      }
    }
    if (pick == C) sizes.push_back(0);
    ++sizes[pick];
    label[m] = pick;
  }
  return Partition::from_assignment(std::move(label));
}

// Hyperprior densities -----------------------------------------------------

inline double k_logpmf(int k, double eta_K) {
  require(k >= 1, ErrorCode::OutOfSupport, "K must be at least 1");
  require(eta_K > 0.0 && eta_K <= 1.0, ErrorCode::BadHyper, "eta_K must lie in (0,1]");
  if (eta_K == 1.0) return k == 1 ? 0.0 : -INFINITY;
  return std::log(eta_K) + (k - 1) * std::log1p(-eta_K);
}

/// Beta(1, eta_rho) density of rho.
inline double rho_logpdf(Correlation rho, double eta_rho) {
  require(eta_rho > 0.0, ErrorCode::BadHyper, "eta_rho must be positive");
  return std::log(eta_rho) + (eta_rho - 1.0) * std::log(rho.gap());
}

/// Gamma(shape, rate) density.
inline double theta_logpdf(double theta, double shape, double rate = 1.0) {
  require(theta > 0.0, ErrorCode::OutOfSupport, "theta must be positive");
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(theta) - rate * theta;
}

/// Beta(a, b) density.
inline double p_logpdf(double p, double a, double b) {
  require(p > 0.0 && p < 1.0, ErrorCode::OutOfSupport, "p must lie in (0,1)");
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p);
}

template <class Urbg>
int sample_k(double eta_K, Urbg& rng) {
  if (eta_K >= 1.0) return 1;
  std::geometric_distribution<int> geo(eta_K);
  return 1 + geo(rng);
}

/// rho ~ Beta(1, eta_rho), drawn as 1 - rho = U^(1/eta_rho).
template <class Urbg>
Correlation sample_rho(double eta_rho, Urbg& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double gap = std::pow(1.0 - unif(rng), 1.0 / eta_rho);
    if (gap > 0.0) return Correlation::from_gap(std::min(gap, 1.0));
  }
}

template <class Urbg>
double sample_gamma(double shape, double rate, Urbg& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

template <class Urbg>
double sample_beta(double a, double b, Urbg& rng) {
  for (;;) {
    const double x = sample_gamma(a, 1.0, rng), y = sample_gamma(b, 1.0, rng);
    const double p = x / (x + y);
    if (p > 0.0 && p < 1.0) return p;
  }
}

struct PriorDraw {
  TiedPartialOrder order;
  Partition partition;
  int K = 1;
  Correlation rho;
  LatentMatrix zstar;
};

/// One draw of (K, rho, S, Z*) and the induced order with ties.
template <class Urbg>
PriorDraw sample_prior_poset(int n, const PriorConfig& config, Urbg& rng) {
  config.check();
  require(n >= 1, ErrorCode::BadHyper, "need at least one actor");
  PriorDraw d;
  d.K = config.fixed_K ? *config.fixed_K : sample_k(config.eta_K, rng);
  d.rho = sample_rho(config.eta_rho, rng);
  d.partition = config.no_ties ? Partition::singletons(n) : sample_pdp_partition(n, config.eta_a, config.eta_b, rng);
  d.zstar = sample_latent_rows(d.partition.num_blocks(), d.K, d.rho, rng);
  d.order = latent_to_poset(d.partition, d.zstar);
  return d;
}

/// Monte Carlo depth masses; entry d-1 holds the mass at depth d.
template <class Urbg>
std::vector<double> prior_depth_distribution(int n, const PriorConfig& config, long samples, Urbg& rng) {
  require(samples >= 1, ErrorCode::BadHyper, "need at least one sample");
  std::vector<double> mass(n, 0.0);
  for (long s = 0; s < samples; ++s) mass[depth(sample_prior_poset(n, config, rng).order) - 1] += 1.0;
  for (double& m : mass) m /= static_cast<double>(samples);
  return mass;
}

}  // namespace posetmc
