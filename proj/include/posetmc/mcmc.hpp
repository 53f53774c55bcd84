#pragma once

// Metropolis-within-Gibbs sampler over (K, rho, S, Z*, theta or p).
//
// A sweep is: one K move, `reseats_per_sweep` single-actor reseatings,
// `z_updates_per_sweep` latent-entry moves (default n), one rho move and one
// noise-parameter move. Likelihoods are only re-evaluated for lists whose
// members are touched by a move.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "posetmc/bits.hpp"
#include "posetmc/error.hpp"
#include "posetmc/observation.hpp"
#include "posetmc/partial_order.hpp"
#include "posetmc/partition.hpp"
#include "posetmc/prior.hpp"

namespace posetmc {

struct McmcConfig {
  long long iterations = 10'000;  // sweeps
  int thin = 0;                   // 0 means 2n
  int burn_in = 500;              // records, dropped at summary time
  std::uint64_t seed = 1;
  NoiseModel model = NoiseModel::Mallows;
  PriorConfig prior;
  double w_rho = 0.9;
  double theta_step = 0.5;
  double p_step = 1.0;
  int reseats_per_sweep = 1;
  int z_updates_per_sweep = 0;  // 0 means n
  int rescales_per_sweep = 1;   // joint (rho, Z) moves
  double w_rescale = 0.5;       // their width constant, in (0,1)

  int thin_for(int n) const { return thin > 0 ? thin : 2 * n; }
  int z_updates_for(int n) const { return z_updates_per_sweep > 0 ? z_updates_per_sweep : n; }

  void check() const {
    require(iterations >= 0, ErrorCode::BadConfig, "iterations must be >= 0");
    require(thin >= 0 && burn_in >= 0, ErrorCode::BadConfig, "thin and burn_in must be >= 0");
    require(w_rho > 0.0 && w_rho < 1.0 && w_rescale > 0.0 && w_rescale < 1.0, ErrorCode::BadConfig,
            "w_rho and w_rescale must lie in (0,1)");
    require(theta_step > 0.0 && p_step > 0.0, ErrorCode::BadConfig, "step sizes must be positive");
    require(reseats_per_sweep >= 0 && z_updates_per_sweep >= 0 && rescales_per_sweep >= 0, ErrorCode::BadConfig,
            "update counts must be >= 0");
    try {
      prior.check();
    } catch (const Error& e) {
      fail(ErrorCode::BadConfig, e.what());
    }
  }
};

struct McmcState {
  Partition partition;
  LatentMatrix zstar;  // row c belongs to block c
  int K = 1;
  Correlation rho;
  double theta = 1.0;
  double p = 0.0;
  TiedPartialOrder order;
  std::vector<double> pointwise;
  double loglik = 0.0;

  int clusters() const { return partition.num_blocks(); }
};

inline NoiseParams noise_params(NoiseModel model, const McmcState& s) { return {model, s.p, s.theta}; }

enum class Move { K = 0, Partition, Z, Rho, Noise, Rescale };
inline constexpr int kMoveCount = 6;
inline constexpr std::array<std::string_view, kMoveCount> kMoveNames{"K", "partition", "Z", "rho", "noise", "rescale"};

struct MoveStats {
  long long proposed = 0;
  long long accepted = 0;
  double rate() const { return proposed ? static_cast<double>(accepted) / proposed : 0.0; }
};

struct TraceRecord {
  long long iteration = 0;
  double loglik = 0.0;
  std::vector<double> pointwise;
  int K = 1;
  int C = 1;
  double rho = 0.0;
  double noise = 0.0;  // theta or p; NaN for the noise-free model
  int depth = 1;
  TiedPartialOrder order;
  Partition partition;
};

struct McmcTrace {
  NoiseModel model = NoiseModel::Mallows;
  int n = 0;
  std::vector<TraceRecord> records;
  std::array<MoveStats, kMoveCount> moves{};
};

namespace detail {

/// List likelihoods evaluated from cluster-level dominance, with a cache per
/// list keyed by the list-frame relation (lists of up to 8 actors).
class ListEvaluator {
 public:
  explicit ListEvaluator(const ObservationSet& data) : data_(&data), members_(data.size(), 0), cache_(data.size()) {
    for (std::size_t i = 0; i < data.size(); ++i)
      for (int a : data.lists[i]) members_[i] |= bit(a);
  }

  std::size_t size() const { return members_.size(); }
  Mask members(std::size_t i) const { return members_[i]; }

  std::vector<int> lists_touching(Mask actors) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i] & actors) out.push_back(static_cast<int>(i));
    return out;
  }

  /// dom[a] holds the clusters strictly below cluster a.
  double eval(int i, std::span<const int> assign, std::span<const Mask> dom, const NoiseParams& np, bool cached) {
    const RankList& y = data_->lists[i];
    const int m = static_cast<int>(y.size());
    Relation r(m);
    std::uint64_t key = 0;
    for (int s = 0; s < m; ++s) {
      const int ca = assign[y[s]];
      for (int t = 0; t < m; ++t) {
        const int cb = assign[y[t]];
        if (ca != cb && has(dom[ca], cb)) {
          r.set(s, t);
          if (m <= 8) key |= bit(s * 8 + t);
        }
      }
    }
    const bool use_cache = cached && m <= 8;
    if (use_cache) {
      auto it = cache_[i].find(key);
      if (it != cache_[i].end()) return it->second;
    }
    const double v = list_loglik_local(PartialOrder::validated(r), np);
    if (use_cache) {
      if (cache_[i].size() > kMaxEntries) cache_[i].clear();
      cache_[i].emplace(key, v);
    }
    return v;
  }

  void clear() {
    for (auto& c : cache_) c.clear();
  }

 private:
  static constexpr std::size_t kMaxEntries = 1 << 16;
  const ObservationSet* data_;
  std::vector<Mask> members_;
  std::vector<std::unordered_map<std::uint64_t, double>> cache_;
};

/// Relabels blocks canonically and permutes latent rows to match.
inline void canonicalize(std::vector<int>& assign, LatentMatrix& z) {
  std::vector<int> map(z.rows(), -1);
  int next = 0;
  for (int& a : assign) {
    if (map[a] < 0) map[a] = next++;
    a = map[a];
  }
  LatentMatrix out(0, z.cols());
  std::vector<int> inverse(next);
  for (int old = 0; old < z.rows(); ++old)
    if (map[old] >= 0) inverse[map[old]] = old;
  for (int c = 0; c < next; ++c) out.append_row(z.row(inverse[c]));
  z = std::move(out);
}

template <class Urbg>
double uniform01(Urbg& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <class Urbg>
bool accept(double log_ratio, Urbg& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

}  // namespace detail

class Sampler {
 public:
  Sampler(const ObservationSet& data, const McmcConfig& config)
      : data_(&data), config_(config), n_(data.n), eval_(data) {
    config_.check();
    require(n_ >= 1, ErrorCode::BadConfig, "need at least one actor");
  }

  const McmcState& state() const { return s_; }
  const McmcConfig& config() const { return config_; }
  const std::array<MoveStats, kMoveCount>& moves() const { return moves_; }
  NoiseParams noise() const { return noise_params(config_.model, s_); }

  /// Draws (K, rho, S, Z*, noise) from the prior until the likelihood is
  /// finite.
  template <class Urbg>
  void initialize(Urbg& rng) {
    constexpr int kMaxTries = 10'000;
    const PriorConfig& pc = config_.prior;
    for (int attempt = 0; attempt < kMaxTries; ++attempt) {
      PriorDraw d = sample_prior_poset(n_, pc, rng);
      McmcState s;
      s.partition = std::move(d.partition);
      s.zstar = std::move(d.zstar);
      s.K = d.K;
      s.rho = d.rho;
      s.theta = sample_gamma(pc.theta_prior[0], pc.theta_prior[1], rng);
      s.p = sample_beta(pc.p_prior[0], pc.p_prior[1], rng);
      set_state(std::move(s));
      if (std::isfinite(s_.loglik)) return;
    }
    fail(ErrorCode::BadConfig, "no finite-likelihood initial state after 10000 prior draws");
  }

  /// Installs a state and recomputes every cached quantity from scratch.
  void set_state(McmcState s) {
    require(s.partition.size() == n_, ErrorCode::ShapeMismatch, "partition size differs from actor count");
    require(s.zstar.rows() == s.partition.num_blocks() && s.zstar.cols() == s.K, ErrorCode::ShapeMismatch,
            "latent matrix shape does not match (C, K)");
    s_ = std::move(s);
    assign_ = s_.partition.assignment();
    dom_ = cluster_dominance(s_.zstar);
    s_.order = latent_to_poset(s_.partition, s_.zstar);
    eval_.clear();
    s_.pointwise.assign(eval_.size(), 0.0);
    for (std::size_t i = 0; i < eval_.size(); ++i)
      s_.pointwise[i] = eval_.eval(static_cast<int>(i), assign_, dom_, noise(), true);
    s_.loglik = total(s_.pointwise);
  }

  /// Recomputes h* and the likelihood from scratch and compares with the
  /// cached values.
  bool coherent() const {
    if (!(latent_to_poset(s_.partition, s_.zstar) == s_.order)) return false;
    const auto fresh = dataset_loglik(*data_, s_.order, noise());
    return fresh.pointwise == s_.pointwise && fresh.total == s_.loglik;
  }

  template <class Urbg>
  bool update_k(Urbg& rng) {
    ++moves_[static_cast<int>(Move::K)].proposed;
    const int k_new = s_.K + (detail::uniform01(rng) < 0.5 ? -1 : 1);
    if (k_new == 0) return false;
    LatentMatrix z = s_.zstar;
    if (k_new > s_.K) {
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> column(z.rows());
      for (int r = 0; r < z.rows(); ++r) {
        const Conditional c = coordinate_conditional(z.row(r), s_.rho);
        column[r] = c.mean + std::sqrt(c.variance) * normal(rng);
      }
      z.append_column(column);
    } else {
      z.drop_last_column();
    }
    auto dom = cluster_dominance(z);
    std::vector<double> pw = s_.pointwise;
    if (dom != dom_)
      for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = eval_.eval(static_cast<int>(i), assign_, dom, noise(), true);
    const double ll = total(pw);
    const double log_ratio = k_logpmf(k_new, config_.prior.eta_K) - k_logpmf(s_.K, config_.prior.eta_K) + ll - s_.loglik;
    if (!detail::accept(log_ratio, rng)) return false;
    s_.K = k_new;
    s_.zstar = std::move(z);
    commit(std::move(dom), std::move(pw), ll);
    ++moves_[static_cast<int>(Move::K)].accepted;
    return true;
  }

  /// Reseats one uniformly chosen actor: existing blocks carry weight
  /// (n_c - eta_a) and two auxiliary blocks share (eta_b + eta_a C) evenly.
  /// If the actor was alone its current row is one of the auxiliaries.
  template <class Urbg>
  bool update_partition(Urbg& rng) {
    if (n_ == 1) return false;
    ++moves_[static_cast<int>(Move::Partition)].proposed;
    const int j = std::uniform_int_distribution<int>(0, n_ - 1)(rng);
    const int old_block = assign_[j];
    std::vector<int> sizes(s_.clusters(), 0);
    for (int a : assign_) ++sizes[a];
    const bool alone = sizes[old_block] == 1;

    std::vector<int> assign = assign_;
    LatentMatrix z = s_.zstar;
    std::vector<double> aux1(s_.K), aux2(s_.K);
    if (alone) {
      std::copy(z.row(old_block).begin(), z.row(old_block).end(), aux1.begin());
      z.erase_row(old_block);
      sizes.erase(sizes.begin() + old_block);
      for (int& a : assign)
        if (a > old_block) --a;
    } else {
      fill_latent_row(std::span<double>(aux1), s_.rho, rng);
      --sizes[old_block];
    }
    fill_latent_row(std::span<double>(aux2), s_.rho, rng);
    const int c_rest = z.rows();

    const std::vector<int> touched = eval_.lists_touching(bit(j));
    const NoiseParams np = noise();
    const int options = c_rest + 2;
    std::vector<double> logw(options);
    std::vector<std::vector<double>> liks(options, std::vector<double>(touched.size()));

    auto score = [&](int option, std::span<const Mask> dom) {
      double s = 0.0;
      for (std::size_t t = 0; t < touched.size(); ++t) {
        liks[option][t] = eval_.eval(touched[t], assign, dom, np, true);
        s += liks[option][t];
      }
      return s;
    };

    const auto dom_rest = cluster_dominance(z);
    for (int c = 0; c < c_rest; ++c) {
      assign[j] = c;
      logw[c] = std::log(sizes[c] - config_.prior.eta_a) + score(c, dom_rest);
    }
    const double new_mass = config_.prior.eta_b + config_.prior.eta_a * c_rest;
    std::array<LatentMatrix, 2> zaux{z, z};
    zaux[0].append_row(aux1);
    zaux[1].append_row(aux2);
    std::array<std::vector<Mask>, 2> dom_aux;
    assign[j] = c_rest;
    for (int x = 0; x < 2; ++x) {
      dom_aux[x] = cluster_dominance(zaux[x]);
      logw[c_rest + x] = new_mass > 0.0 ? std::log(new_mass / 2.0) + score(c_rest + x, dom_aux[x]) : kNegInf;
    }

    const int pick = sample_log_weights(logw, rng);
    if (pick < 0) return false;  // every option impossible; keep the state

    const bool same = alone ? pick == c_rest : pick == old_block;
    if (pick < c_rest) {
      assign[j] = pick;
    } else {
      assign[j] = c_rest;
      z = std::move(zaux[pick - c_rest]);
    }
    std::vector<Mask> dom = pick < c_rest ? dom_rest : dom_aux[pick - c_rest];
    std::vector<double> pw = s_.pointwise;
    for (std::size_t t = 0; t < touched.size(); ++t) pw[touched[t]] = liks[pick][t];

    detail::canonicalize(assign, z);
    assign_ = std::move(assign);
    s_.partition = Partition::from_assignment(assign_);
    s_.zstar = std::move(z);
    const double ll = total(pw);
    commit(cluster_dominance(s_.zstar), std::move(pw), ll);
    if (!same) ++moves_[static_cast<int>(Move::Partition)].accepted;
    return !same;
  }

  /// Random walk on one latent entry with the conditional spread of that
  /// coordinate under Sigma_rho.
  template <class Urbg>
  bool update_z(Urbg& rng) {
    ++moves_[static_cast<int>(Move::Z)].proposed;
    const int r = std::uniform_int_distribution<int>(0, s_.clusters() - 1)(rng);
    const int c = std::uniform_int_distribution<int>(0, s_.K - 1)(rng);
    const Conditional cond = coordinate_conditional(s_.zstar.row(r), c, s_.rho);
    std::normal_distribution<double> normal(0.0, 1.0);
    LatentMatrix z = s_.zstar;
    z(r, c) += std::sqrt(cond.variance) * normal(rng);
    const double log_prior = latent_row_logpdf(z.row(r), s_.rho) - latent_row_logpdf(s_.zstar.row(r), s_.rho);

    auto dom = cluster_dominance(z);
    std::vector<double> pw = s_.pointwise;
    double ll = s_.loglik;
    if (dom != dom_) {
      Mask block = 0;
      for (int a = 0; a < n_; ++a)
        if (assign_[a] == r) block |= bit(a);
      for (int i : eval_.lists_touching(block)) pw[i] = eval_.eval(i, assign_, dom, noise(), true);
      ll = total(pw);
    }
    if (!detail::accept(log_prior + ll - s_.loglik, rng)) return false;
    s_.zstar = std::move(z);
    commit(std::move(dom), std::move(pw), ll);
    ++moves_[static_cast<int>(Move::Z)].accepted;
    return true;
  }

  /// 1 - rho is scaled by delta ~ U(w, 1/w); the order does not depend on rho.
  template <class Urbg>
  bool update_rho(Urbg& rng) {
    ++moves_[static_cast<int>(Move::Rho)].proposed;
    const double w = config_.w_rho;
    const double delta = std::uniform_real_distribution<double>(w, 1.0 / w)(rng);
    const double gap = delta * s_.rho.gap();
    if (gap > 1.0 || gap <= 0.0) return false;
    const Correlation proposal = Correlation::from_gap(gap);
    const double eta = config_.prior.eta_rho;
    const double log_ratio = rho_logpdf(proposal, eta) + latent_matrix_logpdf(s_.zstar, proposal) -
                             rho_logpdf(s_.rho, eta) - latent_matrix_logpdf(s_.zstar, s_.rho) - std::log(delta);
    if (!detail::accept(log_ratio, rng)) return false;
    s_.rho = proposal;
    ++moves_[static_cast<int>(Move::Rho)].accepted;
    return true;
  }

  /// Joint move: 1 - rho is scaled by delta ~ U(w, 1/w) and every row of
  /// Z* is pulled towards (or pushed from) its mean by sqrt(delta), so the
  /// within-row spread follows the correlation. Jacobian delta^(C(K-1)/2 - 1).
  template <class Urbg>
  bool update_rescale(Urbg& rng) {
    if (s_.K < 2) return false;
    ++moves_[static_cast<int>(Move::Rescale)].proposed;
    const double w = config_.w_rescale;
    const double delta = std::uniform_real_distribution<double>(w, 1.0 / w)(rng);
    const double gap = delta * s_.rho.gap();
    if (gap > 1.0 || gap <= 0.0) return false;
    const Correlation proposal = Correlation::from_gap(gap);
    const double scale = std::sqrt(delta);
    LatentMatrix z = s_.zstar;
    for (int r = 0; r < z.rows(); ++r) {
      auto row = z.row(r);
      const double mean = std::accumulate(row.begin(), row.end(), 0.0) / s_.K;
      for (double& x : row) x = mean + scale * (x - mean);
    }
    const double eta = config_.prior.eta_rho;
    const double dims = 0.5 * z.rows() * (s_.K - 1);
    const double log_prior = rho_logpdf(proposal, eta) + latent_matrix_logpdf(z, proposal) -
                             rho_logpdf(s_.rho, eta) - latent_matrix_logpdf(s_.zstar, s_.rho) +
                             (dims - 1.0) * std::log(delta);
    auto dom = cluster_dominance(z);
    std::vector<double> pw = s_.pointwise;
    double ll = s_.loglik;
    if (dom != dom_) {
      for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = eval_.eval(static_cast<int>(i), assign_, dom, noise(), true);
      ll = total(pw);
    }
    if (!detail::accept(log_prior + ll - s_.loglik, rng)) return false;
    s_.rho = proposal;
    s_.zstar = std::move(z);
    commit(std::move(dom), std::move(pw), ll);
    ++moves_[static_cast<int>(Move::Rescale)].accepted;
    return true;
  }

  /// Mallows: Gaussian walk on theta. Queue-jumping: Gaussian walk on
  /// logit(p) with its Jacobian. No-op for the noise-free model.
  template <class Urbg>
  bool update_noise(Urbg& rng) {
    if (config_.model == NoiseModel::NoiseFree) return false;
    ++moves_[static_cast<int>(Move::Noise)].proposed;
    std::normal_distribution<double> normal(0.0, 1.0);
    const PriorConfig& pc = config_.prior;
    NoiseParams np = noise();
    double log_ratio = 0.0;
    if (config_.model == NoiseModel::Mallows) {
      np.theta = s_.theta + config_.theta_step * normal(rng);
      if (np.theta <= 0.0) return false;
      log_ratio = theta_logpdf(np.theta, pc.theta_prior[0], pc.theta_prior[1]) -
                  theta_logpdf(s_.theta, pc.theta_prior[0], pc.theta_prior[1]);
    } else {
      const double r = std::log(s_.p) - std::log1p(-s_.p) + config_.p_step * normal(rng);
      np.p = 1.0 / (1.0 + std::exp(-r));
      if (np.p <= 0.0 || np.p >= 1.0) return false;
      log_ratio = p_logpdf(np.p, pc.p_prior[0], pc.p_prior[1]) - p_logpdf(s_.p, pc.p_prior[0], pc.p_prior[1]) +
                  std::log(np.p) + std::log1p(-np.p) - std::log(s_.p) - std::log1p(-s_.p);
    }
    std::vector<double> pw(s_.pointwise.size());
    for (std::size_t i = 0; i < pw.size(); ++i) pw[i] = eval_.eval(static_cast<int>(i), assign_, dom_, np, false);
    const double ll = total(pw);
    if (!detail::accept(log_ratio + ll - s_.loglik, rng)) return false;
    s_.theta = np.theta;
    s_.p = np.p;
    eval_.clear();
    s_.pointwise = std::move(pw);
    s_.loglik = ll;
    ++moves_[static_cast<int>(Move::Noise)].accepted;
    return true;
  }

  template <class Urbg>
  void sweep(Urbg& rng) {
    if (!config_.prior.fixed_K) update_k(rng);
    if (!config_.prior.no_ties)
      for (int t = 0; t < config_.reseats_per_sweep; ++t) update_partition(rng);
    const int zs = config_.z_updates_for(n_);
    for (int t = 0; t < zs; ++t) update_z(rng);
    update_rho(rng);
    for (int t = 0; t < config_.rescales_per_sweep; ++t) update_rescale(rng);
    update_noise(rng);
  }

  TraceRecord record(long long iteration) const {
    TraceRecord r;
    r.iteration = iteration;
    r.loglik = s_.loglik;
    r.pointwise = s_.pointwise;
    r.K = s_.K;
    r.C = s_.clusters();
    r.rho = s_.rho.rho();
    r.noise = config_.model == NoiseModel::Mallows     ? s_.theta
              : config_.model == NoiseModel::QueueJump ? s_.p
                                                       : std::numeric_limits<double>::quiet_NaN();
    r.depth = depth(s_.order);
    r.order = s_.order;
    r.partition = s_.partition;
    return r;
  }

 private:
  static double total(const std::vector<double>& pw) {
    double s = 0.0;
    for (double v : pw) s += v;
    return s;
  }

  template <class Urbg>
  static int sample_log_weights(const std::vector<double>& logw, Urbg& rng) {
    const double best = *std::max_element(logw.begin(), logw.end());
    if (!std::isfinite(best)) return -1;
    std::vector<double> w(logw.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) sum += w[k] = std::exp(logw[k] - best);
    double u = detail::uniform01(rng) * sum;
    for (std::size_t k = 0; k < w.size(); ++k) {
      u -= w[k];
      if (u < 0.0) return static_cast<int>(k);
    }
    for (std::size_t k = w.size(); k-- > 0;)
      if (w[k] > 0.0) return static_cast<int>(k);
    return -1;
  }

  void commit(std::vector<Mask> dom, std::vector<double> pw, double ll) {
    dom_ = std::move(dom);
    s_.pointwise = std::move(pw);
    s_.loglik = ll;
    s_.order = latent_to_poset(s_.partition, s_.zstar);
  }

  const ObservationSet* data_;
  McmcConfig config_;
  int n_;
  McmcState s_;
  std::vector<int> assign_;
  std::vector<Mask> dom_;
  detail::ListEvaluator eval_;
  std::array<MoveStats, kMoveCount> moves_{};
};

template <class Urbg>
McmcState init_state(const ObservationSet& data, const McmcConfig& config, Urbg& rng) {
  Sampler s(data, config);
  s.initialize(rng);
  return s.state();
}

/// Runs `iterations` sweeps from a prior draw and records every `thin` sweeps.
inline McmcTrace run_chain(const ObservationSet& data, const McmcConfig& config) {
  Sampler sampler(data, config);
  std::mt19937_64 rng(config.seed);
  sampler.initialize(rng);
  McmcTrace trace;
  trace.model = config.model;
  trace.n = data.n;
  const int thin = config.thin_for(data.n);
  trace.records.reserve(static_cast<std::size_t>(config.iterations / thin));
  for (long long it = 1; it <= config.iterations; ++it) {
    sampler.sweep(rng);
    if (it % thin == 0) trace.records.push_back(sampler.record(it));
  }
  trace.moves = sampler.moves();
  return trace;
}

/// Effective sample size by Geyer's initial monotone positive sequence.
/// A constant series has ESS 0.
inline double ess(std::span<const double> x) {
  const std::size_t n = x.size();
  require(n >= 10, ErrorCode::TooShort, "ESS needs at least 10 values");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) s += (x[t] - mean) * (x[t + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (c0 <= 0.0) return 0.0;
  double tau = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
    if (pair <= 0.0) break;
    pair = std::min(pair, prev);
    prev = pair;
    tau += 2.0 * pair;
  }
  return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

}  // namespace posetmc
