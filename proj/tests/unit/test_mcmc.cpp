#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "posetmc/io.hpp"
#include "posetmc/mcmc.hpp"
#include "support/fixtures.hpp"

using namespace posetmc;
using namespace posetmc::testing;

namespace {

ObservationSet royal_acta() { return io::parse_lists(std::string(POSETMC_DATA_DIR) + "/royal_acta_1131_1133.txt"); }

McmcConfig base_config(NoiseModel model) {
  McmcConfig c;
  c.model = model;
  c.iterations = 0;
  c.burn_in = 0;
  c.thin = 1;
  return c;
}

}  // namespace

TEST(Config, Validation) {
  McmcConfig c;
  c.w_rho = 1.0;
  EXPECT_THROW(c.check(), Error);
  c = McmcConfig{};
  c.prior.eta_K = 2.0;
  try {
    c.check();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadConfig);
  }
  EXPECT_EQ(McmcConfig{}.thin_for(15), 30);
}

TEST(Init, OverridesApply) {
  McmcConfig c = base_config(NoiseModel::Mallows);
  c.prior.fixed_K = 4;
  c.prior.no_ties = true;
  std::mt19937_64 rng(1);
  const ObservationSet data = royal_acta();
  const McmcState s = init_state(data, c, rng);
  EXPECT_EQ(s.K, 4);
  EXPECT_EQ(s.clusters(), data.n);
}

TEST(Init, DeterministicUnderSeed) {
  const ObservationSet data = royal_acta();
  const McmcConfig c = base_config(NoiseModel::QueueJump);
  std::mt19937_64 a(77), b(77);
  const McmcState x = init_state(data, c, a), y = init_state(data, c, b);
  EXPECT_EQ(x.zstar, y.zstar);
  EXPECT_EQ(x.partition.assignment(), y.partition.assignment());
  EXPECT_EQ(x.rho.gap(), y.rho.gap());
  EXPECT_EQ(x.p, y.p);
  EXPECT_EQ(x.pointwise, y.pointwise);
}

TEST(Init, StateIsCoherent) {
  const ObservationSet data = royal_acta();
  for (NoiseModel m : {NoiseModel::NoiseFree, NoiseModel::QueueJump, NoiseModel::Mallows}) {
    Sampler s(data, base_config(m));
    std::mt19937_64 rng(5);
    s.initialize(rng);
    EXPECT_TRUE(s.coherent());
    EXPECT_TRUE(std::isfinite(s.state().loglik));
  }
}

TEST(Moves, CacheStaysCoherent) {
  const ObservationSet data = royal_acta();
  for (NoiseModel m : {NoiseModel::NoiseFree, NoiseModel::QueueJump, NoiseModel::Mallows}) {
    Sampler s(data, base_config(m));
    std::mt19937_64 rng(9);
    s.initialize(rng);
    for (int t = 0; t < 150; ++t) {
      s.sweep(rng);
      ASSERT_TRUE(s.coherent()) << "sweep " << t;
      ASSERT_TRUE(std::isfinite(s.state().loglik));
    }
  }
}

TEST(Moves, EveryMoveAccepts) {
  const ObservationSet data = royal_acta();
  Sampler s(data, base_config(NoiseModel::Mallows));
  std::mt19937_64 rng(10);
  s.initialize(rng);
  for (int t = 0; t < 10000; ++t) s.sweep(rng);
  for (int m = 0; m < kMoveCount; ++m) {
    EXPECT_GT(s.moves()[m].accepted, 0) << kMoveNames[m];
    EXPECT_LE(s.moves()[m].accepted, s.moves()[m].proposed);
  }
}

TEST(Moves, KNeverDropsBelowOne) {
  const ObservationSet empty{3, {}};
  McmcConfig c = base_config(NoiseModel::Mallows);
  c.prior.eta_K = 0.9;
  Sampler s(empty, c);
  std::mt19937_64 rng(2);
  s.initialize(rng);
  int at_one = 0;
  for (int t = 0; t < 2000; ++t) {
    const int before = s.state().K;
    const bool moved = s.update_k(rng);
    EXPECT_GE(s.state().K, 1);
    if (before == 1 && !moved) ++at_one;
    EXPECT_EQ(s.state().zstar.cols(), s.state().K);
  }
  EXPECT_GT(at_one, 0);
}

TEST(Moves, RhoProposalArithmetic) {
  const Correlation r = Correlation::from_rho(0.9);
  EXPECT_NEAR(Correlation::from_gap(1.2 * r.gap()).rho(), 0.88, 1e-15);
}

TEST(Moves, PartitionWithOneActor) {
  const ObservationSet empty{1, {}};
  Sampler s(empty, base_config(NoiseModel::Mallows));
  std::mt19937_64 rng(3);
  s.initialize(rng);
  for (int t = 0; t < 100; ++t) {
    s.update_partition(rng);
    EXPECT_EQ(s.state().clusters(), 1);
    EXPECT_EQ(s.state().zstar.rows(), 1);
  }
}

TEST(PriorRecovery, SmallChain) {
  // Empty data: the chain samples the prior.
  const ObservationSet empty{4, {}};
  McmcConfig c = base_config(NoiseModel::Mallows);
  c.prior.eta_K = 0.3;
  c.w_rho = 0.5;
  c.iterations = 80000;
  c.seed = 12;
  const McmcTrace tr = run_chain(empty, c);
  std::map<int, long> ks;
  std::map<std::vector<int>, long> parts;
  std::vector<double> thetas, rhos;
  for (const auto& r : tr.records) {
    rhos.push_back(r.rho);
    ++ks[std::min(r.K, 12)];
    ++parts[r.partition.assignment()];
    thetas.push_back(r.noise);
  }
  std::map<int, double> kp;
  for (int k = 1; k < 12; ++k) kp[k] = std::exp(k_logpmf(k, 0.3));
  kp[12] = std::pow(0.7, 11);
  EXPECT_LT(total_variation(normalized(ks), kp), 0.04);
  std::map<std::vector<int>, double> pp;
  for (const auto& a : set_partitions(4)) pp[a] = std::exp(pdp_log_prob(Partition::from_assignment(a), 0.7, 3.0));
  EXPECT_LT(total_variation(normalized(parts), pp), 0.04);
  // Gamma(3, 1) mean
  double m = 0.0;
  for (double t : thetas) m += t;
  EXPECT_NEAR(m / thetas.size(), 3.0, 0.25);
  const double eta = c.prior.eta_rho;
  EXPECT_LT(ks_distance(rhos, [&](double x) { return 1.0 - std::pow(1.0 - x, eta); }), 0.05);
}

TEST(PriorRecovery, QueueJumpP) {
  // Logit walk with its Jacobian must return the Beta prior on p.
  const ObservationSet empty{3, {}};
  McmcConfig c = base_config(NoiseModel::QueueJump);
  c.prior.p_prior = {2.0, 5.0};
  c.iterations = 60000;
  c.thin = 3;
  c.seed = 13;
  const McmcTrace tr = run_chain(empty, c);
  std::vector<double> ps;
  for (const auto& r : tr.records) ps.push_back(r.noise);
  // Beta(2, 5) CDF
  const auto cdf = [](double x) { return 1.0 - std::pow(1.0 - x, 6) - 6.0 * x * std::pow(1.0 - x, 5); };
  EXPECT_LT(ks_distance(ps, cdf), 0.03);
}

TEST(Posterior, TwoActorsAgreeingLists) {
  ObservationSet d{2, std::vector<RankList>(50, RankList{0, 1})};
  McmcConfig c = base_config(NoiseModel::NoiseFree);
  c.iterations = 20000;
  c.seed = 4;
  const McmcTrace tr = run_chain(d, c);
  long hit = 0;
  for (const auto& r : tr.records) hit += r.order.dominates(0, 1);
  EXPECT_GE(static_cast<double>(hit) / tr.records.size(), 0.95);
}

TEST(DetailedBalance, LatentMoveFlows) {
  // K = 1 and no ties: states are the 6 total orders on 3 actors.
  const ObservationSet d = ObservationSet::validated({{0, 1, 2}, {0, 2, 1}, {1, 0}}, 3);
  McmcConfig c = base_config(NoiseModel::Mallows);
  c.prior.fixed_K = 1;
  c.prior.no_ties = true;
  Sampler s(d, c);
  std::mt19937_64 rng(14);
  s.initialize(rng);
  std::map<std::pair<std::uint64_t, std::uint64_t>, long> flow;
  std::uint64_t cur = relation_key(s.state().order.relation());
  for (int t = 0; t < 300000; ++t) {
    s.update_z(rng);
    const std::uint64_t next = relation_key(s.state().order.relation());
    if (next != cur) ++flow[{cur, next}];
    cur = next;
  }
  EXPECT_FALSE(flow.empty());
  for (const auto& [edge, f] : flow) {
    const long back = flow.count({edge.second, edge.first}) ? flow.at({edge.second, edge.first}) : 0;
    EXPECT_LE(std::abs(f - back), 4.0 * std::sqrt(static_cast<double>(f + back)) + 3.0);
  }
}

TEST(Chain, EmptyAndReproducible) {
  const ObservationSet data = royal_acta();
  McmcConfig c = base_config(NoiseModel::Mallows);
  EXPECT_TRUE(run_chain(data, c).records.empty());
  c.iterations = 300;
  c.thin = 30;
  c.seed = 2024;
  const McmcTrace a = run_chain(data, c), b = run_chain(data, c);
  ASSERT_EQ(a.records.size(), 10u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].loglik, b.records[i].loglik);
    EXPECT_EQ(a.records[i].order, b.records[i].order);
    EXPECT_EQ(a.records[i].noise, b.records[i].noise);
  }
}

TEST(Ess, KnownCases) {
  std::vector<double> c(100, 2.5);
  EXPECT_EQ(ess(c), 0.0);
  EXPECT_THROW(ess(std::vector<double>(5, 1.0)), Error);
  std::mt19937_64 rng(15);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> iid(10000), ar(10000);
  for (double& x : iid) x = z(rng);
  EXPECT_GE(ess(iid), 8000.0);
  EXPECT_LE(ess(iid), 10000.0);
  double prev = 0.0;
  for (double& x : ar) prev = x = 0.9 * prev + z(rng);
  const double e = ess(ar);
  EXPECT_NEAR(e, 10000.0 * 0.1 / 1.9, 0.4 * 526.0);
}
