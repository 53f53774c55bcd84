#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "posetmc/summaries.hpp"
#include "support/fixtures.hpp"

using namespace posetmc;
using namespace posetmc::testing;

namespace {

TraceRecord rec(const TiedPartialOrder& h, const Partition& s, int K = 1) {
  TraceRecord r;
  r.order = h;
  r.partition = s;
  r.K = K;
  r.C = s.num_blocks();
  r.depth = depth(h);
  return r;
}

McmcTrace trace_of(const std::vector<TiedPartialOrder>& orders) {
  McmcTrace t;
  t.n = orders.front().size();
  for (const auto& h : orders) t.records.push_back(rec(h, collapse_ties(h).partition));
  return t;
}

}  // namespace

TEST(EdgeProbs, IdenticalSamples) {
  const TiedPartialOrder h = TiedPartialOrder::from_untied(h0());
  const McmcTrace t = trace_of({h, h, h});
  const EdgeProbMatrix p = edge_probabilities(t, 0);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_EQ(p.strict[i][j], h.dominates(i, j) ? 1.0 : 0.0);
}

TEST(EdgeProbs, HalfAndBurnIn) {
  const auto a = TiedPartialOrder::from_untied(PartialOrder::from_edges(3, std::vector<Edge>{{0, 1}}));
  const auto b = TiedPartialOrder::from_untied(PartialOrder::empty(3));
  const McmcTrace t = trace_of({b, a, b});
  EXPECT_DOUBLE_EQ(edge_probabilities(t, 1).strict[0][1], 0.5);
  EXPECT_THROW(edge_probabilities(t, 3), Error);
}

TEST(EdgeProbs, TiesSymmetric) {
  const McmcTrace t = trace_of({h0_tied(), TiedPartialOrder::from_untied(h0())});
  const EdgeProbMatrix p = edge_probabilities(t, 0);
  EXPECT_DOUBLE_EQ(p.tie[2][3], 0.5);
  EXPECT_DOUBLE_EQ(p.tie[3][2], 0.5);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(p.strict[i][i], 0.0);
}

TEST(Consensus, Endpoints) {
  std::mt19937_64 rng(1);
  std::vector<TiedPartialOrder> s;
  for (int t = 0; t < 20; ++t) s.push_back(TiedPartialOrder::from_untied(random_order(6, 0.4, rng)));
  const EdgeProbMatrix p = edge_probabilities(s);
  EXPECT_TRUE(consensus(p, 1.0).edges.empty());
  EXPECT_EQ(consensus(p, 0.0).edges.size(), 30u);
  const auto hi = consensus(p, 0.4), lo = consensus(p, 0.2);
  for (const Edge& e : hi.edges) EXPECT_TRUE(lo.has(e.from, e.to));
}

TEST(Consensus, TransitivityGapsAndTies) {
  EdgeProbMatrix p{3, zeros(3), zeros(3), 1};
  p.strict[0][1] = 0.9;
  p.strict[1][2] = 0.9;
  p.strict[0][2] = 0.1;
  p.tie[1][2] = p.tie[2][1] = 0.6;
  const Consensus c = consensus(p, 0.5);
  ASSERT_EQ(c.transitivity_gaps.size(), 1u);
  EXPECT_EQ(c.transitivity_gaps[0], (Edge{0, 2}));
  ASSERT_EQ(c.ties.size(), 1u);
  EXPECT_EQ(c.ties[0], (Edge{1, 2}));
}

TEST(Roc, PerfectTrace) {
  const TiedPartialOrder h = TiedPartialOrder::from_untied(h0());
  const EdgeProbMatrix p = edge_probabilities(trace_of({h, h}), 0);
  const auto grid = epsilon_grid(10);
  const auto roc = roc_curve(p, h0(), grid);
  for (const auto& pt : roc) {
    if (pt.epsilon < 1.0) {
      EXPECT_DOUBLE_EQ(pt.tpr, 1.0);
      EXPECT_DOUBLE_EQ(pt.fpr, pt.epsilon <= 0.0 ? 1.0 : 0.0);
    } else {
      EXPECT_DOUBLE_EQ(pt.tpr, 0.0);
    }
  }
  EXPECT_THROW(roc_curve(p, PartialOrder::empty(5), grid), Error);
}

TEST(Roc, MonotoneAndChanceLine) {
  // Symmetric frequencies: every ordered pair at the same level.
  EdgeProbMatrix p{5, zeros(5), zeros(5), 1};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      if (i != j) p.strict[i][j] = 0.3;
  const auto roc = roc_curve(p, h0(), epsilon_grid(20));
  for (std::size_t k = 0; k < roc.size(); ++k) {
    EXPECT_DOUBLE_EQ(roc[k].tpr, roc[k].fpr);
    if (k) {
      EXPECT_LE(roc[k].tpr, roc[k - 1].tpr);
      EXPECT_LE(roc[k].fpr, roc[k - 1].fpr);
    }
  }
}

TEST(Cocluster, Cases) {
  const std::vector<Partition> singles(3, Partition::singletons(4));
  const Matrix id = cocluster_matrix(singles);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(id[i][j], i == j ? 1.0 : 0.0);
  const std::vector<Partition> one(2, Partition::one_block(3));
  for (const auto& row : cocluster_matrix(one))
    for (double x : row) EXPECT_EQ(x, 1.0);
}

TEST(Cocluster, PositiveSemidefinite) {
  std::mt19937_64 rng(5);
  std::vector<Partition> s;
  for (int t = 0; t < 50; ++t) s.push_back(sample_pdp_partition(5, 0.5, 1.0, rng));
  const Matrix m = cocluster_matrix(s);
  // Gram check on random vectors stands in for the smallest eigenvalue.
  std::normal_distribution<double> z(0.0, 1.0);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> v(5);
    for (double& x : v) x = z(rng);
    double q = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) q += v[i] * m[i][j] * v[j];
    EXPECT_GE(q, -1e-8);
  }
}

TEST(DepthHistogram, Cases) {
  const std::vector<int> full(4, 6);
  const auto h = depth_histogram(full, 6);
  EXPECT_DOUBLE_EQ(h[5], 1.0);
  const std::vector<int> two{2, 3, 2, 3};
  const auto g = depth_histogram(two, 4);
  EXPECT_DOUBLE_EQ(g[1], 0.5);
  EXPECT_DOUBLE_EQ(g[2], 0.5);
  EXPECT_THROW(depth_histogram(std::vector<int>{}, 3), Error);
}

TEST(SavageDickey, Ratios) {
  const std::vector<ModelPoint> prior{{4, 2}, {4, 2}, {3, 2}, {4, 1}};
  const std::vector<ModelPoint> post_half{{4, 2}, {3, 1}, {3, 1}, {3, 1}};
  EXPECT_DOUBLE_EQ(savage_dickey_bf(prior, prior, 4, 2).bf, 1.0);
  EXPECT_DOUBLE_EQ(savage_dickey_bf(prior, post_half, 4, 2).bf, 2.0);
  const std::vector<ModelPoint> never{{3, 1}};
  EXPECT_TRUE(savage_dickey_bf(prior, never, 4, 2).infinite);
  EXPECT_THROW(savage_dickey_bf(never, prior, 4, 2), Error);
}

TEST(Waic, Constant) {
  const Matrix ll(10, std::vector<double>(3, -2.0));
  const Waic w = elpd_waic(ll);
  EXPECT_NEAR(w.elpd, -6.0, 1e-12);
  EXPECT_NEAR(w.se, 0.0, 1e-12);
}

TEST(Waic, TwoSamples) {
  const double a = 0.2, b = 0.5;
  const Matrix ll{{std::log(a)}, {std::log(b)}};
  const double m = (std::log(a) + std::log(b)) / 2;
  const double var = std::pow(std::log(a) - m, 2) + std::pow(std::log(b) - m, 2);
  EXPECT_NEAR(elpd_waic(ll).elpd, std::log((a + b) / 2) - var, 1e-12);
}

TEST(Waic, PermutationAndAdditivity) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(-3.0, 0.7);
  Matrix a(40, std::vector<double>(4)), b(40, std::vector<double>(3));
  for (auto& r : a)
    for (double& x : r) x = z(rng);
  for (auto& r : b)
    for (double& x : r) x = z(rng);
  Matrix shuffled = a;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  EXPECT_NEAR(elpd_waic(a).elpd, elpd_waic(shuffled).elpd, 1e-10);
  Matrix joined = a;
  for (std::size_t s = 0; s < a.size(); ++s) joined[s].insert(joined[s].end(), b[s].begin(), b[s].end());
  EXPECT_NEAR(elpd_waic(joined).elpd, elpd_waic(a).elpd + elpd_waic(b).elpd, 1e-10);
}

TEST(Waic, Degenerate) {
  const Matrix ll{{-1.0, -INFINITY}, {-2.0, -INFINITY}};
  EXPECT_THROW(elpd_waic(ll), Error);
  EXPECT_THROW(elpd_waic(Matrix{{-1.0}}), Error);
}
