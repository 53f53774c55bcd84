#pragma once

// Synthetic list data from a reference order, reusing the membership of a
// template data set.

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "posetmc/error.hpp"
#include "posetmc/observation.hpp"
#include "posetmc/partial_order.hpp"

namespace posetmc {

enum class SimModel { NoiseFree, RandomError, Mallows, QueueJump };

inline SimModel parse_sim_model(const std::string& s) {
  if (s == "noisefree" || s == "noise-free") return SimModel::NoiseFree;
  if (s == "random-error") return SimModel::RandomError;
  if (s == "mallows") return SimModel::Mallows;
  if (s == "qj" || s == "queue-jump") return SimModel::QueueJump;
  fail(ErrorCode::BadConfig, "unknown simulation model '" + s + "'");
}

/// Random-error lists: a uniform extension of h[members], then one uniformly
/// chosen pair is put back into the order it has in `observed`.
template <class Urbg>
RankList random_error_list(const PartialOrder& h, const RankList& observed, Urbg& rng) {
  RankList y = sample_qj(h, observed, 0.0, rng);
  const int m = static_cast<int>(y.size());
  std::uniform_int_distribution<int> pick(0, m - 1);
  const int i = pick(rng);
  int j = pick(rng);
  while (j == i) j = pick(rng);
  const int a = y[std::min(i, j)], b = y[std::max(i, j)];  // a before b in y
  const auto pos = [&](int x) { return std::find(observed.begin(), observed.end(), x) - observed.begin(); };
  if (pos(a) > pos(b)) std::swap(y[std::min(i, j)], y[std::max(i, j)]);
  return y;
}

/// One list per template list, over the same members. `param` is theta for
/// Mallows and p for queue-jumping.
template <class Urbg>
ObservationSet simulate_lists(const TiedPartialOrder& truth, const ObservationSet& templ, SimModel model, double param,
                              Urbg& rng) {
  require(templ.n <= truth.size(), ErrorCode::ShapeMismatch, "template uses actors beyond the reference order");
  const PartialOrder h = truth.as_unordered();
  ObservationSet out;
  out.n = truth.size();
  for (const RankList& members : templ.lists) {
    switch (model) {
      case SimModel::NoiseFree: out.lists.push_back(sample_qj(h, members, 0.0, rng)); break;
      case SimModel::RandomError: out.lists.push_back(random_error_list(h, members, rng)); break;
      case SimModel::Mallows: out.lists.push_back(sample_list(h, members, {NoiseModel::Mallows, 0.0, param}, rng)); break;
      case SimModel::QueueJump: out.lists.push_back(sample_list(h, members, {NoiseModel::QueueJump, param, 1.0}, rng)); break;
    }
  }
  return out;
}

/// Template with the given list lengths and uniformly chosen members.
template <class Urbg>
ObservationSet random_template(int n, const std::vector<int>& lengths, Urbg& rng) {
  ObservationSet t;
  t.n = n;
  std::vector<int> actors(n);
  std::iota(actors.begin(), actors.end(), 0);
  for (int len : lengths) {
    require(len >= 2 && len <= n, ErrorCode::LengthMismatch, "list lengths must lie in [2, n]");
    std::shuffle(actors.begin(), actors.end(), rng);
    t.lists.emplace_back(actors.begin(), actors.begin() + len);
  }
  return t;
}

}  // namespace posetmc
