#pragma once

// Payoff tensor and the six ranking metrics.
//
// Tensor entry (i, j, g, t) is agent i's mean per-round payoff against agent j
// in game g, trial t, averaged over the two seatings: i as row against j as
// column, and j as row against i as column. A self-pairing is one match and
// the entry averages both seats.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

#include "cooplab/error.hpp"

namespace cooplab {

class PayoffTensor {
 public:
  PayoffTensor() = default;
  PayoffTensor(std::vector<std::string> agents, std::size_t games, std::size_t trials)
      : agents_(std::move(agents)),
        games_(games),
        trials_(trials),
        data_(agents_.size() * agents_.size() * games * trials, std::numeric_limits<double>::quiet_NaN()) {}

  const std::vector<std::string>& agents() const { return agents_; }
  std::size_t num_agents() const { return agents_.size(); }
  std::size_t num_games() const { return games_; }
  std::size_t num_trials() const { return trials_; }
  std::array<std::size_t, 4> shape() const { return {num_agents(), num_agents(), games_, trials_}; }

  double& at(std::size_t i, std::size_t j, std::size_t g, std::size_t t) { return data_[offset(i, j, g, t)]; }
  double at(std::size_t i, std::size_t j, std::size_t g, std::size_t t) const { return data_[offset(i, j, g, t)]; }

  bool complete() const {
    return !data_.empty() && std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  // Mean over games and trials.
  double pair_mean(std::size_t i, std::size_t j) const {
    double s = 0;
    for (std::size_t g = 0; g < games_; ++g) {
      for (std::size_t t = 0; t < trials_; ++t) s += at(i, j, g, t);
    }
    return s / static_cast<double>(games_ * trials_);
  }
  // Mean over trials.
  double game_pair_mean(std::size_t i, std::size_t j, std::size_t g) const {
    double s = 0;
    for (std::size_t t = 0; t < trials_; ++t) s += at(i, j, g, t);
    return s / static_cast<double>(trials_);
  }

 private:
  std::size_t offset(std::size_t i, std::size_t j, std::size_t g, std::size_t t) const {
    if (i >= num_agents() || j >= num_agents() || g >= games_ || t >= trials_) {
      throw Error(ErrorCode::IncompleteTensor, "tensor index out of range");
    }
    return ((i * num_agents() + j) * games_ + g) * trials_ + t;
  }

  std::vector<std::string> agents_;
  std::size_t games_ = 0;
  std::size_t trials_ = 0;
  std::vector<double> data_;
};

inline constexpr int kReplicatorSteps = 1000;
inline constexpr double kExtinctionThreshold = 1e-6;

struct ReplicatorTrace {
  std::vector<std::vector<double>> shares;  // steps + 1 rows, starting uniform
  std::vector<int> extinct_at;              // step of extinction, -1 if never
};

// Discrete replicator dynamics on the payoff matrix A (A[i][j] = payoff of i
// against j), shifted so the smallest entry is 1.
inline ReplicatorTrace replicator_dynamics(const std::vector<std::vector<double>>& a, int steps = kReplicatorSteps,
                                           double threshold = kExtinctionThreshold) {
  const std::size_t n = a.size();
  if (n == 0) throw Error(ErrorCode::DegeneratePayoffs, "empty payoff matrix");
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : a) {
    if (row.size() != n) throw Error(ErrorCode::DegeneratePayoffs, "payoff matrix must be square");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::DegeneratePayoffs, "payoff matrix must be finite");
      lo = std::min(lo, v);
    }
  }
  std::vector<std::vector<double>> s(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s[i][j] = a[i][j] - lo + 1;
  }

  ReplicatorTrace trace;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  trace.shares.push_back(x);
  trace.extinct_at.assign(n, -1);
  std::vector<double> fitness(n);
  for (int step = 1; step <= steps; ++step) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) {
      fitness[i] = 0;
      for (std::size_t j = 0; j < n; ++j) fitness[i] += s[i][j] * x[j];
      mean += x[i] * fitness[i];
    }
    if (!(mean > 0)) throw Error(ErrorCode::DegeneratePayoffs, "population payoff is zero");
    for (std::size_t i = 0; i < n; ++i) x[i] = x[i] * fitness[i] / mean;
    for (std::size_t i = 0; i < n; ++i) {
      if (trace.extinct_at[i] < 0 && x[i] < threshold) {
        trace.extinct_at[i] = step;
        x[i] = 0;
      }
    }
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= total;
    trace.shares.push_back(x);
  }
  return trace;
}

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"round_robin_average", "pct_best_score",  "worst_case_score",
                                                 "replicator_dynamic",  "group1_tourney", "group2_tourney"};
  return names;
}

struct MetricReport {
  std::string metric;
  std::vector<double> scores;        // per agent, tensor order
  std::vector<std::size_t> ranking;  // agent indices, best first
  std::vector<int> ranks;            // per agent, 1-based
};

// Orders agents by `key` (descending, compared lexicographically) and breaks
// remaining ties by `tie_order` (ascending).
inline MetricReport rank_scores(std::string metric, std::vector<double> scores,
                                const std::vector<std::vector<double>>& keys,
                                const std::vector<std::size_t>& tie_order) {
  MetricReport r;
  r.metric = std::move(metric);
  r.scores = std::move(scores);
  r.ranking.resize(r.scores.size());
  std::iota(r.ranking.begin(), r.ranking.end(), std::size_t{0});
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    return tie_order[a] < tie_order[b];
  });
  r.ranks.assign(r.scores.size(), 0);
  for (std::size_t k = 0; k < r.ranking.size(); ++k) r.ranks[r.ranking[k]] = static_cast<int>(k + 1);
  return r;
}

// Scores are compared after rounding to 12 significant digits so that
// summation-order noise does not decide a ranking.
inline double rank_key(double v) {
  if (v == 0 || !std::isfinite(v)) return v;
  const double scale = std::pow(10.0, 11 - std::floor(std::log10(std::abs(v))));
  return std::round(v * scale) / scale;
}

// `tie_order[i]` is agent i's position in the tie-break order.
inline std::vector<MetricReport> compute_metrics(const PayoffTensor& t, const std::vector<std::size_t>& tie_order) {
  if (!t.complete()) throw Error(ErrorCode::IncompleteTensor, "payoff tensor has missing entries");
  const std::size_t n = t.num_agents();
  if (tie_order.size() != n) throw Error(ErrorCode::IncompleteTensor, "tie order does not match the roster");

  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = t.pair_mean(i, j);
  }

  std::vector<double> rr(n), best(n, 0), worst(n), g1(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    double all = 0, others = 0;
    worst[i] = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      all += a[i][j];
      if (j != i) others += a[i][j];
      worst[i] = std::min(worst[i], a[i][j]);
    }
    rr[i] = all / static_cast<double>(n);
    g2[i] = rr[i];
    g1[i] = n > 1 ? others / static_cast<double>(n - 1) : rr[i];
  }
  for (std::size_t g = 0; g < t.num_games(); ++g) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = rank_key(t.game_pair_mean(i, j, g));
      double top = *std::max_element(v.begin(), v.end());
      for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == top) best[i] += 1;
      }
    }
  }
  for (double& b : best) b = 100.0 * b / static_cast<double>(t.num_games() * n);

  auto plain = [&](const std::vector<double>& s) {
    std::vector<std::vector<double>> keys;
    for (double v : s) keys.push_back({rank_key(v)});
    return keys;
  };

  auto rep = replicator_dynamics(a);
  const auto& final_shares = rep.shares.back();
  std::vector<std::vector<double>> rep_keys;
  for (std::size_t i = 0; i < n; ++i) {
    double survived = rep.extinct_at[i] < 0 ? std::numeric_limits<double>::infinity() : rep.extinct_at[i];
    rep_keys.push_back({rank_key(final_shares[i]), survived});
  }

  return {rank_scores("round_robin_average", rr, plain(rr), tie_order),
          rank_scores("pct_best_score", best, plain(best), tie_order),
          rank_scores("worst_case_score", worst, plain(worst), tie_order),
          rank_scores("replicator_dynamic", final_shares, rep_keys, tie_order),
          rank_scores("group1_tourney", g1, plain(g1), tie_order),
          rank_scores("group2_tourney", g2, plain(g2), tie_order)};
}

inline void to_json(nlohmann::json& j, const MetricReport& r) {
  j = {{"metric", r.metric}, {"scores", r.scores}, {"ranking", r.ranking}, {"ranks", r.ranks}};
}

}  // namespace cooplab
