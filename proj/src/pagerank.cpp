#include "ulamnet/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ulamnet/rng.hpp"

namespace ulamnet {

namespace {

constexpr std::size_t kResidualHistoryCap = 4096;

std::vector<std::int32_t> ranking_order(const std::vector<double>& probs) {
  std::vector<std::int32_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&probs](std::int32_t a, std::int32_t b) {
    if (probs[a] != probs[b]) return probs[a] > probs[b];
    return a < b;
  });
  return order;
}

void normalize_l1(std::vector<double>& v) {
  double sum = 0.0;
  for (const double x : v) sum += x;
  if (sum <= 0.0) throw std::runtime_error("pagerank: vector sum is not positive");
  for (double& x : v) x /= sum;
}

}  // namespace

double participation_ratio(std::span<const double> v) {
  double s2 = 0.0, s4 = 0.0;
  for (const double x : v) {
    const double x2 = x * x;
    s2 += x2;
    s4 += x2 * x2;
  }
  if (s4 == 0.0) throw std::invalid_argument("participation_ratio: zero vector");
  return s2 * s2 / s4;
}

double participation_ratio(std::span<const std::complex<double>> v) {
  double s2 = 0.0, s4 = 0.0;
  for (const auto& x : v) {
    const double x2 = std::norm(x);
    s2 += x2;
    s4 += x2 * x2;
  }
  if (s4 == 0.0) throw std::invalid_argument("participation_ratio: zero vector");
  return s2 * s2 / s4;
}

std::int64_t default_power_max_iter(double alpha, double tol) {
  if (alpha < 1.0 && alpha > 0.0 && tol > 0.0 && tol < 1.0)
    return std::max<std::int64_t>(
        50, 10 * static_cast<std::int64_t>(std::ceil(std::log(tol) / std::log(alpha))));
  if (alpha == 0.0) return 50;
  return 2'000'000;  // undamped case: no contraction bound
}

RankVector pagerank_power(const GoogleOperator& op, double tol,
                          std::int64_t max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("pagerank: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("pagerank: max_iter must be >= 1");
  const std::int32_t n = op.size();
  std::vector<double> v(static_cast<std::size_t>(n), 1.0 / n);
  std::vector<double> w(static_cast<std::size_t>(n));

  RankVector rank;
  rank.meta.alpha = op.alpha;
  rank.meta.method = "power";
  double change = std::numeric_limits<double>::infinity();
  std::int64_t it = 0;
  while (it < max_iter) {
    apply(op, v.data(), w.data());
    double sum = 0.0;
    for (const double x : w) sum += x;
    const double inv = 1.0 / sum;
    change = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] *= inv;
      change += std::abs(w[i] - v[i]);
    }
    v.swap(w);
    ++it;
    if (rank.meta.residual_history.size() < kResidualHistoryCap)
      rank.meta.residual_history.push_back(change);
    if (change <= tol) break;
  }
  rank.meta.iterations = it;
  rank.meta.residual = change;
  rank.meta.converged = change <= tol;
  normalize_l1(v);
  rank.probs = std::move(v);
  rank.order = ranking_order(rank.probs);
  rank.par = participation_ratio(rank.probs);
  return rank;
}

RankVector pagerank_trajectory(const MapSpec& spec, std::int32_t n_cells,
                               std::int64_t t_iters, std::int32_t n_traj,
                               std::int64_t burn_in, std::uint64_t seed) {
  spec.validate();
  if (n_cells < 2) throw std::invalid_argument("pagerank: n_cells must be >= 2");
  if (n_traj < 1) throw std::invalid_argument("pagerank: n_traj must be >= 1");
  if (burn_in < 0 || t_iters < 10 * std::max<std::int64_t>(burn_in, 1))
    throw std::invalid_argument("pagerank: t_iters must be >= 10 * burn_in");

  const std::int32_t n = n_cells;
  std::vector<std::vector<std::int64_t>> counts(
      static_cast<std::size_t>(n_traj),
      std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int32_t t = 0; t < n_traj; ++t) {
    Xoshiro256pp rng(derive_stream_seed(seed, static_cast<std::uint64_t>(t)));
    double x = rng.uniform01();
    while (x <= 0.0) x = rng.uniform01();
    auto& local = counts[static_cast<std::size_t>(t)];
    for (std::int64_t s = 0; s < t_iters; ++s) {
      x = eval_map(spec, x);
      // The endpoints are fixed points the continuous dynamics never reaches;
      // reinject if rounding lands exactly on one.
      if (x <= 0.0 || x >= 1.0) {
        do {
          x = rng.uniform01();
        } while (x <= 0.0);
      }
      if (s >= burn_in) {
        const auto i = static_cast<std::int64_t>(x * n);
        ++local[static_cast<std::size_t>(std::clamp<std::int64_t>(i, 0, n - 1))];
      }
    }
  }

  std::vector<std::int64_t> total(static_cast<std::size_t>(n), 0);
  for (const auto& local : counts)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += local[i];

  const std::int64_t kept = static_cast<std::int64_t>(n_traj) * (t_iters - burn_in);
  RankVector rank;
  rank.probs.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < rank.probs.size(); ++i)
    rank.probs[i] = static_cast<double>(total[i]) / static_cast<double>(kept);
  rank.order = ranking_order(rank.probs);
  rank.par = participation_ratio(rank.probs);
  rank.meta.alpha = 1.0;
  rank.meta.method = "trajectory";
  rank.meta.iterations = t_iters - burn_in;
  rank.meta.converged = true;
  rank.meta.attractor_warning = find_fixed_point_attractor(spec).has_value();
  return rank;
}

void write_rank_csv(const RankVector& rank, const std::string& path,
                    const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "rank,cell,probability\n");
  for (std::size_t r = 0; r < rank.order.size(); ++r)
    std::fprintf(fp, "%zu,%d,%.17g\n", r + 1, rank.order[r],
                 rank.probs[static_cast<std::size_t>(rank.order[r])]);
  std::fclose(fp);
}

std::string rank_meta_to_json(const RankVector& rank) {
  nlohmann::json j;
  j["alpha"] = rank.meta.alpha;
  j["iterations"] = rank.meta.iterations;
  j["residual"] = rank.meta.residual;
  j["converged"] = rank.meta.converged;
  j["attractor_warning"] = rank.meta.attractor_warning;
  j["method"] = rank.meta.method;
  j["par"] = rank.par;
  return j.dump(2);
}

}  // namespace ulamnet
