#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ulamnet/google.hpp"
#include "ulamnet/maps.hpp"

namespace ulamnet {

struct RankMeta {
  double alpha = 1.0;
  std::int64_t iterations = 0;  // power steps or kept map iterations
  double residual = 0.0;        // last L1 change (power method)
  bool converged = true;
  bool attractor_warning = false;
  std::string method;  // "power" or "trajectory"
  // Per-iteration L1 change, capped at 4096 entries.
  std::vector<double> residual_history;
};

// Stationary probability vector over cells together with its ranking order
// (descending probability, ties by ascending cell index) and participation
// ratio.
struct RankVector {
  std::vector<double> probs;
  std::vector<std::int32_t> order;
  double par = 1.0;
  RankMeta meta;
};

// Effective number of occupied components, (sum |v|^2)^2 / sum |v|^4.
// Invariant under scalar rescaling; throws on a zero vector.
double participation_ratio(std::span<const double> v);
double participation_ratio(std::span<const std::complex<double>> v);

// Power iteration from the uniform vector until the L1 change per step drops
// to tol or max_iter is reached. Non-convergence is flagged, not thrown.
RankVector pagerank_power(const GoogleOperator& op, double tol,
                          std::int64_t max_iter);

// 10 * ceil(ln tol / ln alpha) for alpha < 1; a generous fallback at alpha = 1
// where the contraction bound does not apply.
std::int64_t default_power_max_iter(double alpha, double tol);

// Occupation histogram of n_traj direct trajectories of the continuous map
// (the undamped limit), each t_iters steps with the first burn_in discarded.
RankVector pagerank_trajectory(const MapSpec& spec, std::int32_t n_cells,
                               std::int64_t t_iters, std::int32_t n_traj,
                               std::int64_t burn_in, std::uint64_t seed);

// CSV "rank,cell,probability"; zero-probability cells are included so the
// file always has n_cells rows.
void write_rank_csv(const RankVector& rank, const std::string& path,
                    const std::string& header_comment = "");
std::string rank_meta_to_json(const RankVector& rank);

}  // namespace ulamnet
