#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ulamnet/maps.hpp"

namespace ulamnet {

enum class BuildMethod { MonteCarlo, Quadrature, FromFile };

struct BuildMeta {
  BuildMethod method = BuildMethod::MonteCarlo;
  std::int64_t n_samples = 0;  // trajectories or subdivisions per cell
  std::optional<std::uint64_t> seed;
};

// Sparse column-stochastic cell-to-cell transition matrix of an interval map
// on a uniform N-cell grid. Entry (row_idx[k], j) for k in
// [col_ptr[j], col_ptr[j+1]) is the probability of moving from cell j to that
// row's cell in one map step. Rows are sorted within each column.
struct UlamNetwork {
  std::int32_t n_cells = 0;
  std::vector<std::int64_t> col_ptr;  // size n_cells + 1
  std::vector<std::int32_t> row_idx;
  std::vector<double> values;
  BuildMeta meta;

  std::int64_t nnz() const { return col_ptr.empty() ? 0 : col_ptr.back(); }

  // Checks structure, column sums (1 within 1e-12), and entry ranges.
  void validate() const;
};

enum class Direction { Ingoing, Outgoing };

struct DegreeHistogram {
  Direction direction = Direction::Outgoing;
  // (degree, node count) with degrees strictly increasing. Node counts sum
  // to n_cells; a zero-degree bin appears if some cell has no ingoing links.
  std::vector<std::pair<std::int64_t, std::int64_t>> counts;
};

struct BuildLimits {
  std::int64_t max_nnz = 250'000'000;
};

// Transition matrix estimated by mapping n_samples uniform points per cell.
// Deterministic for a fixed (spec, n_cells, n_samples, seed) regardless of
// the number of threads.
UlamNetwork build_monte_carlo(const MapSpec& spec, std::int32_t n_cells,
                              std::int64_t n_samples, std::uint64_t seed,
                              const BuildLimits& limits = {});

// Deterministic variant using subdivision midpoints per cell instead of
// random samples; serves as a seed-free cross-check of the sampled build.
UlamNetwork build_quadrature(const MapSpec& spec, std::int32_t n_cells,
                             std::int64_t subdivisions,
                             const BuildLimits& limits = {});

// Core builder over an arbitrary interval map f: [0,1] -> [0,1]. With a seed
// the points are sampled, otherwise midpoints are used. Exposed for synthetic
// maps in tests and tools.
UlamNetwork build_from_function(const std::function<double(double)>& f,
                                std::int32_t n_cells,
                                std::int64_t samples_per_cell,
                                std::optional<std::uint64_t> seed,
                                const BuildLimits& limits = {});

DegreeHistogram degree_histogram(const UlamNetwork& net, Direction direction);

// Text format: header "ULAM v1 N NNZ", then one "row col value" triplet per
// line, 0-based, sorted by (col, row), 17 significant digits.
void write_network(const UlamNetwork& net, const std::string& path,
                   const std::string& header_comment = "");
UlamNetwork read_network(const std::string& path);

void write_degree_csv(const DegreeHistogram& hist, const std::string& path,
                      const std::string& header_comment = "");

}  // namespace ulamnet
