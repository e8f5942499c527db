#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ulamnet/maps.hpp"
#include "ulamnet/pagerank.hpp"
#include "ulamnet/ulam.hpp"

namespace ulamnet {

enum class Binning { None, Logarithmic };

// Least-squares power law y ~ x^(-exponent); decay exponents are reported
// positive.
struct PowerLawFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double lo = 0.0, hi = 0.0;  // fit range in x
  double r_squared = 0.0;
  Binning binning = Binning::None;
  std::int64_t n_points = 0;      // positive input points in range (>= 8)
  std::int64_t n_regression = 0;  // regression abscissae (bins when binned)
};

// Straight-line fit of log y against log x over lo <= x <= hi. With
// Logarithmic binning the data are first aggregated into factor-2 bins in x
// (zeros participate in the bin means; empty or all-zero bins drop out).
// Requires at least 8 positive points in range and 8 regression points.
PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys,
                          double lo, double hi, Binning binning);

// Decay fit of a ranked probability vector, p_rank ~ 1/rank^beta over
// lo <= rank <= hi (ranks are 1-based). hi <= 0 selects n/10.
PowerLawFit fit_rank_decay(const RankVector& rank, double lo, double hi,
                           Binning binning = Binning::None);

// Tail fit of a degree histogram with logarithmic binning; the histogram is
// expanded onto the full integer degree grid so bin means are true densities.
// hi <= 0 selects the smallest power of two above the largest degree.
PowerLawFit fit_degree_distribution(const DegreeHistogram& hist, double lo,
                                    double hi);

struct TheoreticalExponents {
  double beta = 0.0;                 // stationary-density decay, z1 - 1
  std::optional<double> mu_out;      // Model1 with z2 < 1: (2 - z2)/(1 - z2)
  std::optional<double> mu_in;       // Model2: (4 nu - 1)/(2 nu - 1)
};

// nu is the tangency order of the Model2 cap at its maximum (1 for the sine
// branch).
TheoreticalExponents theoretical_exponents(const MapSpec& spec, double nu = 1.0);

struct ScanBudget {
  std::int64_t n_samples = 10'000;  // network build samples per cell
  double tol = 1e-12;
  std::int64_t max_iter = 0;  // 0: derived from alpha and tol
  std::int64_t t_iters = 10'000'000;
  std::int32_t n_traj = 10;
  std::int64_t burn_in = 10'000;
  std::uint64_t seed = 42;
  bool fit_beta = true;
  double fit_lo = 10.0, fit_hi = 0.0;  // 0: n/10
};

struct ScanGrid {
  std::vector<double> a_values;
  std::vector<double> alpha_values;
  std::vector<double> par;   // row-major (a index, alpha index); NaN = failed
  std::vector<double> beta;  // NaN when not fitted
};

// PageRank participation ratio (and optional decay exponent) over a
// (a, alpha) grid for the Model2 family: power iteration below alpha = 1 and
// direct trajectories at alpha = 1.
ScanGrid scan_par(const MapSpec& base, std::span<const double> a_values,
                  std::span<const double> alpha_values, std::int32_t n_cells,
                  const ScanBudget& budget);

struct GapStudyPoint {
  std::int32_t n = 0;
  double gap = 0.0;
};

struct GapStudy {
  std::vector<GapStudyPoint> points;
  double slope = 0.0;      // least squares of ln gap vs ln N
  double intercept = 0.0;  // ln gap at ln N = 0
};

// Undamped spectral gap across network sizes; builds use a fixed sample
// budget with per-N seeds derived from master_seed.
GapStudy gap_scaling_study(const MapSpec& spec,
                           std::span<const std::int32_t> n_values,
                           std::int64_t n_samples = 10'000,
                           std::uint64_t master_seed = 42);

std::string fit_to_json(const PowerLawFit& fit);
void write_fit_json(const PowerLawFit& fit, const std::string& path,
                    const std::string& config_hash = "");
void write_scan_csv(const ScanGrid& grid, const std::string& path,
                    const std::string& header_comment = "");
void write_gap_csv(const GapStudy& study, const std::string& path,
                   const std::string& header_comment = "");

}  // namespace ulamnet
