#include "ulamnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ulamnet/rng.hpp"
#include "ulamnet/spectrum.hpp"

namespace ulamnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0, r_squared = 1.0;
};

LineFit least_squares_line(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("fit: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  if (xs.size() > 2)
    fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / sxx);
  return fit;
}

const char* binning_name(Binning b) {
  return b == Binning::None ? "none" : "logarithmic";
}

}  // namespace

PowerLawFit fit_power_law(std::span<const double> xs, std::span<const double> ys,
                          double lo, double hi, Binning binning) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit: xs and ys must have equal length");
  if (!(lo > 0.0 && hi > lo))
    throw std::invalid_argument("fit: need 0 < lo < hi");

  std::int64_t positive_in_range = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (xs[i] >= lo && xs[i] <= hi && ys[i] > 0.0) ++positive_in_range;
  if (positive_in_range < 8)
    throw std::invalid_argument("fit: fewer than 8 positive points in range");

  std::vector<double> lx, ly;
  if (binning == Binning::None) {
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] >= lo && xs[i] <= hi && ys[i] > 0.0 && xs[i] > 0.0) {
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
      }
  } else {
    const int nbins =
        static_cast<int>(std::ceil(std::log2(hi / lo) - 1e-12));
    std::vector<double> sum(nbins, 0.0);
    std::vector<std::int64_t> count(nbins, 0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(xs[i] >= lo && xs[i] <= hi)) continue;
      auto bin = static_cast<int>(std::floor(std::log2(xs[i] / lo)));
      bin = std::clamp(bin, 0, nbins - 1);
      sum[bin] += ys[i];
      ++count[bin];
    }
    for (int b = 0; b < nbins; ++b) {
      if (count[b] == 0) continue;
      const double mean = sum[b] / static_cast<double>(count[b]);
      if (mean <= 0.0) continue;
      const double center = lo * std::pow(2.0, b + 0.5);  // geometric center
      lx.push_back(std::log(center));
      ly.push_back(std::log(mean));
    }
  }
  // Unbinned fits regress on the raw points; binned fits may aggregate the
  // (>= 8) input points into fewer bins, but a slope needs at least three.
  if (lx.size() < (binning == Binning::None ? 8u : 3u))
    throw std::invalid_argument("fit: too few regression points");

  const LineFit line = least_squares_line(lx, ly);
  PowerLawFit fit;
  fit.exponent = -line.slope;
  fit.stderr_ = line.slope_stderr;
  fit.lo = lo;
  fit.hi = hi;
  fit.r_squared = line.r_squared;
  fit.binning = binning;
  fit.n_points = positive_in_range;
  fit.n_regression = static_cast<std::int64_t>(lx.size());
  return fit;
}

PowerLawFit fit_rank_decay(const RankVector& rank, double lo, double hi,
                           Binning binning) {
  const auto n = static_cast<std::int64_t>(rank.probs.size());
  if (hi <= 0.0) hi = static_cast<double>(n) / 10.0;
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (std::int64_t r = 0; r < n; ++r) {
    xs[r] = static_cast<double>(r + 1);
    ys[r] = rank.probs[static_cast<std::size_t>(rank.order[r])];
  }
  return fit_power_law(xs, ys, lo, hi, binning);
}

PowerLawFit fit_degree_distribution(const DegreeHistogram& hist, double lo,
                                    double hi) {
  std::int64_t kappa_max = 0;
  for (const auto& [kappa, count] : hist.counts)
    kappa_max = std::max(kappa_max, kappa);
  if (kappa_max < 2) throw std::invalid_argument("degree fit: trivial histogram");
  // Complete integer grid up to a power-of-two edge so factor-2 bin means
  // estimate the node density per unit degree.
  std::int64_t edge = 1;
  while (edge <= kappa_max) edge *= 2;
  if (hi <= 0.0) hi = static_cast<double>(edge) - 0.5;
  std::vector<double> xs(static_cast<std::size_t>(edge - 1));
  std::vector<double> ys(static_cast<std::size_t>(edge - 1), 0.0);
  for (std::int64_t k = 1; k < edge; ++k)
    xs[static_cast<std::size_t>(k - 1)] = static_cast<double>(k);
  for (const auto& [kappa, count] : hist.counts)
    if (kappa >= 1 && kappa < edge)
      ys[static_cast<std::size_t>(kappa - 1)] = static_cast<double>(count);
  return fit_power_law(xs, ys, lo, hi, Binning::Logarithmic);
}

TheoreticalExponents theoretical_exponents(const MapSpec& spec, double nu) {
  spec.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("exponents: nu must be positive");
  TheoreticalExponents out;
  out.beta = spec.z1 - 1.0;
  if (spec.model == MapModel::Model1) {
    if (spec.z2 < 1.0) out.mu_out = (2.0 - spec.z2) / (1.0 - spec.z2);
  } else {
    out.mu_in = (4.0 * nu - 1.0) / (2.0 * nu - 1.0);
  }
  return out;
}

ScanGrid scan_par(const MapSpec& base, std::span<const double> a_values,
                  std::span<const double> alpha_values, std::int32_t n_cells,
                  const ScanBudget& budget) {
  if (base.model != MapModel::Model2)
    throw std::invalid_argument("scan: base spec must be the second model");
  if (a_values.empty() || alpha_values.empty())
    throw std::invalid_argument("scan: value lists must be nonempty");
  if (!std::is_sorted(a_values.begin(), a_values.end()) ||
      !std::is_sorted(alpha_values.begin(), alpha_values.end()))
    throw std::invalid_argument("scan: value lists must be sorted");

  ScanGrid grid;
  grid.a_values.assign(a_values.begin(), a_values.end());
  grid.alpha_values.assign(alpha_values.begin(), alpha_values.end());
  const std::size_t cells = a_values.size() * alpha_values.size();
  grid.par.assign(cells, kNaN);
  grid.beta.assign(cells, kNaN);

  for (std::size_t ia = 0; ia < a_values.size(); ++ia) {
    MapSpec spec = base;
    spec.a = a_values[ia];
    std::optional<UlamNetwork> net;
    for (std::size_t ja = 0; ja < alpha_values.size(); ++ja) {
      const double alpha = alpha_values[ja];
      const std::size_t slot = ia * alpha_values.size() + ja;
      try {
        RankVector rank;
        if (alpha >= 1.0) {
          rank = pagerank_trajectory(spec, n_cells, budget.t_iters,
                                     budget.n_traj, budget.burn_in,
                                     derive_stream_seed(budget.seed, ia));
        } else {
          if (!net)
            net = build_monte_carlo(spec, n_cells, budget.n_samples,
                                    derive_stream_seed(budget.seed, ia));
          const GoogleOperator op(*net, alpha);
          const std::int64_t max_iter =
              budget.max_iter > 0 ? budget.max_iter
                                  : default_power_max_iter(alpha, budget.tol);
          rank = pagerank_power(op, budget.tol, max_iter);
        }
        grid.par[slot] = rank.par;
        if (budget.fit_beta) {
          try {
            grid.beta[slot] =
                fit_rank_decay(rank, budget.fit_lo, budget.fit_hi).exponent;
          } catch (const std::exception&) {
            // beta stays NaN; the scan itself carries on
          }
        }
      } catch (const std::exception&) {
        // cell failure recorded as NaN
      }
    }
  }
  return grid;
}

GapStudy gap_scaling_study(const MapSpec& spec,
                           std::span<const std::int32_t> n_values,
                           std::int64_t n_samples, std::uint64_t master_seed) {
  if (n_values.size() < 2)
    throw std::invalid_argument("gap study: need at least two sizes");
  GapStudy study;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const std::int32_t n = n_values[i];
    const UlamNetwork net = build_monte_carlo(
        spec, n, n_samples, derive_stream_seed(master_seed, static_cast<std::uint64_t>(n)));
    const GoogleOperator op(net, 1.0);
    const double gap = spectral_gap(op);
    study.points.push_back({n, gap});
    if (gap > 0.0) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(gap));
    }
  }
  if (lx.size() >= 2) {
    const LineFit line = least_squares_line(lx, ly);
    study.slope = line.slope;
    study.intercept = line.intercept;
  }
  return study;
}

std::string fit_to_json(const PowerLawFit& fit) {
  nlohmann::json j;
  j["exponent"] = fit.exponent;
  j["stderr"] = fit.stderr_;
  j["range"] = {fit.lo, fit.hi};
  j["r_squared"] = fit.r_squared;
  j["binning"] = binning_name(fit.binning);
  j["n_points"] = fit.n_points;
  j["n_regression"] = fit.n_regression;
  j["sign_convention"] = "decay reported as positive exponent";
  return j.dump(2);
}

void write_fit_json(const PowerLawFit& fit, const std::string& path,
                    const std::string& config_hash) {
  nlohmann::json j = nlohmann::json::parse(fit_to_json(fit));
  if (!config_hash.empty()) j["config_hash"] = config_hash;
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  const std::string text = j.dump(2);
  std::fwrite(text.data(), 1, text.size(), fp);
  std::fputc('\n', fp);
  std::fclose(fp);
}

void write_scan_csv(const ScanGrid& grid, const std::string& path,
                    const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "a,alpha,par,beta\n");
  for (std::size_t ia = 0; ia < grid.a_values.size(); ++ia)
    for (std::size_t ja = 0; ja < grid.alpha_values.size(); ++ja) {
      const std::size_t slot = ia * grid.alpha_values.size() + ja;
      std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", grid.a_values[ia],
                   grid.alpha_values[ja], grid.par[slot], grid.beta[slot]);
    }
  std::fclose(fp);
}

void write_gap_csv(const GapStudy& study, const std::string& path,
                   const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "n,gap\n");
  for (const auto& [n, gap] : study.points)
    std::fprintf(fp, "%d,%.17g\n", n, gap);
  std::fclose(fp);
}

}  // namespace ulamnet
