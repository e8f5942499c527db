#include "ulamnet/ulam.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ulamnet/rng.hpp"

namespace ulamnet {

namespace {

// Destination cell of a mapped point; y is clamped to [0, 1] upstream.
inline std::int32_t cell_of(double y, std::int32_t n) {
  const auto i = static_cast<std::int64_t>(y * n);
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(i, 0, n - 1));
}

struct ColumnEntries {
  std::vector<std::pair<std::int32_t, std::int64_t>> hits;  // (row, count)
};

}  // namespace

void UlamNetwork::validate() const {
  if (n_cells < 2) throw std::invalid_argument("network: n_cells must be >= 2");
  if (col_ptr.size() != static_cast<std::size_t>(n_cells) + 1 || col_ptr.front() != 0)
    throw std::invalid_argument("network: malformed column pointers");
  if (row_idx.size() != values.size() ||
      static_cast<std::int64_t>(values.size()) != col_ptr.back())
    throw std::invalid_argument("network: entry count mismatch");
  for (std::int32_t j = 0; j < n_cells; ++j) {
    const std::int64_t lo = col_ptr[j], hi = col_ptr[j + 1];
    if (hi <= lo) throw std::invalid_argument("network: empty column");
    double sum = 0.0, comp = 0.0;  // Kahan, so long columns do not drift
    for (std::int64_t k = lo; k < hi; ++k) {
      if (row_idx[k] < 0 || row_idx[k] >= n_cells)
        throw std::invalid_argument("network: row index out of range");
      if (k > lo && row_idx[k] <= row_idx[k - 1])
        throw std::invalid_argument("network: rows not strictly increasing");
      if (!(values[k] >= 0.0 && values[k] <= 1.0))
        throw std::invalid_argument("network: entry outside [0, 1]");
      const double y = values[k] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("network: column sum deviates from 1");
  }
}

UlamNetwork build_from_function(const std::function<double(double)>& f,
                                std::int32_t n_cells,
                                std::int64_t samples_per_cell,
                                std::optional<std::uint64_t> seed,
                                const BuildLimits& limits) {
  if (n_cells < 2) throw std::invalid_argument("build: n_cells must be >= 2");
  if (samples_per_cell < 1)
    throw std::invalid_argument("build: samples_per_cell must be >= 1");

  const std::int32_t n = n_cells;
  const std::int64_t m = samples_per_cell;
  std::vector<ColumnEntries> cols(static_cast<std::size_t>(n));
  std::atomic<std::int64_t> total_nnz{0};
  std::atomic<bool> over_cap{false};
  std::atomic<bool> bad_value{false};

#pragma omp parallel
  {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    std::vector<std::int32_t> touched;
    touched.reserve(64);

#pragma omp for schedule(dynamic, 16)
    for (std::int32_t j = 0; j < n; ++j) {
      if (over_cap.load(std::memory_order_relaxed) ||
          bad_value.load(std::memory_order_relaxed))
        continue;
      touched.clear();
      if (seed) {
        Xoshiro256pp rng(derive_stream_seed(*seed, static_cast<std::uint64_t>(j)));
        for (std::int64_t s = 0; s < m; ++s) {
          const double x = (static_cast<double>(j) + rng.uniform01()) / n;
          const double y = f(x);
          if (!std::isfinite(y)) { bad_value.store(true); break; }
          const std::int32_t i = cell_of(std::clamp(y, 0.0, 1.0), n);
          if (counts[i]++ == 0) touched.push_back(i);
        }
      } else {
        for (std::int64_t s = 0; s < m; ++s) {
          const double u = (static_cast<double>(s) + 0.5) / static_cast<double>(m);
          const double x = (static_cast<double>(j) + u) / n;
          const double y = f(x);
          if (!std::isfinite(y)) { bad_value.store(true); break; }
          const std::int32_t i = cell_of(std::clamp(y, 0.0, 1.0), n);
          if (counts[i]++ == 0) touched.push_back(i);
        }
      }
      std::sort(touched.begin(), touched.end());
      auto& out = cols[static_cast<std::size_t>(j)].hits;
      out.reserve(touched.size());
      for (const std::int32_t i : touched) {
        out.emplace_back(i, counts[i]);
        counts[i] = 0;
      }
      if (total_nnz.fetch_add(static_cast<std::int64_t>(out.size())) +
              static_cast<std::int64_t>(out.size()) >
          limits.max_nnz)
        over_cap.store(true);
    }
  }

  if (bad_value.load()) throw std::runtime_error("build: map produced a non-finite value");
  if (over_cap.load()) throw std::runtime_error("build: nonzero count exceeds the memory cap");

  UlamNetwork net;
  net.n_cells = n;
  net.meta.method = seed ? BuildMethod::MonteCarlo : BuildMethod::Quadrature;
  net.meta.n_samples = m;
  net.meta.seed = seed;
  net.col_ptr.resize(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t nnz = 0;
  for (std::int32_t j = 0; j < n; ++j) {
    nnz += cols[j].hits.empty() ? n : static_cast<std::int64_t>(cols[j].hits.size());
    net.col_ptr[static_cast<std::size_t>(j) + 1] = nnz;
  }
  net.row_idx.resize(static_cast<std::size_t>(nnz));
  net.values.resize(static_cast<std::size_t>(nnz));
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::int32_t j = 0; j < n; ++j) {
    std::int64_t k = net.col_ptr[j];
    if (cols[j].hits.empty()) {
      // Dangling column: replace by the uniform column.
      for (std::int32_t i = 0; i < n; ++i, ++k) {
        net.row_idx[k] = i;
        net.values[k] = 1.0 / n;
      }
    } else {
      for (const auto& [i, c] : cols[j].hits) {
        net.row_idx[k] = i;
        net.values[k] = static_cast<double>(c) * inv_m;
        ++k;
      }
    }
  }
  return net;
}

UlamNetwork build_monte_carlo(const MapSpec& spec, std::int32_t n_cells,
                              std::int64_t n_samples, std::uint64_t seed,
                              const BuildLimits& limits) {
  spec.validate();
  if (n_samples < 1) throw std::invalid_argument("build: n_samples must be >= 1");
  return build_from_function([&spec](double x) { return eval_map(spec, x); },
                             n_cells, n_samples, seed, limits);
}

UlamNetwork build_quadrature(const MapSpec& spec, std::int32_t n_cells,
                             std::int64_t subdivisions,
                             const BuildLimits& limits) {
  spec.validate();
  if (subdivisions < 10)
    throw std::invalid_argument("build: subdivisions must be >= 10");
  return build_from_function([&spec](double x) { return eval_map(spec, x); },
                             n_cells, subdivisions, std::nullopt, limits);
}

DegreeHistogram degree_histogram(const UlamNetwork& net, Direction direction) {
  std::vector<std::int64_t> degree(static_cast<std::size_t>(net.n_cells), 0);
  if (direction == Direction::Outgoing) {
    for (std::int32_t j = 0; j < net.n_cells; ++j)
      degree[j] = net.col_ptr[j + 1] - net.col_ptr[j];
  } else {
    for (const std::int32_t i : net.row_idx) ++degree[static_cast<std::size_t>(i)];
  }
  std::map<std::int64_t, std::int64_t> bins;
  for (const std::int64_t d : degree) ++bins[d];
  DegreeHistogram hist;
  hist.direction = direction;
  hist.counts.assign(bins.begin(), bins.end());
  return hist;
}

void write_network(const UlamNetwork& net, const std::string& path,
                   const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  std::fprintf(fp, "ULAM v1 %d %lld\n", net.n_cells,
               static_cast<long long>(net.nnz()));
  for (std::int32_t j = 0; j < net.n_cells; ++j) {
    for (std::int64_t k = net.col_ptr[j]; k < net.col_ptr[j + 1]; ++k)
      std::fprintf(fp, "%d %d %.17g\n", net.row_idx[k], j, net.values[k]);
  }
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fclose(fp);
}

UlamNetwork read_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string tag, version;
  std::int32_t n = 0;
  std::int64_t nnz = 0;
  in >> tag >> version >> n >> nnz;
  if (!in || tag != "ULAM" || version != "v1")
    throw std::runtime_error(path + ": not an ULAM v1 file");
  if (n < 2 || nnz < n) throw std::runtime_error(path + ": implausible header");

  UlamNetwork net;
  net.n_cells = n;
  net.meta.method = BuildMethod::FromFile;
  net.col_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  net.row_idx.resize(static_cast<std::size_t>(nnz));
  net.values.resize(static_cast<std::size_t>(nnz));
  std::int32_t last_j = 0;
  std::int32_t last_i = -1;
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int32_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) throw std::runtime_error(path + ": truncated file");
    if (j < last_j || (j == last_j && i <= last_i))
      throw std::runtime_error(path + ": entries not sorted by (col, row)");
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::runtime_error(path + ": index out of range");
    while (last_j < j) net.col_ptr[++last_j] = k;
    last_i = i;
    net.row_idx[k] = i;
    net.values[k] = v;
  }
  while (last_j < n) net.col_ptr[++last_j] = nnz;
  net.validate();
  return net;
}

void write_degree_csv(const DegreeHistogram& hist, const std::string& path,
                      const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "kappa,count\n");
  for (const auto& [kappa, count] : hist.counts)
    std::fprintf(fp, "%lld,%lld\n", static_cast<long long>(kappa),
                 static_cast<long long>(count));
  std::fclose(fp);
}

}  // namespace ulamnet
