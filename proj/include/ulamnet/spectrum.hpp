#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ulamnet/google.hpp"

namespace ulamnet {

enum class SpectrumMethod { Dense, Arnoldi };

// |lambda| at or below this is treated as numerically null; such states get
// gamma = +inf and are excluded from decay-rate histograms.
constexpr double kNullEigenvalueTol = 1e-12;

// Eigenvalues sorted by descending |lambda| (ties by descending real, then
// descending imaginary part), optional L2-normalized right eigenvectors,
// decay rates gamma = -2 ln|lambda|, and per-state participation ratios.
struct EigenSet {
  std::vector<std::complex<double>> eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // n x m; 0 x 0 when not requested
  std::vector<double> gammas;
  std::vector<double> pars;  // empty when eigenvectors were not requested
  SpectrumMethod method = SpectrumMethod::Dense;
  // Arnoldi only: per-pair convergence of the true residual against tol.
  std::vector<std::uint8_t> pair_converged;
  bool all_converged = true;

  bool has_vectors() const { return eigenvectors.size() > 0; }
};

struct DosHistogram {
  std::vector<double> bin_edges;  // size bins + 1, uniform on [0, gamma_max]
  std::vector<double> density;    // states per unit gamma
  std::int64_t binned_states = 0;
  std::int64_t overflow_states = 0;  // finite gamma beyond gamma_max
  std::int64_t null_states = 0;      // |lambda| <= kNullEigenvalueTol
};

// All eigenvalues of the dense operator (Hessenberg reduction plus shifted QR
// under the hood); eigenvectors and participation ratios when requested.
EigenSet full_spectrum(const GoogleOperator& op, bool want_vectors,
                       std::int32_t dense_cap = 4000);

struct ArnoldiOptions {
  std::int32_t max_restarts = 500;
  std::uint64_t seed = 42;  // starting-vector seed; fixed for reproducibility
};

// k (or k+1 when a conjugate pair straddles the cut) leading eigenpairs by
// modulus, via Arnoldi iteration with thick restarts on the matrix-free
// apply. Krylov dimension is max(4k, 40).
EigenSet leading_eigenvalues(const GoogleOperator& op, std::int32_t k,
                             double tol, const ArnoldiOptions& opts = {});

// 1 - |lambda_2|.
double spectral_gap(const GoogleOperator& op);

DosHistogram dos_histogram(const EigenSet& eigs, std::int32_t bins,
                           double gamma_max);

// Number of states with gamma strictly above the threshold, numerically null
// states included.
std::int64_t count_fast_states(const EigenSet& eigs, double gamma_threshold);

void write_spectrum_csv(const EigenSet& eigs, const std::string& path,
                        const std::string& header_comment = "");
void write_dos_csv(const DosHistogram& dos, const std::string& path,
                   const std::string& header_comment = "");

}  // namespace ulamnet
