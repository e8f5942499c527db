#include "ulamnet/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ulamnet/pagerank.hpp"
#include "ulamnet/rng.hpp"

namespace ulamnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic eigenvalue ordering: descending modulus, ties by descending
// real part, then descending imaginary part (conjugate pairs stay adjacent).
bool ranks_before(const std::complex<double>& a, const std::complex<double>& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma > mb;
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

double gamma_of(const std::complex<double>& lambda) {
  const double mod = std::abs(lambda);
  if (mod <= kNullEigenvalueTol) return kInf;
  return -2.0 * std::log(mod);
}

void fill_gammas_and_pars(EigenSet& set) {
  set.gammas.resize(set.eigenvalues.size());
  for (std::size_t i = 0; i < set.eigenvalues.size(); ++i)
    set.gammas[i] = gamma_of(set.eigenvalues[i]);
  if (set.has_vectors()) {
    set.pars.resize(set.eigenvalues.size());
    for (std::size_t i = 0; i < set.eigenvalues.size(); ++i) {
      const auto col = set.eigenvectors.col(static_cast<Eigen::Index>(i));
      set.pars[i] = participation_ratio(
          std::span<const std::complex<double>>(col.data(), col.size()));
    }
  }
}

// Arnoldi iteration with thick restarts on a Krylov decomposition
// A V = V H + v b^T. Restarts keep an orthonormal basis of the invariant
// subspace of H spanned by the leading Ritz vectors (Krylov-Schur style,
// with a dense eigensolve of the small projected matrix instead of an
// ordered Schur form).
class ArnoldiSolver {
 public:
  ArnoldiSolver(const GoogleOperator& op, std::int32_t k, double tol,
                const ArnoldiOptions& opts)
      : op_(op),
        n_(op.size()),
        k_(k),
        tol_(tol),
        m_(std::min<std::int32_t>(std::max(4 * k, 40), n_)),
        max_restarts_(opts.max_restarts),
        rng_(opts.seed) {
    V_.setZero(n_, m_ + 1);
    H_.setZero(m_ + 1, m_ + 1);
    b_.setZero(m_ + 1);
    set_random_column(0);
  }

  EigenSet run() {
    for (std::int32_t cycle = 0; cycle <= max_restarts_; ++cycle) {
      expand();
      ritz();
      const std::int32_t want = wanted_count();
      bool estimates_ok = true;
      for (std::int32_t i = 0; i < want; ++i)
        estimates_ok = estimates_ok && (estimate_[i] <= tol_);
      if (estimates_ok || cycle == max_restarts_ || q_ >= n_) {
        EigenSet out = extract(want);
        if (out.all_converged || cycle == max_restarts_ || q_ >= n_) return out;
      }
      restart();
    }
    return extract(wanted_count());  // not reached
  }

 private:
  void set_random_column(std::int32_t j) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (std::int32_t i = 0; i < n_; ++i)
        V_(i, j) = 2.0 * rng_.uniform01() - 1.0;
      orthogonalize_column(j);
      const double norm = V_.col(j).norm();
      if (norm > 1e-8) {
        V_.col(j) /= norm;
        return;
      }
    }
    throw std::runtime_error("arnoldi: failed to draw an independent start vector");
  }

  // Two-pass classical Gram-Schmidt of column j against columns 0..j-1.
  void orthogonalize_column(std::int32_t j) {
    if (j == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd c = V_.leftCols(j).transpose() * V_.col(j);
      V_.col(j) -= V_.leftCols(j) * c;
    }
  }

  void expand() {
    while (q_ < m_) {
      const std::int32_t j = q_;
      Eigen::VectorXd w(n_);
      apply(op_, V_.col(j).data(), w.data());
      Eigen::VectorXd h = Eigen::VectorXd::Zero(j + 1);
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd c = V_.leftCols(j + 1).transpose() * w;
        w -= V_.leftCols(j + 1) * c;
        h += c;
      }
      H_.col(j).head(j + 1) = h;
      if (j > 0) H_.row(j).head(j) = b_.head(j).transpose();
      const double beta = w.norm();
      b_.setZero();
      if (beta > 1e-13) {
        V_.col(j + 1) = w / beta;
        b_(j) = beta;
      } else if (j + 1 < n_) {
        set_random_column(j + 1);  // invariant subspace hit; widen the search
      } else {
        q_ = j + 1;
        break;  // the whole space is spanned
      }
      q_ = j + 1;
    }
  }

  void ritz() {
    const Eigen::MatrixXd hq = H_.topLeftCorner(q_, q_);
    Eigen::EigenSolver<Eigen::MatrixXd> es(hq, true);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("arnoldi: projected eigensolve failed");
    std::vector<std::int32_t> idx(static_cast<std::size_t>(q_));
    std::iota(idx.begin(), idx.end(), 0);
    const auto& vals = es.eigenvalues();
    std::sort(idx.begin(), idx.end(), [&vals](std::int32_t a, std::int32_t b) {
      return ranks_before(vals(a), vals(b));
    });
    theta_.resize(static_cast<std::size_t>(q_));
    y_.resize(q_, q_);
    estimate_.resize(static_cast<std::size_t>(q_));
    const Eigen::VectorXd bq = b_.head(q_);
    for (std::int32_t i = 0; i < q_; ++i) {
      theta_[i] = vals(idx[i]);
      y_.col(i) = es.eigenvectors().col(idx[i]);
      const std::complex<double> coupling = bq.transpose() * y_.col(i);
      estimate_[i] = std::abs(coupling);
    }
  }

  // k, widened by one when a conjugate pair straddles the cut.
  std::int32_t wanted_count() const {
    std::int32_t want = std::min<std::int32_t>(k_, q_);
    if (want < q_ && theta_[want - 1].imag() > 0.0 &&
        theta_[want] == std::conj(theta_[want - 1]))
      ++want;
    return want;
  }

  void restart() {
    std::int32_t p = std::min<std::int32_t>(wanted_count() + (m_ - k_) / 2, q_ - 2);
    p = std::max<std::int32_t>(p, wanted_count());
    if (p < q_ && theta_[p - 1].imag() > 0.0 && theta_[p] == std::conj(theta_[p - 1]))
      ++p;
    p = std::min<std::int32_t>(p, q_ - 1);

    Eigen::MatrixXd basis(q_, 2 * p);
    std::int32_t cols = 0;
    for (std::int32_t i = 0; i < p; ++i) {
      if (theta_[i].imag() == 0.0) {
        basis.col(cols++) = y_.col(i).real();
      } else if (theta_[i].imag() > 0.0) {
        basis.col(cols++) = y_.col(i).real();
        basis.col(cols++) = y_.col(i).imag();
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis.leftCols(cols));
    const auto r = static_cast<std::int32_t>(qr.rank());
    if (r < 1) {
      // Degenerate basis; cold-start from the best Ritz direction.
      Eigen::VectorXd v0 =
          V_.leftCols(q_) * (y_.col(0).real() + y_.col(0).imag());
      const double norm = v0.norm();
      b_.setZero();
      q_ = 0;
      if (norm > 1e-13)
        V_.col(0) = v0 / norm;
      else
        set_random_column(0);
      return;
    }
    const Eigen::MatrixXd z =
        qr.householderQ() * Eigen::MatrixXd::Identity(q_, r);

    const Eigen::MatrixXd v_new = V_.leftCols(q_) * z;
    const Eigen::MatrixXd h_new =
        z.transpose() * H_.topLeftCorner(q_, q_) * z;
    const Eigen::VectorXd b_new = z.transpose() * b_.head(q_);
    Eigen::VectorXd v_next = V_.col(q_);

    V_.leftCols(r) = v_new;
    H_.setZero();
    H_.topLeftCorner(r, r) = h_new;
    b_.setZero();
    b_.head(r) = b_new;
    V_.col(r) = v_next;
    q_ = r;

    // Drift control: keep the expansion vector orthonormal to the new block.
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd c = V_.leftCols(r).transpose() * V_.col(r);
      V_.col(r) -= V_.leftCols(r) * c;
    }
    const double s = V_.col(r).norm();
    if (s > 1e-13) {
      V_.col(r) /= s;
      b_.head(r) *= s;
    } else {
      b_.setZero();
      set_random_column(r);
    }
  }

  EigenSet extract(std::int32_t want) {
    EigenSet out;
    out.method = SpectrumMethod::Arnoldi;
    out.eigenvalues.resize(static_cast<std::size_t>(want));
    out.eigenvectors.resize(n_, want);
    out.pair_converged.resize(static_cast<std::size_t>(want));
    out.all_converged = true;
    Eigen::VectorXd xr(n_), xi(n_), tmp_r(n_), tmp_i(n_);
    for (std::int32_t i = 0; i < want; ++i) {
      Eigen::VectorXcd x = V_.leftCols(q_) * y_.col(i);
      const double norm = x.norm();
      if (norm > 0) x /= norm;
      out.eigenvalues[i] = theta_[i];
      out.eigenvectors.col(i) = x;
      xr = x.real();
      xi = x.imag();
      apply(op_, xr.data(), tmp_r.data());
      apply(op_, xi.data(), tmp_i.data());
      Eigen::VectorXcd ax(n_);
      ax.real() = tmp_r;
      ax.imag() = tmp_i;
      const double res = (ax - theta_[i] * x).norm();
      out.pair_converged[i] = res <= tol_ ? 1 : 0;
      out.all_converged = out.all_converged && out.pair_converged[i];
    }
    fill_gammas_and_pars(out);
    return out;
  }

  const GoogleOperator& op_;
  std::int32_t n_;
  std::int32_t k_;
  double tol_;
  std::int32_t m_;
  std::int32_t max_restarts_;
  Xoshiro256pp rng_;

  Eigen::MatrixXd V_;  // n x (m+1): basis columns plus the expansion vector
  Eigen::MatrixXd H_;  // projected operator, top-left q x q valid
  Eigen::VectorXd b_;  // coupling row of the Krylov decomposition
  std::int32_t q_ = 0;

  std::vector<std::complex<double>> theta_;  // Ritz values, sorted
  Eigen::MatrixXcd y_;                       // Ritz coefficient vectors
  std::vector<double> estimate_;             // residual estimates |b^T y|
};

}  // namespace

EigenSet full_spectrum(const GoogleOperator& op, bool want_vectors,
                       std::int32_t dense_cap) {
  const Eigen::MatrixXd g = materialize_dense(op, dense_cap);
  Eigen::EigenSolver<Eigen::MatrixXd> es(g, want_vectors);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("full_spectrum: QR iteration did not converge");
  const auto n = static_cast<std::int32_t>(g.rows());
  std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  const auto& vals = es.eigenvalues();
  std::sort(idx.begin(), idx.end(), [&vals](std::int32_t a, std::int32_t b) {
    return ranks_before(vals(a), vals(b));
  });

  EigenSet out;
  out.method = SpectrumMethod::Dense;
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) out.eigenvalues[i] = vals(idx[i]);
  if (want_vectors) {
    out.eigenvectors.resize(n, n);
    for (std::int32_t i = 0; i < n; ++i) {
      Eigen::VectorXcd col = es.eigenvectors().col(idx[i]);
      const double norm = col.norm();
      if (norm > 0) col /= norm;
      out.eigenvectors.col(i) = col;
    }
  }
  fill_gammas_and_pars(out);
  return out;
}

EigenSet leading_eigenvalues(const GoogleOperator& op, std::int32_t k,
                             double tol, const ArnoldiOptions& opts) {
  if (k < 1 || k > op.size() / 4)
    throw std::invalid_argument("leading_eigenvalues: need 1 <= k <= N/4");
  if (!(tol > 0.0))
    throw std::invalid_argument("leading_eigenvalues: tol must be positive");
  ArnoldiSolver solver(op, k, tol, opts);
  return solver.run();
}

double spectral_gap(const GoogleOperator& op) {
  const EigenSet top = leading_eigenvalues(op, 2, 1e-10);
  return 1.0 - std::abs(top.eigenvalues.at(1));
}

DosHistogram dos_histogram(const EigenSet& eigs, std::int32_t bins,
                           double gamma_max) {
  if (bins < 1) throw std::invalid_argument("dos: bins must be >= 1");
  if (!(gamma_max > 0.0)) throw std::invalid_argument("dos: gamma_max must be > 0");
  DosHistogram dos;
  const double width = gamma_max / bins;
  dos.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (std::int32_t i = 0; i <= bins; ++i) dos.bin_edges[i] = i * width;
  std::vector<std::int64_t> count(static_cast<std::size_t>(bins), 0);
  for (const double g : eigs.gammas) {
    if (std::isinf(g)) {
      ++dos.null_states;
      continue;
    }
    const double clamped = std::max(g, 0.0);  // |lambda| may round above 1
    if (clamped > gamma_max) {
      ++dos.overflow_states;
      continue;
    }
    const auto bin = std::min<std::int64_t>(
        static_cast<std::int64_t>(clamped / width), bins - 1);
    ++count[static_cast<std::size_t>(bin)];
    ++dos.binned_states;
  }
  dos.density.resize(static_cast<std::size_t>(bins));
  for (std::int32_t i = 0; i < bins; ++i)
    dos.density[i] = static_cast<double>(count[i]) / width;
  return dos;
}

std::int64_t count_fast_states(const EigenSet& eigs, double gamma_threshold) {
  std::int64_t n = 0;
  for (const double g : eigs.gammas)
    if (g > gamma_threshold) ++n;
  return n;
}

void write_spectrum_csv(const EigenSet& eigs, const std::string& path,
                        const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "re,im,gamma,par\n");
  for (std::size_t i = 0; i < eigs.eigenvalues.size(); ++i) {
    const double par = eigs.pars.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : eigs.pars[i];
    std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g\n", eigs.eigenvalues[i].real(),
                 eigs.eigenvalues[i].imag(), eigs.gammas[i], par);
  }
  std::fclose(fp);
}

void write_dos_csv(const DosHistogram& dos, const std::string& path,
                   const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("cannot open " + path + " for writing");
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "gamma_lo,gamma_hi,density\n");
  for (std::size_t i = 0; i < dos.density.size(); ++i)
    std::fprintf(fp, "%.17g,%.17g,%.17g\n", dos.bin_edges[i], dos.bin_edges[i + 1],
                 dos.density[i]);
  std::fclose(fp);
}

}  // namespace ulamnet
