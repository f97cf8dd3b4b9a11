#pragma once

// Lowest eigenpairs of a real symmetric operator.
//
// ground_state() runs thick-restart Lanczos with full reorthogonalization. A
// single Krylov sequence only sees one direction of a degenerate eigenspace, so
// after the first solve the converged vectors are locked and further solves in
// their orthogonal complement are run until none of them produces an
// eigenvalue below the current k-th one.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "polariton/errors.hpp"
#include "polariton/hamiltonian.hpp"

namespace polariton {

template <class Op>
concept LinearOperator = requires(const Op& op, std::span<const double> x, std::span<double> y) {
  op(x, y);
};

struct SolverOptions {
  std::size_t k = 4;
  double tol = 1e-10;              // absolute bound on ||H psi - E psi||
  std::size_t max_iter = 200'000;  // operator applications, all restarts included
  std::uint64_t seed = 1;
  std::size_t max_basis = 120;     // Krylov vectors kept before a thick restart
};

struct Spectrum {
  std::vector<double> eigenvalues;           // ascending, k lowest
  std::vector<std::vector<double>> vectors;  // unit-norm, one per eigenvalue
  std::vector<double> residuals;             // ||H v - e v|| per pair
  std::vector<double> ground_vector;
  double residual = 0.0;
  double degeneracy_gap = std::numeric_limits<double>::infinity();
  std::size_t degenerate_count = 1;  // eigenvalues within the threshold of E0
  bool degenerate = false;
  std::size_t iterations = 0;
};

/// Relative splitting below which the ground level counts as degenerate.
inline double degeneracy_threshold(double e0) { return 1e-8 * std::max(1.0, std::abs(e0)); }

/// splitmix64 step; used to expand a seed into a start vector.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Deterministic vector with entries uniform in [-1, 1).
inline std::vector<double> seeded_vector(std::size_t dim, std::uint64_t seed,
                                         std::uint64_t stream = 0) {
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
  std::vector<double> v(dim);
  for (auto& x : v) {
    x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
  }
  return v;
}

template <LinearOperator Op>
double residual(const Op& op, std::span<const double> psi, double e) {
  std::vector<double> hpsi(psi.size());
  op(psi, std::span<double>(hpsi));
  double r2 = 0.0;
  double n2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double d = hpsi[i] - e * psi[i];
    r2 += d * d;
    n2 += psi[i] * psi[i];
  }
  return std::sqrt(r2 / n2);
}

inline auto as_operator(const SparseHamiltonian& h, unsigned threads = 1) {
  return [&h, threads](std::span<const double> x, std::span<double> y) { h.apply(x, y, threads); };
}

namespace detail {

struct Eigenpair {
  double value;
  Eigen::VectorXd vector;
  double residual;
};

// Flip the sign so that the entry of largest magnitude (first one on ties) is
// positive; makes returned vectors reproducible.
inline void fix_sign(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0) v = -v;
}

// Project `w` onto the complement of the columns of `q` (twice, for stability).
inline void project_out(const Eigen::MatrixXd& q, Eigen::Index cols, Eigen::VectorXd& w) {
  if (cols == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::VectorXd c = q.leftCols(cols).transpose() * w;
    w.noalias() -= q.leftCols(cols) * c;
  }
}

template <LinearOperator Op>
class LanczosRun {
 public:
  LanczosRun(const Op& op, std::size_t dim, const Eigen::MatrixXd& locked, std::size_t nev,
             const SolverOptions& opts, std::uint64_t stream, std::size_t& matvecs)
      : op_(op),
        dim_(dim),
        locked_(locked),
        nev_(nev),
        opts_(opts),
        stream_(stream),
        matvecs_(matvecs) {}

  std::vector<Eigenpair> solve() {
    const auto n_locked = static_cast<std::size_t>(locked_.cols());
    const std::size_t complement = dim_ - n_locked;
    const std::size_t m_max = std::min(complement, std::max(opts_.max_basis, 2 * nev_ + 20));
    const std::size_t keep = std::min(m_max - 1, nev_ + (m_max - nev_) / 3);

    basis_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(m_max));
    proj_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_max), static_cast<Eigen::Index>(m_max));

    if (!append_random(0)) throw NumericalError("Lanczos: could not build a start vector");
    std::size_t size = 1;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w(static_cast<Eigen::Index>(dim_));
    Eigen::VectorXd hx(static_cast<Eigen::Index>(dim_));

    for (;;) {
      const auto j = static_cast<Eigen::Index>(size - 1);
      apply(basis_.col(j), hx);
      w = hx;
      // Full reorthogonalization against the current basis; the coefficients
      // are the projected matrix entries of column j.
      const Eigen::VectorXd c1 = basis_.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis_.leftCols(j + 1) * c1;
      const Eigen::VectorXd c2 = basis_.leftCols(j + 1).transpose() * w;
      w.noalias() -= basis_.leftCols(j + 1) * c2;
      const Eigen::VectorXd coef = c1 + c2;
      project_out(locked_, locked_.cols(), w);
      for (Eigen::Index i = 0; i <= j; ++i) {
        proj_(i, j) = coef[i];
        proj_(j, i) = coef[i];
      }
      anorm_ = std::max(anorm_, std::abs(coef[j]));
      double beta = w.norm();
      const bool exhausted = size == m_max && size == complement;
      const bool invariant = exhausted || beta <= 1e-13 * std::max(1.0, anorm_);
      if (invariant) beta = 0.0;

      const bool full = size == m_max;
      const bool check = invariant || full || (size >= nev_ && size % 4 == 0);
      if (check && size >= nev_) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj_.topLeftCorner(j + 1, j + 1));
        const Eigen::VectorXd& theta = es.eigenvalues();
        const Eigen::MatrixXd& y = es.eigenvectors();
        double worst = 0.0;
        for (std::size_t i = 0; i < nev_; ++i) {
          worst = std::max(worst, beta * std::abs(y(j, static_cast<Eigen::Index>(i))));
        }
        if (worst <= 0.5 * opts_.tol) {
          auto pairs = ritz_pairs(y, j + 1);
          double true_worst = 0.0;
          for (const auto& p : pairs) true_worst = std::max(true_worst, p.residual);
          best = std::min(best, true_worst);
          if (true_worst <= opts_.tol) return pairs;
        } else {
          best = std::min(best, worst);
        }
        if (matvecs_ >= opts_.max_iter) throw NotConverged(matvecs_, best);

        if (full && !exhausted) {
          // Thick restart: keep the lowest Ritz vectors, continue from the
          // residual direction.
          const auto kk = static_cast<Eigen::Index>(keep);
          const Eigen::MatrixXd kept = basis_.leftCols(j + 1) * y.leftCols(kk);
          basis_.leftCols(kk) = kept;
          proj_.setZero();
          for (Eigen::Index i = 0; i < kk; ++i) proj_(i, i) = theta[i];
          size = keep;
          if (invariant) {
            if (!append_random(size)) return ritz_pairs(y, j + 1);
          } else {
            basis_.col(static_cast<Eigen::Index>(size)) = w / beta;
          }
          ++size;
          continue;
        }
      }
      if (matvecs_ >= opts_.max_iter) throw NotConverged(matvecs_, best);
      if (full) {
        // Exhausted the complement without meeting the tolerance.
        throw NotConverged(matvecs_, best);
      }
      if (invariant) {
        if (!append_random(size)) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj_.topLeftCorner(j + 1, j + 1));
          return ritz_pairs(es.eigenvectors(), j + 1);
        }
      } else {
        basis_.col(static_cast<Eigen::Index>(size)) = w / beta;
      }
      ++size;
    }
  }

 private:
  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    op_(std::span<const double>(x.data(), dim_), std::span<double>(y.data(), dim_));
    ++matvecs_;
  }

  // Random direction orthogonal to the locked vectors and the first `col`
  // basis columns, stored in column `col`. False when nothing is left.
  bool append_random(std::size_t col) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      const auto raw = seeded_vector(dim_, opts_.seed, stream_ * 1024 + draws_++);
      Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(dim_));
      const double n0 = v.norm();
      project_out(locked_, locked_.cols(), v);
      project_out(basis_, static_cast<Eigen::Index>(col), v);
      const double n1 = v.norm();
      if (n1 > 1e-8 * n0) {
        basis_.col(static_cast<Eigen::Index>(col)) = v / n1;
        return true;
      }
    }
    return false;
  }

  std::vector<Eigenpair> ritz_pairs(const Eigen::MatrixXd& y, Eigen::Index size) {
    std::vector<Eigenpair> out;
    Eigen::VectorXd hx(static_cast<Eigen::Index>(dim_));
    const auto count = std::min<Eigen::Index>(static_cast<Eigen::Index>(nev_), size);
    for (Eigen::Index i = 0; i < count; ++i) {
      Eigen::VectorXd x = basis_.leftCols(size) * y.col(i);
      project_out(locked_, locked_.cols(), x);
      x.normalize();
      apply(x, hx);
      const double rq = x.dot(hx);
      const double res = (hx - rq * x).norm();
      out.push_back({rq, std::move(x), res});
    }
    return out;
  }

  const Op& op_;
  std::size_t dim_;
  const Eigen::MatrixXd& locked_;
  std::size_t nev_;
  const SolverOptions& opts_;
  std::uint64_t stream_;
  std::size_t& matvecs_;
  std::uint64_t draws_ = 0;
  double anorm_ = 0.0;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd proj_;
};

inline void finalize(Spectrum& s) {
  const double e0 = s.eigenvalues.front();
  s.ground_vector = s.vectors.front();
  s.residual = s.residuals.front();
  s.degeneracy_gap = s.eigenvalues.size() > 1 ? s.eigenvalues[1] - e0
                                              : std::numeric_limits<double>::infinity();
  const double thr = degeneracy_threshold(e0);
  s.degenerate_count = 0;
  for (const double e : s.eigenvalues) {
    if (e - e0 < thr) ++s.degenerate_count;
  }
  s.degenerate = s.degenerate_count > 1;
}

inline void check_request(std::size_t dim, std::size_t k) {
  if (dim == 0) throw NumericalError("eigensolver: empty operator");
  if (k < 1 || k > std::min<std::size_t>(dim, 16)) {
    throw NumericalError("eigensolver: k must lie in [1, min(dim, 16)]");
  }
}

}  // namespace detail

/// Lowest `opts.k` eigenpairs of a symmetric operator of size `dim`.
template <LinearOperator Op>
Spectrum ground_state(const Op& op, std::size_t dim, const SolverOptions& opts = {}) {
  detail::check_request(dim, opts.k);
  if (!(opts.tol > 0.0)) throw NumericalError("eigensolver: tol must be positive");

  std::size_t matvecs = 0;
  Eigen::MatrixXd none(static_cast<Eigen::Index>(dim), 0);
  std::vector<detail::Eigenpair> found =
      detail::LanczosRun<Op>(op, dim, none, opts.k, opts, 0, matvecs).solve();

  // Look for eigenvalues the first Krylov sequence missed (multiplicities).
  for (std::uint64_t stream = 1; found.size() < dim; ++stream) {
    Eigen::MatrixXd locked(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(found.size()));
    for (std::size_t i = 0; i < found.size(); ++i) locked.col(static_cast<Eigen::Index>(i)) = found[i].vector;
    auto extra = detail::LanczosRun<Op>(op, dim, locked, 1, opts, stream, matvecs).solve();
    if (extra.empty()) break;
    const double kth = found.back().value;
    const double margin = std::max(opts.tol, 1e-12 * std::max(1.0, std::abs(kth)));
    if (found.size() >= opts.k && !(extra.front().value < kth - margin)) break;
    found.push_back(std::move(extra.front()));
    std::stable_sort(found.begin(), found.end(),
                     [](const auto& a, const auto& b) { return a.value < b.value; });
    if (found.size() > opts.k) found.pop_back();
  }

  Spectrum s;
  for (auto& p : found) {
    detail::fix_sign(p.vector);
    s.eigenvalues.push_back(p.value);
    s.residuals.push_back(p.residual);
    s.vectors.emplace_back(p.vector.data(), p.vector.data() + p.vector.size());
  }
  s.iterations = matvecs;
  detail::finalize(s);
  return s;
}

/// Exact spectrum of a diagonal operator: unit vectors of the k smallest
/// diagonal entries, ties broken by index.
inline Spectrum diagonal_ground_state(std::span<const double> diag, std::size_t k) {
  detail::check_request(diag.size(), k);
  std::vector<std::size_t> order(diag.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });
  Spectrum s;
  for (std::size_t i = 0; i < k; ++i) {
    s.eigenvalues.push_back(diag[order[i]]);
    std::vector<double> v(diag.size(), 0.0);
    v[order[i]] = 1.0;
    s.vectors.push_back(std::move(v));
    s.residuals.push_back(0.0);
  }
  detail::finalize(s);
  return s;
}

struct DenseSpectrum {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;
};

inline constexpr std::size_t kDefaultDenseLimit = 3000;

inline DenseSpectrum dense_eig(const Eigen::MatrixXd& matrix,
                               std::size_t dense_limit = kDefaultDenseLimit) {
  const auto dim = static_cast<std::size_t>(matrix.rows());
  if (dim > dense_limit) throw DenseLimitExceeded(dim, dense_limit);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix);
  if (es.info() != Eigen::Success) throw NumericalError("dense_eig: decomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Eigen::MatrixXd to_dense(const SparseHamiltonian& h,
                                std::size_t dense_limit = kDefaultDenseLimit) {
  if (h.dim() > dense_limit) throw DenseLimitExceeded(h.dim(), dense_limit);
  const auto n = static_cast<Eigen::Index>(h.dim());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const auto rp = h.row_ptr();
  const auto cols = h.cols();
  const auto vals = h.values();
  for (std::size_t r = 0; r < h.dim(); ++r) {
    for (std::size_t p = rp[r]; p < rp[r + 1]; ++p) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[p])) = vals[p];
    }
  }
  return m;
}

/// Dense fallback packaged like the iterative result.
inline Spectrum dense_ground_state(const SparseHamiltonian& h, std::size_t k,
                                   std::size_t dense_limit = kDefaultDenseLimit) {
  detail::check_request(h.dim(), k);
  const auto ds = dense_eig(to_dense(h, dense_limit), dense_limit);
  const auto op = as_operator(h);
  Spectrum s;
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::VectorXd v = ds.eigenvectors.col(static_cast<Eigen::Index>(i));
    detail::fix_sign(v);
    std::vector<double> vec(v.data(), v.data() + v.size());
    s.eigenvalues.push_back(ds.eigenvalues[static_cast<Eigen::Index>(i)]);
    s.residuals.push_back(residual(op, vec, s.eigenvalues.back()));
    s.vectors.push_back(std::move(vec));
  }
  detail::finalize(s);
  return s;
}

}  // namespace polariton
