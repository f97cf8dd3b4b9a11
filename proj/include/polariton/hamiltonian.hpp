#pragma once

// Two-species Bose-Hubbard Hamiltonian
//
//   H = -sum_<ij>,s t_s a+_is a_js + sum_i,s U_s/2 n_is^2 + V sum_i n_iu n_id
//
// over the product basis |up> (x) |down>, stored in CSR form.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polariton/errors.hpp"
#include "polariton/fock_basis.hpp"

namespace polariton {

enum class Boundary { open, periodic };

inline const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

enum class OnsiteConvention {
  squared,   // U/2 n^2
  pairwise,  // U/2 n (n - 1)
};

struct ModelSpec {
  double t_up = 1.0;
  double t_down = 1.0;
  double u_up = 1.0;
  double u_down = 1.0;
  double v_inter = 0.0;
  Boundary boundary = Boundary::periodic;
  OnsiteConvention onsite = OnsiteConvention::squared;
};

/// Up and down bases on the same chain. Product index = i_up * dim_down + i_down.
class ProductBasis {
 public:
  ProductBasis(FockBasis up, FockBasis down) : up_(std::move(up)), down_(std::move(down)) {
    if (up_.sites() != down_.sites()) {
      throw InfeasibleBasis("InfeasibleBasis: species bases have different numbers of sites");
    }
  }

  ProductBasis(int sites, int n_up, int n_down, SiteCap cap = kUnbounded)
      : ProductBasis(FockBasis(sites, n_up, cap), FockBasis(sites, n_down, cap)) {}

  const FockBasis& up() const { return up_; }
  const FockBasis& down() const { return down_; }
  int sites() const { return up_.sites(); }
  std::size_t size() const { return up_.size() * down_.size(); }

  std::size_t index(std::size_t i_up, std::size_t i_down) const {
    return i_up * down_.size() + i_down;
  }
  std::pair<std::size_t, std::size_t> split(std::size_t index) const {
    return {index / down_.size(), index % down_.size()};
  }

 private:
  FockBasis up_;
  FockBasis down_;
};

/// Nearest-neighbour bonds (i, i+1). Periodic chains of length <= 2 have no
/// extra wrap bond, so they coincide with open chains.
inline std::vector<std::pair<int, int>> nearest_neighbour_bonds(int sites, Boundary boundary) {
  std::vector<std::pair<int, int>> bonds;
  for (int i = 0; i + 1 < sites; ++i) bonds.emplace_back(i, i + 1);
  if (boundary == Boundary::periodic && sites > 2) bonds.emplace_back(sites - 1, 0);
  return bonds;
}

inline double onsite_term(double u, Occupation n, OnsiteConvention conv) {
  const double nn = static_cast<double>(n);
  return conv == OnsiteConvention::squared ? 0.5 * u * nn * nn : 0.5 * u * nn * (nn - 1.0);
}

inline double diagonal_energy(std::span<const Occupation> occ_up,
                              std::span<const Occupation> occ_down, const ModelSpec& spec) {
  double e = 0.0;
  for (std::size_t i = 0; i < occ_up.size(); ++i) {
    e += onsite_term(spec.u_up, occ_up[i], spec.onsite) +
         onsite_term(spec.u_down, occ_down[i], spec.onsite) +
         spec.v_inter * static_cast<double>(occ_up[i]) * static_cast<double>(occ_down[i]);
  }
  return e;
}

struct HopEntry {
  std::size_t target;
  double amplitude;
};

/// Single-species hopping table: hops[k] lists every state reachable from
/// state k by moving one boson across a bond, with amplitude
/// -t sqrt(n_src (n_dst + 1)).
inline std::vector<std::vector<HopEntry>> hopping_table(const FockBasis& basis, double t,
                                                        Boundary boundary) {
  std::vector<std::vector<HopEntry>> hops(basis.size());
  if (t == 0.0) return hops;
  const auto bonds = nearest_neighbour_bonds(basis.sites(), boundary);
  const int cap = basis.effective_cap();
  std::vector<Occupation> work(basis.sites());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto occ = basis.state(k);
    for (const auto& [a, b] : bonds) {
      for (const auto& [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
        if (occ[src] == 0 || occ[dst] >= cap) continue;
        std::copy(occ.begin(), occ.end(), work.begin());
        const long long factor = static_cast<long long>(occ[src]) * (occ[dst] + 1);
        --work[src];
        ++work[dst];
        hops[k].push_back({basis.rank_unchecked(work), -t * std::sqrt(static_cast<double>(factor))});
      }
    }
  }
  return hops;
}

struct BuildOptions {
  std::size_t max_dim = 5'000'000;
};

/// Real symmetric sparse matrix in CSR layout, columns sorted within each row.
class SparseHamiltonian {
 public:
  SparseHamiltonian() = default;
  SparseHamiltonian(std::size_t dim, std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> cols,
                    std::vector<double> values)
      : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
    diag_.assign(dim_, 0.0);
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        if (cols_[p] == r) {
          diag_[r] = values_[p];
        } else {
          ++offdiag_;
        }
      }
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return values_.size(); }
  bool is_diagonal() const { return offdiag_ == 0; }
  const std::vector<double>& diagonal() const { return diag_; }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }

  /// Matrix element lookup by binary search within the row.
  double at(std::size_t row, std::size_t col) const {
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
    return (it != last && *it == col) ? values_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
  }

  /// y = H x. Each row is summed in column order, so the result does not depend
  /// on `threads`.
  void apply(std::span<const double> x, std::span<double> y, unsigned threads = 1) const {
    if (x.size() != dim_) throw DimensionMismatch(dim_, x.size());
    if (y.size() != dim_) throw DimensionMismatch(dim_, y.size());
    if (threads <= 1 || dim_ < 4096) {
      apply_rows(x, y, 0, dim_);
      return;
    }
    std::vector<std::jthread> pool;
    const std::size_t block = (dim_ + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t lo = std::min(dim_, w * block);
      const std::size_t hi = std::min(dim_, lo + block);
      if (lo < hi) pool.emplace_back([=, this] { apply_rows(x, y, lo, hi); });
    }
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> y(dim_);
    apply(x, y);
    return y;
  }

  /// Coordinate dump: one "row col value" line per stored entry, sorted by
  /// (row, col), values with 17 significant digits.
  void write_coordinate(std::ostream& os) const {
    char buf[64];
    for (std::size_t r = 0; r < dim_; ++r) {
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        std::snprintf(buf, sizeof buf, "%.17g", values_[p]);
        os << r << ' ' << cols_[p] << ' ' << buf << '\n';
      }
    }
  }

 private:
  void apply_rows(std::span<const double> x, std::span<double> y, std::size_t lo,
                  std::size_t hi) const {
    for (std::size_t r = lo; r < hi; ++r) {
      double acc = 0.0;
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) acc += values_[p] * x[cols_[p]];
      y[r] = acc;
    }
  }

  std::size_t dim_ = 0;
  std::size_t offdiag_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> values_;
  std::vector<double> diag_;
};

struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  double value;
};

/// CSR matrix from coordinate entries; duplicates are summed. The caller is
/// responsible for supplying both (r, c) and (c, r).
inline SparseHamiltonian from_entries(std::size_t dim, std::vector<MatrixEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(dim + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  for (std::size_t p = 0; p < entries.size(); ++p) {
    const auto& e = entries[p];
    if (e.row >= dim || e.col >= dim) throw DimensionMismatch(dim, std::max(e.row, e.col) + 1);
    if (p > 0 && e.row == entries[p - 1].row && e.col == entries[p - 1].col) {
      values.back() += e.value;
      continue;
    }
    cols.push_back(static_cast<std::uint32_t>(e.col));
    values.push_back(e.value);
    ++row_ptr[e.row + 1];
  }
  for (std::size_t r = 0; r < dim; ++r) row_ptr[r + 1] += row_ptr[r];
  return SparseHamiltonian(dim, std::move(row_ptr), std::move(cols), std::move(values));
}

inline SparseHamiltonian build(const ModelSpec& spec, const ProductBasis& basis,
                               const BuildOptions& opts = {}) {
  const std::size_t dim = basis.size();
  if (dim > opts.max_dim) {
    throw DimensionOverflow("DimensionOverflow: dimension " + std::to_string(dim) + " exceeds limit " +
                            std::to_string(opts.max_dim));
  }
  const auto hops_up = hopping_table(basis.up(), spec.t_up, spec.boundary);
  const auto hops_down = hopping_table(basis.down(), spec.t_down, spec.boundary);
  const std::size_t dim_down = basis.down().size();

  std::vector<std::size_t> row_ptr{0};
  row_ptr.reserve(dim + 1);
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  std::vector<std::pair<std::size_t, double>> row;

  for (std::size_t iu = 0; iu < basis.up().size(); ++iu) {
    for (std::size_t id = 0; id < dim_down; ++id) {
      const std::size_t r = basis.index(iu, id);
      row.clear();
      row.emplace_back(r, diagonal_energy(basis.up().state(iu), basis.down().state(id), spec));
      for (const auto& h : hops_up[iu]) row.emplace_back(basis.index(h.target, id), h.amplitude);
      for (const auto& h : hops_down[id]) row.emplace_back(basis.index(iu, h.target), h.amplitude);
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t p = 0; p < row.size(); ++p) {
        if (p > 0 && row[p].first == row[p - 1].first) {
          values.back() += row[p].second;
          continue;
        }
        cols.push_back(static_cast<std::uint32_t>(row[p].first));
        values.push_back(row[p].second);
      }
      row_ptr.push_back(cols.size());
    }
  }
  return SparseHamiltonian(dim, std::move(row_ptr), std::move(cols), std::move(values));
}

}  // namespace polariton
