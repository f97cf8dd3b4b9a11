#pragma once

// Density-density correlations of a two-species state. Every observable here is
// diagonal in the occupation basis, so it only needs |psi_k|^2.

#include <cstddef>
#include <span>
#include <vector>

#include "polariton/eigensolver.hpp"
#include "polariton/errors.hpp"
#include "polariton/hamiltonian.hpp"

namespace polariton {

struct CorrelationProfile {
  std::vector<double> g2_cross;  // sum_i <n_i,up n_i+l,down>, l = 0..L-1
  std::vector<double> g2_minus;  // sum_i <(n_iu - n_id)(n_i+l,u - n_i+l,d)>
  std::vector<double> density_up;
  std::vector<double> density_down;
  Boundary boundary = Boundary::periodic;
  bool degenerate = false;
  std::size_t averaged_over = 1;  // number of solver vectors averaged
};

namespace detail {

// Visits every product state with its weight |psi_k|^2.
template <class F>
void for_each_weighted(std::span<const double> psi, const ProductBasis& basis, F&& f) {
  if (psi.size() != basis.size()) throw DimensionMismatch(basis.size(), psi.size());
  const std::size_t nd = basis.down().size();
  for (std::size_t iu = 0; iu < basis.up().size(); ++iu) {
    const auto up = basis.up().state(iu);
    for (std::size_t id = 0; id < nd; ++id) {
      const double amp = psi[iu * nd + id];
      const double w = amp * amp;
      if (w == 0.0) continue;
      f(w, up, basis.down().state(id));
    }
  }
}

// Pair (i, i+l) exists: always for periodic (wrapped), only i+l < L for open.
inline bool pair_index(int i, int l, int sites, Boundary b, int& j) {
  j = i + l;
  if (j < sites) return true;
  if (b == Boundary::open) return false;
  j -= sites;
  return true;
}

}  // namespace detail

inline std::vector<double> g2_cross_profile(std::span<const double> psi, const ProductBasis& basis,
                                            Boundary boundary) {
  const int L = basis.sites();
  std::vector<double> g(static_cast<std::size_t>(L), 0.0);
  detail::for_each_weighted(psi, basis, [&](double w, auto up, auto down) {
    for (int l = 0; l < L; ++l) {
      double s = 0.0;
      for (int i = 0, j = 0; i < L; ++i) {
        if (detail::pair_index(i, l, L, boundary, j)) s += up[i] * down[j];
      }
      g[static_cast<std::size_t>(l)] += w * s;
    }
  });
  return g;
}

inline std::vector<double> g2_minus_profile(std::span<const double> psi, const ProductBasis& basis,
                                            Boundary boundary) {
  const int L = basis.sites();
  std::vector<double> g(static_cast<std::size_t>(L), 0.0);
  std::vector<double> diff(static_cast<std::size_t>(L));
  detail::for_each_weighted(psi, basis, [&](double w, auto up, auto down) {
    for (int i = 0; i < L; ++i) diff[i] = static_cast<double>(up[i] - down[i]);
    for (int l = 0; l < L; ++l) {
      double s = 0.0;
      for (int i = 0, j = 0; i < L; ++i) {
        if (detail::pair_index(i, l, L, boundary, j)) s += diff[i] * diff[j];
      }
      g[static_cast<std::size_t>(l)] += w * s;
    }
  });
  return g;
}

/// Per-site <n_i,up> and <n_i,down>.
inline std::pair<std::vector<double>, std::vector<double>> site_densities(
    std::span<const double> psi, const ProductBasis& basis) {
  const auto L = static_cast<std::size_t>(basis.sites());
  std::vector<double> nu(L, 0.0), nd(L, 0.0);
  detail::for_each_weighted(psi, basis, [&](double w, auto up, auto down) {
    for (std::size_t i = 0; i < L; ++i) {
      nu[i] += w * up[i];
      nd[i] += w * down[i];
    }
  });
  return {std::move(nu), std::move(nd)};
}

/// Profiles of the ground level. When the solver flags a degenerate ground
/// manifold the profiles are averaged over all of its returned vectors.
inline CorrelationProfile correlation_profile(const Spectrum& spectrum, const ProductBasis& basis,
                                              Boundary boundary) {
  CorrelationProfile prof;
  prof.boundary = boundary;
  prof.degenerate = spectrum.degenerate;
  const std::size_t count = spectrum.degenerate ? spectrum.degenerate_count : 1;
  prof.averaged_over = count;
  const auto L = static_cast<std::size_t>(basis.sites());
  prof.g2_cross.assign(L, 0.0);
  prof.g2_minus.assign(L, 0.0);
  prof.density_up.assign(L, 0.0);
  prof.density_down.assign(L, 0.0);
  for (std::size_t v = 0; v < count; ++v) {
    const auto& psi = spectrum.vectors[v];
    const auto gc = g2_cross_profile(psi, basis, boundary);
    const auto gm = g2_minus_profile(psi, basis, boundary);
    const auto [nu, nd] = site_densities(psi, basis);
    for (std::size_t i = 0; i < L; ++i) {
      prof.g2_cross[i] += gc[i] / static_cast<double>(count);
      prof.g2_minus[i] += gm[i] / static_cast<double>(count);
      prof.density_up[i] += nu[i] / static_cast<double>(count);
      prof.density_down[i] += nd[i] / static_cast<double>(count);
    }
  }
  return prof;
}

inline std::vector<double> normalize_curve(std::span<const double> values, double reference) {
  if (reference == 0.0) throw ZeroReference();
  std::vector<double> out(values.begin(), values.end());
  for (auto& v : out) v /= reference;
  return out;
}

}  // namespace polariton
