#pragma once

// Occupation-number basis for N bosons of one species on L sites.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polariton/errors.hpp"

namespace polariton {

using Occupation = int;

// Per-site occupancy cap; std::nullopt means unbounded.
using SiteCap = std::optional<int>;
inline constexpr SiteCap kUnbounded = std::nullopt;

namespace detail {

inline int effective_cap(int particles, SiteCap cap) {
  return cap ? std::min(*cap, std::max(particles, 1)) : std::max(particles, 1);
}

inline void check_basis_args(int sites, int particles, SiteCap cap) {
  if (sites < 1) throw InfeasibleBasis("InfeasibleBasis: need at least one site");
  if (particles < 0) throw InfeasibleBasis("InfeasibleBasis: negative particle number");
  if (cap && *cap < 1) throw InfeasibleBasis("InfeasibleBasis: occupancy cap must be >= 1");
  if (cap && static_cast<long long>(*cap) * sites < particles) {
    throw InfeasibleBasis("InfeasibleBasis: cap * L = " + std::to_string(*cap * sites) +
                          " < N = " + std::to_string(particles));
  }
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // exact at every step: r * (n-k+i) is divisible by i
    r = r / std::gcd(r, i) * ((n - k + i) / (i / std::gcd(r, i)));
  }
  return r;
}

// counts[s][n]: number of ways to put n bosons on s sites with at most `cap`
// per site.
inline std::vector<std::vector<std::uint64_t>> composition_counts(int sites, int particles,
                                                                  int cap) {
  std::vector<std::vector<std::uint64_t>> counts(
      sites + 1, std::vector<std::uint64_t>(particles + 1, 0));
  counts[0][0] = 1;
  for (int s = 1; s <= sites; ++s) {
    for (int n = 0; n <= particles; ++n) {
      std::uint64_t c = 0;
      for (int v = 0; v <= std::min(cap, n); ++v) c += counts[s - 1][n - v];
      counts[s][n] = c;
    }
  }
  return counts;
}

}  // namespace detail

/// Number of basis states, by inclusion-exclusion over sites exceeding the cap.
inline std::uint64_t dimension(int sites, int particles, SiteCap cap = kUnbounded) {
  detail::check_basis_args(sites, particles, cap);
  const auto L = static_cast<std::uint64_t>(sites);
  const auto N = static_cast<std::uint64_t>(particles);
  if (!cap || *cap >= particles) return detail::binomial(N + L - 1, N);

  const auto step = static_cast<std::uint64_t>(*cap) + 1;
  std::int64_t total = 0;
  for (std::uint64_t k = 0; k <= L && k * step <= N; ++k) {
    const auto term =
        static_cast<std::int64_t>(detail::binomial(L, k) * detail::binomial(N - k * step + L - 1, L - 1));
    total += (k % 2 == 0) ? term : -term;
  }
  return static_cast<std::uint64_t>(total);
}

/// Immutable basis; states are ordered lexicographically descending, so the
/// first state has every particle on site 0.
class FockBasis {
 public:
  FockBasis(int sites, int particles, SiteCap cap = kUnbounded)
      : sites_(sites), particles_(particles), cap_(cap) {
    detail::check_basis_args(sites, particles, cap);
    eff_cap_ = detail::effective_cap(particles, cap);
    counts_ = detail::composition_counts(sites, particles, eff_cap_);
    states_.reserve(counts_[sites][particles] * static_cast<std::size_t>(sites));
    std::vector<Occupation> occ(sites, 0);
    enumerate(0, particles, occ);
  }

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  SiteCap cap() const { return cap_; }
  int effective_cap() const { return eff_cap_; }
  std::size_t size() const { return states_.size() / static_cast<std::size_t>(sites_); }

  std::span<const Occupation> state(std::size_t k) const {
    return {states_.data() + k * static_cast<std::size_t>(sites_),
            static_cast<std::size_t>(sites_)};
  }

  bool contains(std::span<const Occupation> occ) const {
    if (occ.size() != static_cast<std::size_t>(sites_)) return false;
    long long sum = 0;
    for (const auto n : occ) {
      if (n < 0 || n > eff_cap_) return false;
      sum += n;
    }
    return sum == particles_;
  }

  /// Rank of `occ` in the enumeration order, O(L * cap).
  std::size_t index_of(std::span<const Occupation> occ) const {
    if (!contains(occ)) throw NotInBasis("NotInBasis: occupation vector violates size, sum or cap");
    return rank_unchecked(occ);
  }

  std::size_t rank_unchecked(std::span<const Occupation> occ) const {
    std::uint64_t rank = 0;
    int remaining = particles_;
    for (int i = 0; i < sites_; ++i) {
      const int rest_sites = sites_ - i - 1;
      for (int v = std::min(eff_cap_, remaining); v > occ[i]; --v) {
        rank += counts_[rest_sites][remaining - v];
      }
      remaining -= occ[i];
    }
    return static_cast<std::size_t>(rank);
  }

 private:
  void enumerate(int site, int remaining, std::vector<Occupation>& occ) {
    if (site == sites_ - 1) {
      occ[site] = remaining;
      states_.insert(states_.end(), occ.begin(), occ.end());
      return;
    }
    const long long room = static_cast<long long>(eff_cap_) * (sites_ - site - 1);
    for (int v = std::min(eff_cap_, remaining); v >= 0; --v) {
      if (remaining - v > room) break;
      occ[site] = v;
      enumerate(site + 1, remaining - v, occ);
    }
  }

  int sites_;
  int particles_;
  SiteCap cap_;
  int eff_cap_ = 1;
  std::vector<std::vector<std::uint64_t>> counts_;
  std::vector<Occupation> states_;
};

}  // namespace polariton
