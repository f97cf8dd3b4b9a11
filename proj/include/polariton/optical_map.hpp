#pragma once

// Optical control parameters -> effective two-species Bose-Hubbard parameters.
//
// All detunings and the Rabi frequency are stored in units of the atomic decay
// rate; `gamma` converts them to absolute rates. The bare waveguide velocity and
// the group velocity are fixed to 1, so absolute t, U, V are in arbitrary units
// and only their ratios carry physical meaning.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "polariton/errors.hpp"

namespace polariton {

struct OpticalParams {
  double gamma = 1.0;        // atomic decay rate (reference unit)
  double eta = 0.2;          // cooperativity Gamma_1D / Gamma
  double delta2 = -5.0;      // one-photon detuning Delta_2
  double delta3 = -0.01;     // two-photon detuning Delta_3
  double delta4 = 20.0;      // one-photon detuning Delta_4
  double delta_q = 40.0;     // quantum-pulse detuning delta_2^a
  double omega = 3.0;        // classical Rabi frequency
  double n_atom = 1.0e6;     // atomic linear density n [1/m]
  double n_mod = 1.0e5;      // density modulation amplitude n_1 [1/m]
  double n_sites = 1.0e2;    // linear density of lattice sites n_s [1/m]
  double delta_omega = 0.0;  // carrier offset between quantum and classical fields

  bool operator==(const OpticalParams&) const = default;
};

struct MapOptions {
  // Apply the Lambda/Xi dressing factors to chi, chi12 and V1. Off by default:
  // the lattice model is defined in the Lambda = Xi = 1 limit.
  bool lambda_xi_corrections = false;
};

struct HubbardParams {
  double t_hop = 0.0;
  double u_intra = 0.0;
  double v_inter = 0.0;

  double t_over_u = 0.0;
  double v_over_u = 0.0;
  double v1_over_er = 0.0;

  double m = 0.0;              // effective polariton mass
  double e_r = 0.0;            // recoil energy
  double v1 = 0.0;             // lattice depth
  double v0 = 0.0;             // constant potential offset
  double chi = 0.0;            // intra-species nonlinearity
  double chi12 = 0.0;          // inter-species nonlinearity
  double lambda_factor = 1.0;  // Omega^2 / (Omega^2 - Delta3 Delta2 / 2)
  double xi_factor = 1.0;      // (Delta4 - Delta3/2) / (Delta4 - Delta3)
  double v_group = 1.0;

  // True when the dressing factors were actually applied.
  bool corrected = false;
};

struct RegimeCheck {
  std::string name;
  bool passed = false;
  double ratio = 0.0;
};

struct RegimeReport {
  std::vector<RegimeCheck> checks;
  bool valid = false;

  const RegimeCheck* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

namespace detail {

inline constexpr double kPoleEps = 1e-12;
inline constexpr double kUnityEps = 1e-6;

inline void check_interspecies_pole(double delta4, double delta_q) {
  if (std::abs(delta4 * delta4 - delta_q * delta_q) < kPoleEps) throw SingularInterspecies();
}

inline double lambda_factor(const OpticalParams& p) {
  const double om2 = p.omega * p.omega;
  const double denom = om2 - p.delta3 * p.delta2 / 2.0;
  if (std::abs(denom) < kPoleEps) throw LambdaPole();
  return om2 / denom;
}

inline double xi_factor(const OpticalParams& p) {
  return (p.delta4 - p.delta3 / 2.0) / (p.delta4 - p.delta3);
}

}  // namespace detail

/// V/U = Delta4^2 / (Delta4^2 - delta_q^2). Negative iff 0 < |Delta4| < |delta_q|.
inline double ratio_v_over_u(double delta4, double delta_q) {
  detail::check_interspecies_pole(delta4, delta_q);
  const double d4sq = delta4 * delta4;
  return d4sq / (d4sq - delta_q * delta_q);
}

/// Step-by-step evaluation of the lattice parameters from the optical knobs.
inline HubbardParams derive_hubbard(const OpticalParams& p, const MapOptions& opts = {}) {
  if (!(p.omega > 0.0)) throw InvalidLattice("InvalidLattice: omega must be positive");
  if (p.delta2 == 0.0) throw InvalidLattice("InvalidLattice: delta2 must be nonzero");
  detail::check_interspecies_pole(p.delta4, p.delta_q);

  HubbardParams h;
  h.lambda_factor = detail::lambda_factor(p);
  h.xi_factor = detail::xi_factor(p);

  const double g = p.gamma;
  const double gamma_1d = p.eta * g;
  const double d2 = p.delta2 * g;
  const double d3 = p.delta3 * g;
  const double d4 = p.delta4 * g;
  const double dq = p.delta_q * g;
  const double om2 = (p.omega * g) * (p.omega * g);
  const double dw = p.delta_omega * g;
  const double nu = 1.0;
  const double vg = h.v_group;

  const bool dressed =
      opts.lambda_xi_corrections && (std::abs(h.lambda_factor - 1.0) >= detail::kUnityEps ||
                                     std::abs(h.xi_factor - 1.0) >= detail::kUnityEps);
  h.corrected = dressed;
  const double lam = dressed ? h.lambda_factor : 1.0;
  const double xi = dressed ? h.xi_factor : 1.0;
  if (dressed && !std::isfinite(xi)) throw InvalidLattice("InvalidLattice: Xi factor diverges");

  h.m = -dw / (2.0 * nu * vg) - gamma_1d * p.n_atom / (4.0 * d2 * vg);
  h.chi = lam * lam * xi * gamma_1d * vg / (2.0 * d4);
  h.chi12 = lam * lam * gamma_1d * vg * d4 / (d4 * d4 - dq * dq);
  h.v1 = -lam * gamma_1d * d3 * vg * p.n_mod / (4.0 * om2);
  h.v0 = dw * vg / nu - lam * gamma_1d * d3 * vg * p.n_atom / (4.0 * om2);

  if (!(h.v1 > 0.0)) throw InvalidLattice("InvalidLattice: lattice depth V1 <= 0");
  if (!(h.m > 0.0)) throw InvalidLattice("InvalidLattice: effective mass m <= 0");

  constexpr double pi = std::numbers::pi;
  h.e_r = pi * pi * p.n_sites * p.n_sites / (2.0 * h.m);
  h.v1_over_er = h.v1 / h.e_r;

  const double depth_quarter = std::pow(h.v1_over_er, 0.25);
  h.t_hop = 4.0 * std::pow(h.v1, 0.75) * std::pow(h.e_r, 0.25) *
            std::exp(-2.0 * std::sqrt(h.v1_over_er)) / std::sqrt(pi);
  h.u_intra = std::sqrt(2.0 * pi) * h.chi * p.n_sites * depth_quarter;
  h.v_inter = std::sqrt(2.0 * pi) * h.chi12 * p.n_sites * depth_quarter / 2.0;

  h.t_over_u = h.t_hop / h.u_intra;
  h.v_over_u = h.v_inter / h.u_intra;
  return h;
}

/// Hopping-to-repulsion ratio from the single closed form
/// t/U = 4 sqrt(V1 E_R) exp(-2 sqrt(V1/E_R)) / (sqrt(2) pi chi n_s).
inline double ratio_t_over_u(const OpticalParams& p, const MapOptions& opts = {}) {
  const HubbardParams checked = derive_hubbard(p, opts);
  const double lam = checked.corrected ? checked.lambda_factor : 1.0;
  const double xi = checked.corrected ? checked.xi_factor : 1.0;

  constexpr double pi = std::numbers::pi;
  const double g = p.gamma;
  const double gamma_1d = p.eta * g;
  const double om = p.omega * g;
  const double mass =
      -p.delta_omega * g / 2.0 - gamma_1d * p.n_atom / (4.0 * p.delta2 * g);
  const double depth = -lam * gamma_1d * p.delta3 * g * p.n_mod / (4.0 * om * om);
  const double recoil = pi * pi * p.n_sites * p.n_sites / (2.0 * mass);
  const double chi1 = lam * lam * xi * gamma_1d / (2.0 * p.delta4 * g);
  return 4.0 * std::sqrt(depth * recoil) * std::exp(-2.0 * std::sqrt(depth / recoil)) /
         (std::sqrt(2.0) * pi * chi1 * p.n_sites);
}

/// Checks whether the parameters sit in the window where the lattice mapping
/// holds. `strictness` is the factor used to read "much smaller than".
inline RegimeReport validate_regime(const OpticalParams& p, double strictness = 10.0) {
  RegimeReport r;
  const double abs_d3 = std::abs(p.delta3);
  const double stark = p.delta2 != 0.0 ? p.omega * p.omega / std::abs(p.delta2)
                                       : std::numeric_limits<double>::infinity();

  r.checks.push_back({"delta4_large", p.delta4 >= 20.0, p.delta4 / 20.0});
  r.checks.push_back({"omega_small", p.omega <= 3.0, p.omega / 3.0});
  r.checks.push_back(
      {"delta3_small_vs_stark", abs_d3 * strictness <= stark, abs_d3 * strictness / stark});
  r.checks.push_back({"delta3_small_vs_delta4", abs_d3 * strictness <= p.delta4,
                      abs_d3 * strictness / p.delta4});
  r.checks.push_back({"bcs_signs",
                      p.delta2 < 0.0 && p.delta4 > 0.0 && p.delta4 < p.delta_q,
                      p.delta_q != 0.0 ? p.delta4 / p.delta_q
                                       : std::numeric_limits<double>::infinity()});

  r.valid = true;
  for (const auto& c : r.checks) r.valid = r.valid && c.passed;
  return r;
}

}  // namespace polariton
