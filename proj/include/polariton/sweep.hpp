#pragma once

// Single-point runs and parameter sweeps behind the command-line tool.
// Sweep points are independent; they are evaluated on a worker pool and the
// output is always written in grid order.

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/eigensolver.hpp"
#include "polariton/hamiltonian.hpp"
#include "polariton/observables.hpp"
#include "polariton/optical_map.hpp"

namespace polariton {

/// Runs f(0..n-1) on `threads` workers. Each index is visited exactly once.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < std::min<std::size_t>(threads, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
}

// ---------------------------------------------------------------------------
// Optical map

inline nlohmann::json map_report(const OpticalParams& p, const MapOptions& opts, double strict) {
  const HubbardParams h = derive_hubbard(p, opts);
  const RegimeReport r = validate_regime(p, strict);
  nlohmann::json j;
  j["t_over_u"] = h.t_over_u;
  j["v_over_u"] = h.v_over_u;
  j["v1_over_er"] = h.v1_over_er;
  j["t_hop"] = h.t_hop;
  j["u_intra"] = h.u_intra;
  j["v_inter"] = h.v_inter;
  j["intermediates"] = {{"m", h.m},     {"e_r", h.e_r},   {"v1", h.v1},
                        {"v0", h.v0},   {"chi", h.chi},   {"chi12", h.chi12},
                        {"lambda", h.lambda_factor},      {"xi", h.xi_factor},
                        {"v_group", h.v_group},           {"corrected", h.corrected}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"ratio", c.ratio}});
  }
  j["valid"] = r.valid;
  return j;
}

struct OpticalRow {
  double delta_q = 0.0;
  double delta4 = 0.0;
  std::optional<double> v_over_u;
  std::optional<double> t_over_u;
  bool valid = false;
  std::string error;
};

inline std::vector<OpticalRow> sweep_optical(const OpticalJob& job) {
  const auto dq = job.delta_q.points();
  const auto d4 = job.delta4.points();
  std::vector<OpticalRow> rows(dq.size() * d4.size());
  parallel_for(rows.size(), job.threads, [&](std::size_t idx) {
    OpticalRow& row = rows[idx];
    OpticalParams p = job.base;
    p.delta_q = dq[idx / d4.size()];
    p.delta4 = d4[idx % d4.size()];
    row.delta_q = p.delta_q;
    row.delta4 = p.delta4;
    try {
      const HubbardParams h = derive_hubbard(p, job.map);
      row.v_over_u = h.v_over_u;
      row.t_over_u = h.t_over_u;
      row.valid = validate_regime(p, job.strictness).valid;
    } catch (const NumericalError& e) {
      row.error = e.what();
    }
  });
  return rows;
}

namespace detail {

inline std::string csv_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

inline std::string csv_text(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ';';
  }
  return s;
}

}  // namespace detail

inline std::string optical_csv(const std::vector<OpticalRow>& rows) {
  std::string out = "delta_q,delta4,v_over_u,t_over_u,valid,error\n";
  for (const auto& r : rows) {
    out += format_number(r.delta_q) + "," + format_number(r.delta4) + "," +
           detail::csv_field(r.v_over_u) + "," + detail::csv_field(r.t_over_u) + "," +
           (r.valid ? "true" : "false") + "," + detail::csv_text(r.error) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lattice model

struct ModelPoint {
  double t_over_u = 0.0;
  double v_over_u = 0.0;  // signed V/U
  std::vector<double> eigenvalues;
  double e0 = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  bool degenerate = false;
  std::size_t iterations = 0;
  std::string method;  // "lanczos", "diagonal" or "dense"
  CorrelationProfile profile;
  std::string error;

  bool ok() const { return error.empty(); }
};

inline ProductBasis model_basis(const ModelJob& job) {
  return ProductBasis(job.sites, job.n_up, job.n_down, job.cap);
}

inline ModelSpec model_spec(const ModelJob& job, double t_over_u, double v_over_u) {
  ModelSpec spec;
  spec.t_up = spec.t_down = t_over_u;
  spec.u_up = spec.u_down = 1.0;
  spec.v_inter = v_over_u;
  spec.boundary = job.boundary;
  return spec;
}

/// Ground state and correlation profile at one (t/U, V/U) point, with U = 1.
inline ModelPoint solve_model_point(const ModelJob& job, const ProductBasis& basis,
                                    double t_over_u, double v_over_u) {
  ModelPoint pt;
  pt.t_over_u = t_over_u;
  pt.v_over_u = v_over_u;
  try {
    const SparseHamiltonian h = build(model_spec(job, t_over_u, v_over_u), basis);
    SolverOptions opts = job.solver;
    opts.k = std::min<std::size_t>(opts.k, h.dim());
    Spectrum s;
    if (h.is_diagonal()) {
      s = diagonal_ground_state(h.diagonal(), opts.k);
      pt.method = "diagonal";
    } else {
      try {
        s = ground_state(as_operator(h), h.dim(), opts);
        pt.method = "lanczos";
      } catch (const NotConverged&) {
        if (h.dim() > job.dense_limit) throw;
        s = dense_ground_state(h, opts.k, job.dense_limit);
        pt.method = "dense";
      }
    }
    pt.eigenvalues = s.eigenvalues;
    pt.e0 = s.eigenvalues.front();
    pt.gap = s.degeneracy_gap;
    pt.residual = s.residual;
    pt.degenerate = s.degenerate;
    pt.iterations = s.iterations;
    pt.profile = correlation_profile(s, basis, job.boundary);
  } catch (const NumericalError& e) {
    pt.error = e.what();
  }
  return pt;
}

/// All (t/U, |V|/U) points, t/U outermost, V = -|V|/U.
inline std::vector<ModelPoint> sweep_model(const ModelJob& job) {
  const ProductBasis basis = model_basis(job);
  const std::size_t nv = job.abs_v_over_u.size();
  std::vector<ModelPoint> points(job.t_over_u.size() * nv);
  parallel_for(points.size(), job.threads, [&](std::size_t idx) {
    points[idx] = solve_model_point(job, basis, job.t_over_u[idx / nv], -job.abs_v_over_u[idx % nv]);
  });
  return points;
}

namespace detail {

// Index within [first, first+n) of the grid point closest to `target`
// (the later one on ties); std::nullopt if none succeeded.
inline std::optional<std::size_t> closest_point(const std::vector<ModelPoint>& pts, std::size_t first,
                                                std::size_t n, double target) {
  std::optional<std::size_t> best;
  for (std::size_t i = first; i < first + n; ++i) {
    if (!pts[i].ok()) continue;
    const double d = std::abs(std::abs(pts[i].v_over_u) - target);
    if (!best || d <= std::abs(std::abs(pts[*best].v_over_u) - target)) best = i;
  }
  return best;
}

inline std::optional<std::size_t> smallest_nonzero(const std::vector<ModelPoint>& pts,
                                                   std::size_t first, std::size_t n) {
  std::optional<std::size_t> best;
  for (std::size_t i = first; i < first + n; ++i) {
    if (!pts[i].ok() || pts[i].v_over_u == 0.0) continue;
    if (!best || std::abs(pts[i].v_over_u) < std::abs(pts[*best].v_over_u)) best = i;
  }
  return best;
}

inline std::optional<double> ratio(double value, std::optional<double> ref) {
  if (!ref || *ref == 0.0) return std::nullopt;
  return value / *ref;
}

}  // namespace detail

/// Reference |V|/U for the on-site cross-correlation normalization.
inline constexpr double kCrossReferenceAbsV = 1.5;

inline std::string model_csv(const ModelJob& job, const std::vector<ModelPoint>& points) {
  std::string out =
      "t_over_u,v_over_u,e0,gap,degenerate,g2_cross_0,g2_cross_1,g2_minus_0,g2_minus_1,"
      "g2_cross_0_norm,g2_cross_1_norm,g2_minus_0_norm,g2_minus_1_norm,error\n";
  const std::size_t nv = job.abs_v_over_u.size();
  const auto at = [](const std::vector<double>& v, std::size_t l) {
    return l < v.size() ? std::optional<double>(v[l]) : std::nullopt;
  };
  for (std::size_t first = 0; first < points.size(); first += nv) {
    // g2_cross curves share the l = 0 value at |V|/U = 1.5 as reference;
    // g2_minus curves share the l = 0 value at the smallest nonzero |V|/U.
    std::optional<double> cross_ref, minus_ref;
    if (const auto i = detail::closest_point(points, first, nv, kCrossReferenceAbsV)) {
      cross_ref = points[*i].profile.g2_cross.at(0);
    }
    if (const auto i = detail::smallest_nonzero(points, first, nv)) {
      minus_ref = points[*i].profile.g2_minus.at(0);
    }
    for (std::size_t i = first; i < first + nv; ++i) {
      const ModelPoint& p = points[i];
      out += format_number(p.t_over_u) + "," + format_number(p.v_over_u) + ",";
      if (!p.ok()) {
        out += ",,,,,,,,,,," + detail::csv_text(p.error) + "\n";
        continue;
      }
      const auto& gc = p.profile.g2_cross;
      const auto& gm = p.profile.g2_minus;
      const auto g1c = at(gc, 1);
      const auto g1m = at(gm, 1);
      out += format_number(p.e0) + "," +
             (std::isfinite(p.gap) ? format_number(p.gap) : std::string()) + "," +
             (p.degenerate ? "true" : "false") + "," + format_number(gc[0]) + "," +
             detail::csv_field(g1c) + "," + format_number(gm[0]) + "," + detail::csv_field(g1m) +
             "," + detail::csv_field(detail::ratio(gc[0], cross_ref)) + "," +
             detail::csv_field(g1c ? detail::ratio(*g1c, cross_ref) : std::nullopt) + "," +
             detail::csv_field(detail::ratio(gm[0], minus_ref)) + "," +
             detail::csv_field(g1m ? detail::ratio(*g1m, minus_ref) : std::nullopt) + ",\n";
    }
  }
  return out;
}

inline std::string profile_csv(const std::vector<ModelPoint>& points) {
  std::string out = "t_over_u,v_over_u,l,g2_cross_l,error\n";
  for (const auto& p : points) {
    if (!p.ok()) {
      out += format_number(p.t_over_u) + "," + format_number(p.v_over_u) + ",,," +
             detail::csv_text(p.error) + "\n";
      continue;
    }
    for (std::size_t l = 0; l < p.profile.g2_cross.size(); ++l) {
      out += format_number(p.t_over_u) + "," + format_number(p.v_over_u) + "," +
             std::to_string(l) + "," + format_number(p.profile.g2_cross[l]) + ",\n";
    }
  }
  return out;
}

inline nlohmann::json ground_report(const ModelJob& job, const ModelPoint& p) {
  nlohmann::json j;
  j["sites"] = job.sites;
  j["n_up"] = job.n_up;
  j["n_down"] = job.n_down;
  j["boundary"] = to_string(job.boundary);
  j["t_over_u"] = p.t_over_u;
  j["v_over_u"] = p.v_over_u;
  if (!p.ok()) {
    j["error"] = p.error;
    return j;
  }
  j["method"] = p.method;
  j["eigenvalues"] = p.eigenvalues;
  j["e0"] = p.e0;
  j["gap"] = std::isfinite(p.gap) ? nlohmann::json(p.gap) : nlohmann::json(nullptr);
  j["degenerate"] = p.degenerate;
  j["averaged_over"] = p.profile.averaged_over;
  j["residual"] = p.residual;
  j["iterations"] = p.iterations;
  j["g2_cross"] = p.profile.g2_cross;
  j["g2_minus"] = p.profile.g2_minus;
  j["density_up"] = p.profile.density_up;
  j["density_down"] = p.profile.density_down;
  return j;
}

}  // namespace polariton
