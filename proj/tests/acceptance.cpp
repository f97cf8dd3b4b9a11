// Acceptance run: one PASS/FAIL line per criterion A1..A11.
//
//   acceptance [--known-failure A8 ...]
//
// Exit status is nonzero if any criterion fails, except those listed with
// --known-failure (they still print FAIL).

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/sweep.hpp"

using namespace polariton;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> odometer(int L, int N, SiteCap cap) {
  std::vector<std::vector<int>> out;
  const int top = cap ? std::min(*cap, N) : N;
  std::vector<int> v(L, 0);
  while (true) {
    if (std::accumulate(v.begin(), v.end(), 0) == N) out.push_back(v);
    int i = L - 1;
    while (i >= 0 && v[i] == top) v[i--] = 0;
    if (i < 0) break;
    ++v[i];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Outcome a1() {
  const auto t0 = Clock::now();
  bool ok = dimension(8, 3) == 120 && ProductBasis(8, 3, 3).size() == 14400;
  for (int L = 1; L <= 6; ++L) {
    for (int N = 0; N <= 6; ++N) {
      for (SiteCap cap : {SiteCap{1}, SiteCap{2}, SiteCap{3}, kUnbounded}) {
        if (cap && *cap * L < N) continue;
        const auto ref = odometer(L, N, cap);
        FockBasis b(L, N, cap);
        ok = ok && dimension(L, N, cap) == ref.size() && b.size() == ref.size();
        for (std::size_t k = 0; ok && k < b.size(); ++k) {
          const auto s = b.state(k);
          ok = std::equal(s.begin(), s.end(), ref[k].begin()) && b.index_of(ref[k]) == k;
        }
      }
    }
  }
  const double dt = seconds_since(t0);
  return {ok && dt < 1.0, fmt("dim(8,3)=120, product 14400, brute-force L,N<=6 all caps; %.3f s", dt)};
}

Outcome a2() {
  double worst = 0.0;
  ProductBasis basis(2, 1, 1);
  for (const auto& [t, v] : {std::pair{1.0, 0.0}, std::pair{1.0, -1.0}, std::pair{0.5, -2.0}}) {
    ModelSpec s;
    s.t_up = s.t_down = t;
    s.u_up = s.u_down = 0.0;
    s.v_inter = v;
    s.boundary = Boundary::open;
    const auto h = build(s, basis);
    SolverOptions opts;
    opts.k = 1;
    const double e = ground_state(as_operator(h), h.dim(), opts).eigenvalues[0];
    worst = std::max(worst, std::abs(e - (v / 2.0 - std::sqrt(v * v / 4.0 + 4.0 * t * t))));
  }
  return {worst <= 1e-10, fmt("max |E0 - analytic| = %.3g", worst)};
}

SparseHamiltonian random_symmetric(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
  std::vector<MatrixEntry> e;
  for (std::size_t r = 0; r < dim; ++r) {
    e.push_back({r, r, 4.0 * dist(rng)});
    for (int k = 0; k < 3; ++k) {
      const std::size_t c = pick(rng);
      if (c == r) continue;
      const double v = dist(rng);
      e.push_back({r, c, v});
      e.push_back({c, r, v});
    }
  }
  return from_entries(dim, e);
}

Outcome a3() {
  std::vector<SparseHamiltonian> cases;
  for (std::uint64_t s = 1; s <= 20; ++s) cases.push_back(random_symmetric(300, s));
  ModelSpec spec;
  spec.t_up = spec.t_down = 0.3;
  spec.v_inter = -0.8;
  cases.push_back(build(spec, ProductBasis(6, 2, 2)));

  const SolverOptions opts;
  double worst_e = 0.0, worst_r = 0.0;
  for (const auto& h : cases) {
    const auto ds = dense_eig(to_dense(h));
    const auto s = ground_state(as_operator(h), h.dim(), opts);
    for (int i = 0; i < 4; ++i) worst_e = std::max(worst_e, std::abs(s.eigenvalues[i] - ds.eigenvalues[i]));
    for (double r : s.residuals) worst_r = std::max(worst_r, r);
  }
  return {worst_e <= 1e-9 && worst_r <= opts.tol,
          fmt("20 random dim-300 + L=6 N=2+2: max |dE| = %.3g, max residual = %.3g", worst_e, worst_r)};
}

ModelJob paper_job(std::vector<double> t, std::vector<double> abs_v, Boundary b = Boundary::periodic) {
  ModelJob job;
  job.t_over_u = std::move(t);
  job.abs_v_over_u = std::move(abs_v);
  job.boundary = b;
  job.threads = workers();
  return job;
}

struct Fig3 {
  ModelJob job;
  std::vector<ModelPoint> points;
  double seconds;
};

Fig3 fig3_sweep(Boundary b, std::vector<double> t) {
  Fig3 f{paper_job(std::move(t), default_crossover_grid(), b), {}, 0.0};
  const auto t0 = Clock::now();
  f.points = sweep_model(f.job);
  f.seconds = seconds_since(t0);
  return f;
}

Outcome a4(const Fig3& f) {
  double worst_g = 0.0, worst_n = 0.0;
  bool ok = true;
  for (const auto& p : f.points) {
    if (!p.ok()) {
      ok = false;
      continue;
    }
    const auto& pr = p.profile;
    worst_g = std::max(worst_g, std::abs(std::accumulate(pr.g2_cross.begin(), pr.g2_cross.end(), 0.0) - 9.0));
    worst_n = std::max(worst_n, std::abs(std::accumulate(pr.density_up.begin(), pr.density_up.end(), 0.0) - 3.0));
    worst_n = std::max(worst_n, std::abs(std::accumulate(pr.density_down.begin(), pr.density_down.end(), 0.0) - 3.0));
  }
  return {ok && worst_g <= 1e-8 && worst_n <= 1e-10,
          fmt("%g points: max |sum g2 - 9| = %.3g, max |sum n - 3| = %.3g",
              static_cast<double>(f.points.size()), worst_g, worst_n)};
}

ModelPoint single(double t, double abs_v, double& seconds) {
  const auto job = paper_job({t}, {abs_v});
  const auto t0 = Clock::now();
  auto p = solve_model_point(job, model_basis(job), t, -abs_v);
  seconds = seconds_since(t0);
  return p;
}

Outcome a5() {
  double dt = 0.0;
  const auto p = single(1e-3, 1.5, dt);
  if (!p.ok()) return {false, p.error};
  const double g0 = p.profile.g2_cross[0];
  return {g0 >= 8.5 && dt < 60.0,
          fmt("g2(0) = %.6f (averaged over %g vectors), %.2f s", g0,
              static_cast<double>(p.profile.averaged_over), dt)};
}

Outcome a6() {
  double dt = 0.0;
  const auto p = single(1e-3, 0.5, dt);
  if (!p.ok()) return {false, p.error};
  const double g0 = p.profile.g2_cross[0], g1 = p.profile.g2_cross[1];
  return {std::abs(g0 - 3.0) <= 0.05 * 3.0 && g1 > 0.0, fmt("g2(0) = %.6f, g2(1) = %.6f, %.2f s", g0, g1, dt)};
}

std::size_t nearest(const std::vector<ModelPoint>& pts, std::size_t first, std::size_t n, double abs_v) {
  std::size_t best = first;
  for (std::size_t i = first; i < first + n; ++i) {
    if (std::abs(std::abs(pts[i].v_over_u) - abs_v) < std::abs(std::abs(pts[best].v_over_u) - abs_v)) best = i;
  }
  return best;
}

// Checks one t/U = 0.01 curve; returns the description on success or failure.
bool sharp_and_monotone(const Fig3& f, std::size_t first, std::string& detail) {
  const std::size_t n = f.job.abs_v_over_u.size();
  for (std::size_t i = first; i < first + n; ++i) {
    if (!f.points[i].ok()) {
      detail += " error: " + f.points[i].error;
      return false;
    }
  }
  const double g09 = f.points[nearest(f.points, first, n, 0.9)].profile.g2_cross[0];
  const double g11 = f.points[nearest(f.points, first, n, 1.1)].profile.g2_cross[0];
  double worst_drop = 0.0;
  for (std::size_t i = first + 1; i < first + n; ++i) {
    worst_drop = std::max(worst_drop, f.points[i - 1].profile.g2_cross[0] - f.points[i].profile.g2_cross[0]);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, " %s: g2(0)|0.9 = %.4f, g2(0)|1.1 = %.4f, max drop = %.3g;",
                to_string(f.job.boundary), g09, g11, worst_drop);
  detail += buf;
  return g11 > 2.0 * g09 && worst_drop <= 1e-6;
}

Outcome a7(const Fig3& periodic, const Fig3& open) {
  std::string detail;
  const bool a = sharp_and_monotone(periodic, 0, detail);
  const bool b = sharp_and_monotone(open, 0, detail);
  return {a && b, detail.empty() ? detail : detail.substr(1)};
}

double spread_1_to_4(const std::vector<double>& g) {
  const auto [lo, hi] = std::minmax_element(g.begin() + 1, g.begin() + 5);
  return *hi - *lo;
}

Outcome a8() {
  const auto job = paper_job({0.01}, {0.01, 1.2});
  const auto pts = sweep_model(job);
  for (const auto& p : pts) {
    if (!p.ok()) return {false, p.error};
  }
  const double s_bcs = spread_1_to_4(pts[0].profile.g2_cross);
  const double s_bb = spread_1_to_4(pts[1].profile.g2_cross);
  return {s_bcs < s_bb / 5.0, fmt("spread(0.01) = %.4g, spread(1.2) = %.4g, required ratio < 0.2, got %.4g",
                                  s_bcs, s_bb, s_bb == 0.0 ? INFINITY : s_bcs / s_bb)};
}

// V1/E_R and t/U with every intermediate eliminated by hand.
double depth_ratio_oracle(const OpticalParams& p) {
  constexpr double pi = std::numbers::pi;
  const double g1d = p.eta * p.gamma;
  return g1d * g1d * p.delta3 * p.n_mod * p.n_atom /
         (8.0 * pi * pi * p.omega * p.omega * p.n_sites * p.n_sites * p.delta2);
}

double hopping_ratio_oracle(const OpticalParams& p) {
  return 4.0 * p.delta4 / (p.eta * p.gamma * p.omega) * std::sqrt(p.delta2 * p.delta3 * p.n_mod / p.n_atom) *
         std::exp(-2.0 * std::sqrt(depth_ratio_oracle(p)));
}

Outcome a9() {
  OpticalJob job;
  job.delta_q = {20.0, 60.0, 50};
  job.delta4 = {10.0, 50.0, 50};
  const auto rows = sweep_optical(job);
  double worst_v = 0.0, worst_t = 0.0;
  bool ok = rows.size() == 2500;
  for (const auto& r : rows) {
    if (!r.v_over_u || !r.t_over_u) {
      ok = false;
      continue;
    }
    OpticalParams p = job.base;
    p.delta_q = r.delta_q;
    p.delta4 = r.delta4;
    const double d4 = r.delta4, dq = r.delta_q;
    worst_v = std::max(worst_v, rel(*r.v_over_u, d4 * d4 / (d4 * d4 - dq * dq)));
    worst_t = std::max(worst_t, rel(*r.t_over_u, hopping_ratio_oracle(p)));
  }
  const double depth = derive_hubbard(OpticalParams{}).v1_over_er;
  const double depth_err = rel(depth, depth_ratio_oracle(OpticalParams{}));
  ok = ok && worst_v <= 1e-12 && worst_t <= 1e-12 && depth_err <= 1e-12;
  char buf[256];
  std::snprintf(buf, sizeof buf, "50x50 grid: max rel dV/U = %.3g, max rel dt/U = %.3g; V1/E_R = %.12f (rel err %.3g)",
                worst_v, worst_t, depth, depth_err);
  return {ok, buf};
}

Outcome a10() {
  // spin swap: profiles of the swapped state, and of the swapped Hamiltonian
  ProductBasis basis(6, 2, 2);
  ModelSpec s;
  s.t_up = 0.15;
  s.t_down = 0.35;
  s.v_inter = -0.6;
  ModelSpec swapped = s;
  std::swap(swapped.t_up, swapped.t_down);
  const auto a = ground_state(as_operator(build(s, basis)), basis.size());
  const auto b = ground_state(as_operator(build(swapped, basis)), basis.size());
  std::vector<double> psi_swapped(basis.size());
  for (std::size_t iu = 0; iu < basis.up().size(); ++iu) {
    for (std::size_t id = 0; id < basis.down().size(); ++id) {
      psi_swapped[basis.index(id, iu)] = a.ground_vector[basis.index(iu, id)];
    }
  }
  const auto ga = g2_cross_profile(a.ground_vector, basis, Boundary::periodic);
  const auto gs = g2_cross_profile(psi_swapped, basis, Boundary::periodic);
  const auto gb = g2_cross_profile(b.ground_vector, basis, Boundary::periodic);
  const auto ma = g2_minus_profile(a.ground_vector, basis, Boundary::periodic);
  const auto mb = g2_minus_profile(b.ground_vector, basis, Boundary::periodic);
  double swap_err = 0.0;
  for (std::size_t l = 0; l < 6; ++l) {
    const std::size_t mirror = (6 - l) % 6;  // swapping species maps l to -l
    swap_err = std::max({swap_err, std::abs(ga[mirror] - gs[l]), std::abs(ga[mirror] - gb[l]),
                         std::abs(ma[l] - mb[l])});
  }

  // unit rescaling: inputs are in units of Gamma, so Gamma -> 2 Gamma doubles every frequency
  OpticalParams p;
  OpticalParams q = p;
  q.gamma = 2.0;
  double scale_err = 0.0;
  for (const MapOptions opts : {MapOptions{false}, MapOptions{true}}) {
    const auto hp = derive_hubbard(p, opts);
    const auto hq = derive_hubbard(q, opts);
    scale_err = std::max({scale_err, rel(hp.t_over_u, hq.t_over_u), rel(hp.v_over_u, hq.v_over_u),
                          rel(hp.v1_over_er, hq.v1_over_er)});
  }

  // byte-identical CSV at fixed seed
  const auto job = paper_job({0.01, 0.1}, {0.3, 0.95, 1.05, 1.4});
  const bool same = model_csv(job, sweep_model(job)) == model_csv(job, sweep_model(job));

  char buf[256];
  std::snprintf(buf, sizeof buf, "spin swap max diff = %.3g; Gamma->2Gamma max rel diff = %.3g; CSV reruns %s",
                swap_err, scale_err, same ? "identical" : "differ");
  return {swap_err <= 1e-10 && scale_err <= 1e-12 && same, buf};
}

Outcome a11(const Fig3& f) {
  bool ok = f.points.size() == 60;
  for (const auto& p : f.points) ok = ok && p.ok();
  return {ok && f.seconds < 20.0 * 60.0,
          fmt("2 x 30 points at dim 14400 in %.1f s on %g thread(s)", f.seconds, static_cast<double>(f.job.threads))};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> known;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::string(argv[i]) == "--known-failure") known.insert(argv[i + 1]);
  }

  int failures = 0;
  const auto report = [&](const char* id, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool excused = !o.pass && known.count(id);
    std::printf("%s %s%s  %s\n", id, o.pass ? "PASS" : "FAIL", excused ? " (known)" : "", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !excused) ++failures;
  };

  report("A1", a1);
  report("A2", a2);
  report("A3", a3);

  const Fig3 periodic = fig3_sweep(Boundary::periodic, {0.01, 0.1});
  report("A4", [&] { return a4(periodic); });
  report("A5", a5);
  report("A6", a6);
  report("A7", [&] {
    const Fig3 open = fig3_sweep(Boundary::open, {0.01});
    return a7(periodic, open);
  });
  report("A8", a8);
  report("A9", a9);
  report("A10", a10);
  report("A11", [&] { return a11(periodic); });

  return failures == 0 ? 0 : 1;
}
