// polariton: command-line front end.
//
//   polariton map            --config paper.conf
//   polariton ground         [--config f] [--from-optical] [--t-over-u x] [--v-over-u x]
//   polariton sweep-optical  --config grid.conf
//   polariton sweep-model    [--config f] [--t-over-u x,y]
//   polariton profile        [--config f] [--t-over-u x]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "polariton/config.hpp"
#include "polariton/sweep.hpp"

namespace {

using namespace polariton;

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<std::string> boundary;
  std::optional<std::string> nmax;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "key=value configuration file");
  if (config_required) c->required();
  cmd->add_option("--out", f.out, "output path (default: stdout)");
  cmd->add_option("--seed", f.seed, "solver start-vector seed");
  cmd->add_option("--tol", f.tol, "residual tolerance");
  cmd->add_option("--boundary", f.boundary, "open|periodic")
      ->check(CLI::IsMember({"open", "periodic"}));
  cmd->add_option("--nmax", f.nmax, "per-site occupancy cap (integer or inf)");
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

ConfigFile load(const CommonFlags& f) { return f.config.empty() ? ConfigFile{} : parse_config(f.config); }

// Command-line flags override the file.
void apply_overrides(ConfigFile& cfg, const CommonFlags& f) {
  if (f.seed) cfg.set("seed", std::to_string(*f.seed));
  if (f.tol) cfg.set("tol", format_number(*f.tol));
  if (f.boundary) cfg.set("boundary", *f.boundary);
  if (f.nmax) {
    if (!detail::to_cap(*f.nmax)) throw ConfigError(0, "--nmax expects a positive integer or inf");
    cfg.set("nmax", *f.nmax);
  }
}

std::size_t dense_limit_from_env() {
  const char* env = std::getenv("POLARITON_DENSE_LIMIT");
  if (!env || !*env) return kDefaultDenseLimit;
  const auto v = detail::to_integer<std::size_t>(env);
  if (!v) throw ConfigError(0, "POLARITON_DENSE_LIMIT must be a non-negative integer");
  return *v;
}

void emit(const CommonFlags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(f.out, std::ios::binary);
  if (!os) throw ConfigError(0, "cannot write '" + f.out + "'");
  os << text;
}

ModelJob finish_model_job(ConfigFile& cfg, const CommonFlags& f, std::vector<double> default_abs_v,
                          const std::vector<double>& t_flag) {
  apply_overrides(cfg, f);
  if (!t_flag.empty()) cfg.set("t_over_u", join_numbers(t_flag));
  ModelJob job = model_job(cfg, std::move(default_abs_v));
  job.threads = f.threads;
  job.dense_limit = dense_limit_from_env();
  return job;
}

int fail_count(const std::vector<ModelPoint>& pts) {
  int n = 0;
  for (const auto& p : pts) n += p.ok() ? 0 : 1;
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-species polariton Bose-Hubbard toolkit"};
  app.require_subcommand(1);

  CommonFlags map_f, ground_f, optical_f, model_f, profile_f;

  auto* map_cmd = app.add_subcommand("map", "optical parameters -> Hubbard ratios and regime checks");
  add_common(map_cmd, map_f, true);

  auto* ground_cmd = app.add_subcommand("ground", "ground state and correlations at one point");
  add_common(ground_cmd, ground_f, false);
  bool from_optical = false;
  std::optional<double> ground_t, ground_v;
  std::string dump_matrix;
  ground_cmd->add_flag("--from-optical", from_optical, "take t/U and V/U from the optical map");
  ground_cmd->add_option("--t-over-u", ground_t, "hopping ratio t/U");
  ground_cmd->add_option("--v-over-u", ground_v, "attraction strength |V|/U (V = -|V|)");
  ground_cmd->add_option("--dump-matrix", dump_matrix, "write the Hamiltonian in coordinate format");

  auto* optical_cmd = app.add_subcommand("sweep-optical", "V/U and t/U over a (delta_q, delta4) grid");
  add_common(optical_cmd, optical_f, true);

  auto* model_cmd = app.add_subcommand("sweep-model", "crossover curves versus |V|/U");
  add_common(model_cmd, model_f, false);
  std::vector<double> model_t;
  model_cmd->add_option("--t-over-u", model_t, "hopping ratio(s) t/U")->delimiter(',');

  auto* profile_cmd = app.add_subcommand("profile", "g2_cross(l) profiles");
  add_common(profile_cmd, profile_f, false);
  std::vector<double> profile_t;
  profile_cmd->add_option("--t-over-u", profile_t, "hopping ratio(s) t/U")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*map_cmd) {
      ConfigFile cfg = load(map_f);
      const OpticalParams p = optical_params(cfg);
      emit(map_f, map_report(p, map_options(cfg), strictness(cfg)).dump(2) + "\n");
      return 0;
    }

    if (*ground_cmd) {
      ConfigFile cfg = load(ground_f);
      double t = 0.0;
      double v = 0.0;
      if (from_optical) {
        const HubbardParams h = derive_hubbard(optical_params(cfg), map_options(cfg));
        t = h.t_over_u;
        v = h.v_over_u;
      }
      // The optical knobs are not lattice-model keys; drop them before the model view.
      ConfigFile model_cfg;
      for (const auto& [key, entry] : cfg.entries()) {
        if (!detail::is_optical_key(key)) model_cfg.set(key, entry.value, entry.line);
      }
      ModelJob job = finish_model_job(model_cfg, ground_f, {0.5}, {});
      if (!from_optical) {
        t = ground_t.value_or(job.t_over_u.front());
        v = -ground_v.value_or(job.abs_v_over_u.front());
      } else if (ground_t || ground_v) {
        throw ConfigError(0, "--from-optical cannot be combined with --t-over-u/--v-over-u");
      }
      const ProductBasis basis = model_basis(job);
      if (!dump_matrix.empty()) {
        std::ofstream os(dump_matrix);
        if (!os) throw ConfigError(0, "cannot write '" + dump_matrix + "'");
        build(model_spec(job, t, v), basis).write_coordinate(os);
      }
      const ModelPoint pt = solve_model_point(job, basis, t, v);
      emit(ground_f, ground_report(job, pt).dump(2) + "\n");
      if (!pt.ok()) {
        std::cerr << pt.error << "\n";
        return kExitNumerical;
      }
      return 0;
    }

    if (*optical_cmd) {
      ConfigFile cfg = load(optical_f);
      OpticalJob job = optical_job(cfg);
      job.threads = optical_f.threads;
      emit(optical_f, optical_csv(sweep_optical(job)));
      return 0;
    }

    if (*model_cmd) {
      ConfigFile cfg = load(model_f);
      const ModelJob job = finish_model_job(cfg, model_f, default_crossover_grid(), model_t);
      const auto pts = sweep_model(job);
      emit(model_f, model_csv(job, pts));
      if (const int n = fail_count(pts)) std::cerr << n << " sweep point(s) failed\n";
      return 0;
    }

    if (*profile_cmd) {
      ConfigFile cfg = load(profile_f);
      const ModelJob job = finish_model_job(cfg, profile_f, {1.2, 0.99, 0.5, 0.01}, profile_t);
      const auto pts = sweep_model(job);
      emit(profile_f, profile_csv(pts));
      if (const int n = fail_count(pts)) std::cerr << n << " profile point(s) failed\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
