#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "spherosim/dynamics.hpp"
#include "spherosim/equivariant_oracle.hpp"
#include "spherosim/error.hpp"
#include "spherosim/io.hpp"
#include "spherosim/minimizer.hpp"
#include "spherosim/parallel.hpp"
#include "spherosim/verify.hpp"

namespace {

using namespace spherosim;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerify = 3;

// Reads {"key": value, "subcommand": {"key": value}} into CLI11 config items.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const auto& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        j[name] = opt->as<std::string>();
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    return j.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config", e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config", "top level must be an object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        for (const auto& [sub, v] : value.items()) items.push_back(item({key}, sub, v));
      } else {
        items.push_back(item({}, key, value));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config", "unsupported value " + v.dump());
  }

  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const json& v) {
    CLI::ConfigItem it;
    it.parents = std::move(parents);
    it.name = name;
    if (v.is_array()) {
      for (const auto& e : v) it.inputs.push_back(scalar(e));
    } else {
      it.inputs.push_back(scalar(v));
    }
    return it;
  }
};

struct Globals {
  int level = 5;
  double kappa = 50.0;
  std::uint64_t seed = 7;
  int threads = 1;
  std::string out_dir = ".";
  std::string vtk;
  std::string load_field;
};

struct FieldChoice {
  std::string kind = "hedgehog";
  double eps = 0.2;
};

struct EvolveArgs {
  FieldChoice field;
  EvolveConfig cfg;
  std::string scheme = "rk4";
  std::string save_trace;
  std::string save_field;
};

struct MinimizeArgs {
  std::vector<double> j_target;
  std::optional<double> seed_eps;
  std::string opts_file;
  std::string save_field;
  std::string report;
};

std::string resolve(const Globals& g, const std::string& path) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  if (p.is_absolute() || g.out_dir == ".") return path;
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / p).string();
}

template <class Writer>
void write_file(const Globals& g, const std::string& path, Writer&& writer) {
  const std::string full = resolve(g, path);
  std::ofstream out(full);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + full + " for writing");
  writer(out);
  if (!out) throw Error(ErrorCode::Io, "write to " + full + " failed");
}

void validate_globals(const Globals& g) {
  if (g.level < 0 || g.level > 7) throw Error(ErrorCode::LevelOutOfRange, "level must be in [0, 7]");
  validate(EnergyParams{g.kappa});
  if (g.threads < 1) throw Error(ErrorCode::InvalidArgument, "threads must be >= 1");
}

std::shared_ptr<const TriMesh> mesh_for(const Globals& g) { return TriMesh::icosphere(g.level); }

Field make_field(const Globals& g, const FieldChoice& c) {
  if (!g.load_field.empty()) return load_field(g.load_field);
  const auto mesh = mesh_for(g);
  std::mt19937_64 rng(g.seed);
  if (c.kind == "hedgehog") return hedgehog(1, mesh);
  if (c.kind == "antihedgehog") return hedgehog(-1, mesh);
  if (c.kind == "constant") return constant_field(kE3, mesh);
  if (c.kind == "trial") return from_equivariant(trial_profile(c.eps), mesh);
  if (c.kind == "random") return Field::from_function(mesh, random_smooth_function(rng));
  if (c.kind == "random-q0") return Field::from_function(mesh, random_smooth_function(rng, kE3));
  throw Error(ErrorCode::InvalidArgument, "unknown field kind " + c.kind);
}

void maybe_vtk(const Globals& g, const Field& m) {
  if (!g.vtk.empty()) write_file(g, g.vtk, [&](std::ostream& o) { write_vtk(m, o); });
}

void print_diagnostics(const Diagnostics& d) {
  std::cout << "# schema_version=" << kSchemaVersion << '\n'
            << diagnostics_csv_header() << '\n'
            << diagnostics_csv_row(d) << '\n';
}

MinimizeOptions read_minimize_options(const std::string& path) {
  MinimizeOptions o;
  if (path.empty()) return o;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, path + ": top level must be an object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "mu0") o.mu0 = v.get<double>();
      else if (key == "mu_growth") o.mu_growth = v.get<double>();
      else if (key == "mu_max") o.mu_max = v.get<double>();
      else if (key == "inner_tol") o.inner_tol = v.get<double>();
      else if (key == "constraint_tol") o.constraint_tol = v.get<double>();
      else if (key == "max_outer") o.max_outer = v.get<int>();
      else if (key == "max_inner") o.max_inner = v.get<int>();
      else if (key == "armijo_c") o.armijo_c = v.get<double>();
      else if (key == "armijo_shrink") o.armijo_shrink = v.get<double>();
      else if (key == "step_min") o.step_min = v.get<double>();
      else if (key == "step_max") o.step_max = v.get<double>();
      else if (key == "max_displacement") o.max_displacement = v.get<double>();
      else if (key == "charge_check_every") o.charge_check_every = v.get<int>();
      else if (key == "fail_on_max_iterations") o.fail_on_max_iterations = v.get<bool>();
      else throw Error(ErrorCode::InvalidArgument, path + ": unknown key '" + key + "'");
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument, path + ": bad value for '" + key + "': " + e.what());
    }
  }
  validate(o);
  return o;
}

int run_mesh(const Globals& g, const std::string& off) {
  const auto mesh = mesh_for(g);
  const std::string problems = check_mesh_invariants(*mesh);
  if (!problems.empty()) throw Error(ErrorCode::InvalidArgument, problems);
  std::cout << "level,vertices,triangles,min_edge,mean_edge\n"
            << mesh->level() << ',' << mesh->vertex_count() << ',' << mesh->triangle_count() << ','
            << std::setprecision(12) << mesh->min_edge_length() << ',' << mesh->mean_edge_length() << '\n';
  if (!off.empty()) write_file(g, off, [&](std::ostream& o) { write_off(*mesh, o); });
  return kExitOk;
}

int run_diagnose(const Globals& g, const FieldChoice& c) {
  const Field m = make_field(g, c);
  print_diagnostics(diagnose(m, EnergyParams{g.kappa}));
  maybe_vtk(g, m);
  return kExitOk;
}

int run_trial(const Globals& g, std::optional<double> eps, const std::string& save) {
  const EnergyParams p{g.kappa};
  const auto mesh = mesh_for(g);
  const double e = eps ? *eps : trial_seed_epsilon(p, mesh);
  const auto profile = trial_profile(e);
  const Field m = from_equivariant(profile, mesh);
  const Diagnostics d = diagnose(m, p);
  const double oracle = oracle_energy(profile, p);
  std::cout << std::setprecision(12) << "# schema_version=" << kSchemaVersion << '\n'
            << "eps,E_mesh,E_oracle,rel_diff,below_8pi,Q,J3_mesh,J3_oracle\n"
            << e << ',' << d.total << ',' << oracle << ',' << std::abs(d.total - oracle) / oracle << ','
            << (d.total < 8.0 * std::numbers::pi ? 1 : 0) << ',' << d.Q << ',' << d.J.z() << ','
            << oracle_J3(profile) << '\n';
  if (!save.empty()) write_file(g, save, [&](std::ostream& o) { write_field(m, o); });
  maybe_vtk(g, m);
  return kExitOk;
}

int run_oracle(const Globals& g, const std::string& kind, double eps, double theta, int k, int refine) {
  EquivariantProfile p;
  if (kind == "trial") p = trial_profile(eps);
  else if (kind == "identity") p = identity_profile();
  else if (kind == "constant") p = constant_profile(theta, k);
  else throw Error(ErrorCode::InvalidArgument, "unknown profile " + kind);
  const EnergyParams params{g.kappa};
  const OracleEnergy e = oracle_energy_parts(p, params, refine);
  const OracleMomentum mo = oracle_momentum(p, refine);
  std::cout << std::setprecision(15) << "# schema_version=" << kSchemaVersion << '\n'
            << "E_exchange,E_anis,E,Q,S3,L3,J3\n"
            << e.exchange << ',' << e.anisotropy << ',' << e.total << ',' << oracle_charge(p) << ','
            << mo.S3 << ',' << mo.L3 << ',' << mo.J3_closed << '\n';
  return kExitOk;
}

int run_evolve(const Globals& g, EvolveArgs a) {
  if (a.scheme == "rk4") a.cfg.scheme = Scheme::ProjectedRK4;
  else if (a.scheme == "midpoint") a.cfg.scheme = Scheme::SemiImplicitMidpoint;
  else throw Error(ErrorCode::InvalidArgument, "scheme must be rk4 or midpoint");
  validate(a.cfg);
  const Field m0 = make_field(g, a.field);
  const EvolveResult r = evolve(m0, a.cfg, EnergyParams{g.kappa});
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  if (!a.save_trace.empty()) write_file(g, a.save_trace, [&](std::ostream& o) { write_trace_csv(r.trace, o); });
  if (!a.save_field.empty()) write_file(g, a.save_field, [&](std::ostream& o) { write_field(r.final_field, o); });
  maybe_vtk(g, r.final_field);
  const Drift d = trace_drift(r.trace);
  std::cout << std::setprecision(6) << "# schema_version=" << kSchemaVersion << '\n'
            << "t_end,steps_recorded,drift_E,drift_J,drift_Q\n"
            << r.trace.back().t << ',' << r.trace.size() << ',' << d.energy << ',' << d.momentum << ','
            << d.charge << '\n';
  return kExitOk;
}

int run_minimize(const Globals& g, const MinimizeArgs& a) {
  MinimizeOptions opts = read_minimize_options(a.opts_file);
  const EnergyParams p{g.kappa};
  const auto mesh = mesh_for(g);
  if (!a.j_target.empty() && a.j_target.size() != 3) {
    throw Error(ErrorCode::InvalidArgument, "--j-target needs three components");
  }
  std::optional<Field> seed;
  if (!g.load_field.empty()) seed = load_field(g.load_field);
  std::pair<Field, MinimizeReport> out = [&] {
    if (a.j_target.empty()) {
      if (!seed) {
        const double e = a.seed_eps ? *a.seed_eps : trial_seed_epsilon(p, mesh);
        seed = from_equivariant(trial_profile(e), mesh);
      }
      return minimize_free(*seed, p, opts);
    }
    const Vec3 j0(a.j_target[0], a.j_target[1], a.j_target[2]);
    if (!seed) seed = seed_field(j0, p, mesh, a.seed_eps);
    return minimize_constrained(*seed, j0, p, opts);
  }();
  const auto& [m, rep] = out;
  const std::string report = minimize_report_json(rep, g.kappa, m.mesh().level());
  if (!a.report.empty()) write_file(g, a.report, [&](std::ostream& o) { o << report << '\n'; });
  if (!a.save_field.empty()) write_file(g, a.save_field, [&](std::ostream& o) { write_field(m, o); });
  maybe_vtk(g, m);
  std::cout << std::setprecision(10) << "# schema_version=" << kSchemaVersion << '\n'
            << "converged,E_final,below_8pi,constraint_residual,Q_final,equivariance_defect\n"
            << (rep.converged ? 1 : 0) << ',' << rep.E_final << ','
            << (rep.E_final < 8.0 * std::numbers::pi ? 1 : 0) << ','
            << (rep.constrained ? (rep.J_final - rep.J_target).norm() : 0.0) << ',' << rep.Q_final << ','
            << rep.equivariance_defect << '\n';
  return rep.converged ? kExitOk : kExitNumerical;
}

int run_verify(const Globals& g, const std::string& json_path) {
  SuiteOptions o;
  o.level = g.level;
  o.kappa = g.kappa;
  o.seed = g.seed;
  const auto results = run_suite(o);
  bool all = true;
  for (const auto& c : results) {
    all = all && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  error=" << std::setprecision(4) << c.measured_error
              << " tol=" << c.tolerance;
    if (!c.details.empty()) std::cout << "  " << c.details;
    std::cout << '\n';
  }
  if (!json_path.empty()) write_file(g, json_path, [&](std::ostream& out) { out << suite_report_json(results, o) << '\n'; });
  return all ? kExitOk : kExitVerify;
}

int run_info(const Globals& g) {
  std::cout << "spherosim schema_version " << kSchemaVersion << '\n'
            << "threads " << threads() << '\n'
            << "level,vertices,triangles,min_edge,stability_bound\n";
  for (int level = 0; level <= std::min(g.level, 6); ++level) {
    const auto mesh = TriMesh::icosphere(level);
    std::cout << level << ',' << mesh->vertex_count() << ',' << mesh->triangle_count() << ','
              << std::setprecision(6) << mesh->min_edge_length() << ',' << stability_bound(*mesh) << '\n';
  }
  return kExitOk;
}

void add_field_options(CLI::App* sub, FieldChoice& c) {
  sub->add_option("--field", c.kind, "hedgehog|antihedgehog|constant|trial|random|random-q0")
      ->check(CLI::IsMember({"hedgehog", "antihedgehog", "constant", "trial", "random", "random-q0"}))
      ->capture_default_str();
  sub->add_option("--eps", c.eps, "core scale of the trial field")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sphere-valued magnetization fields: energy, charge, momentum, dynamics and minimization"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config with flat keys, optionally nested per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--level", g.level, "icosphere subdivision level")->capture_default_str();
  app.add_option("--kappa", g.kappa, "anisotropy strength")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths")->capture_default_str();
  app.add_option("--vtk", g.vtk, "write the resulting field as legacy VTK");
  app.add_option("--load-field", g.load_field, "read the input field from a field file");

  std::string off;
  auto* mesh_cmd = app.add_subcommand("mesh", "print mesh statistics, optionally export OFF");
  mesh_cmd->add_option("--off", off, "OFF output path");

  FieldChoice diag_field;
  auto* diag_cmd = app.add_subcommand("diagnose", "energy, charge and momenta of a field as CSV");
  add_field_options(diag_cmd, diag_field);

  std::optional<double> trial_eps;
  std::string trial_save;
  auto* trial_cmd = app.add_subcommand("trial", "trial field versus the radial oracle");
  trial_cmd->add_option("--eps", trial_eps, "core scale (default: best grid scale)");
  trial_cmd->add_option("--save-field", trial_save, "field output path");

  std::string profile = "trial";
  double oracle_eps = 0.2, oracle_theta = 0.0;
  int oracle_k = 1, oracle_refine = 1;
  auto* oracle_cmd = app.add_subcommand("oracle", "radial quadrature values of an equivariant profile");
  oracle_cmd->add_option("--profile", profile, "trial|identity|constant")
      ->check(CLI::IsMember({"trial", "identity", "constant"}))
      ->capture_default_str();
  oracle_cmd->add_option("--eps", oracle_eps, "trial core scale")->capture_default_str();
  oracle_cmd->add_option("--theta", oracle_theta, "constant profile polar angle")->capture_default_str();
  oracle_cmd->add_option("--k", oracle_k, "constant profile winding")->capture_default_str();
  oracle_cmd->add_option("--refine", oracle_refine, "panel refinement factor")->capture_default_str();

  EvolveArgs ev;
  auto* evolve_cmd = app.add_subcommand("evolve", "Landau-Lifshitz evolution");
  add_field_options(evolve_cmd, ev.field);
  evolve_cmd->add_option("--dt", ev.cfg.dt, "time step")->capture_default_str();
  evolve_cmd->add_option("--t-end", ev.cfg.t_end, "final time")->capture_default_str();
  evolve_cmd->add_option("--scheme", ev.scheme, "rk4|midpoint")->capture_default_str();
  evolve_cmd->add_option("--record-every", ev.cfg.record_every, "steps between trace rows")->capture_default_str();
  evolve_cmd->add_option("--save-trace", ev.save_trace, "trace CSV output path");
  evolve_cmd->add_option("--save-field", ev.save_field, "final field output path");

  MinimizeArgs mn;
  auto* min_cmd = app.add_subcommand("minimize", "constrained or free energy minimization");
  min_cmd->add_option("--j-target", mn.j_target, "target J as jx,jy,jz (omit for free minimization)")
      ->delimiter(',')
      ->expected(3);
  min_cmd->add_option("--seed-eps", mn.seed_eps, "trial core scale of the seed");
  min_cmd->add_option("--opts", mn.opts_file, "JSON file of minimizer options");
  min_cmd->add_option("--save-field", mn.save_field, "final field output path");
  min_cmd->add_option("--report", mn.report, "JSON report output path");

  std::string verify_json;
  auto* verify_cmd = app.add_subcommand("verify", "run the identity checks");
  verify_cmd->add_option("--json", verify_json, "JSON report output path");

  auto* info_cmd = app.add_subcommand("info", "build and mesh information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    validate_globals(g);
    set_threads(g.threads);
    if (*mesh_cmd) return run_mesh(g, off);
    if (*diag_cmd) return run_diagnose(g, diag_field);
    if (*trial_cmd) return run_trial(g, trial_eps, trial_save);
    if (*oracle_cmd) return run_oracle(g, profile, oracle_eps, oracle_theta, oracle_k, oracle_refine);
    if (*evolve_cmd) return run_evolve(g, ev);
    if (*min_cmd) return run_minimize(g, mn);
    if (*verify_cmd) return run_verify(g, verify_json);
    if (*info_cmd) return run_info(g);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? kExitNumerical : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
