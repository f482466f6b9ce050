#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tensionlab/cache.hpp"
#include "tensionlab/config.hpp"
#include "tensionlab/experiments.hpp"
#include "tensionlab/io.hpp"
#include "tensionlab/tension.hpp"
#include "tensionlab/version.hpp"

namespace tl = tensionlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

tl::Potential potential_from_config(const tl::json& cfg) {
  const std::string name = cfg.at("potential").get<std::string>();
  if (name == "truncated_quadratic") return tl::Potential::truncated_quadratic();
  const double scale = cfg.contains("potential_scale") ? cfg.at("potential_scale").get<double>() : 1.0;
  return tl::Potential::quartic(scale);
}

tl::Family family_from_name(const std::string& name) {
  if (name == "phase-fractional") return tl::Family::PhaseFractional;
  if (name == "phase-integer") return tl::Family::PhaseInteger;
  if (name == "phase-half") return tl::Family::PhaseHalf;
  if (name == "fd-integer") return tl::Family::FdInteger;
  if (name == "fd-fractional") return tl::Family::FdFractional;
  throw tl::ConfigError("config: unknown family \"" + name + "\"");
}

// Problem-relevant subset of the config: artifacts and cache keys must not
// depend on where results are written.
tl::json cache_config(const tl::json& cfg) {
  tl::json key = cfg;
  key.erase("output_dir");
  key.erase("cache_dir");
  key.erase("use_cache");
  return key;
}

tl::TensionProblem tension_problem_from_config(const tl::json& cfg) {
  tl::TensionProblem p;
  if (!cfg.contains("kind")) throw tl::ConfigError("config: \"kind\" is required");
  p.kind = tl::tension_kind_from_name(cfg.at("kind").get<std::string>());
  p.potential = potential_from_config(cfg);
  p.order.k = cfg.contains("k") ? cfg.at("k").get<int>() : 0;
  p.order.s = cfg.contains("s") ? cfg.at("s").get<double>() : 0.0;
  p.delta = cfg.at("delta").get<double>();
  if (cfg.contains("T0")) p.T0 = cfg.at("T0").get<double>();
  if (cfg.contains("T_max")) p.T_max = cfg.at("T_max").get<double>();
  if (cfg.contains("N0")) p.N0 = cfg.at("N0").get<int>();
  if (cfg.contains("N_max")) p.N_max = cfg.at("N_max").get<int>();
  p.solver.seed = cfg.at("seed").get<unsigned>();
  if ((p.kind == tl::TensionKind::FdMk || p.kind == tl::TensionKind::FdM1s) &&
      p.potential.kind() != tl::Potential::Kind::TruncatedQuadratic)
    p.potential = tl::Potential::truncated_quadratic();
  p.check();
  return p;
}

int run_tension(const tl::RunConfig& rc, bool profile_only) {
  const tl::json& cfg = rc.raw;
  const fs::path out_dir = cfg.at("output_dir").get<std::string>();
  fs::create_directories(out_dir);
  const fs::path cache_dir = tl::cache_directory(cfg.at("cache_dir").get<std::string>());
  const bool use_cache = cfg.at("use_cache").get<bool>();
  const std::string key = tl::cache_key(cache_config(cfg));

  tl::TensionResult result;
  bool from_cache = false;
  if (use_cache) {
    if (auto hit = tl::cache_lookup(cache_dir, key)) {
      result = tl::tension_result_from_json(*hit);
      from_cache = true;
    }
  }
  if (!from_cache) {
    tl::TensionProblem p = tension_problem_from_config(cfg);
    result = tl::solve_profile(p);
    if (use_cache) tl::cache_store(cache_dir, key, tl::to_json(result));
  }

  const std::string stem = "tension_" + tl::tension_kind_name(result.kind);
  tl::write_text_atomic(out_dir / (stem + ".json"), tl::to_json(result).dump(2) + "\n");
  tl::write_text_atomic(out_dir / (stem + ".csv"), tl::tension_csv({result}));
  tl::write_text_atomic(out_dir / (stem + "_profile.csv"), tl::profile_csv(result.profile));
  std::printf("%s value=%s T=%s N=%d converged=%s%s\n", tl::tension_kind_name(result.kind).c_str(),
              tl::format_double(result.value).c_str(), tl::format_double(result.T_final).c_str(),
              result.N_final, result.converged ? "true" : "false",
              from_cache ? " (cached)" : "");
  (void)profile_only;
  return result.converged ? kExitOk : kExitNotConverged;
}

int run_sweep_eps(const tl::RunConfig& rc) {
  const tl::json& cfg = rc.raw;
  if (!cfg.contains("family")) throw tl::ConfigError("config: \"family\" is required for sweep-eps");
  if (!cfg.contains("eps_list")) throw tl::ConfigError("config: \"eps_list\" is required");
  const tl::Family family = family_from_name(cfg.at("family").get<std::string>());
  const tl::FractionalOrder order{cfg.contains("k") ? cfg.at("k").get<int>() : 0,
                                  cfg.contains("s") ? cfg.at("s").get<double>() : 0.0};
  const std::vector<double> eps_list = cfg.at("eps_list").get<std::vector<double>>();

  const fs::path out_dir = cfg.at("output_dir").get<std::string>();
  fs::create_directories(out_dir);
  const fs::path cache_dir = tl::cache_directory(cfg.at("cache_dir").get<std::string>());
  const bool use_cache = cfg.at("use_cache").get<bool>();
  const std::string key = tl::cache_key(cache_config(cfg));

  tl::SweepRecord rec;
  bool from_cache = false;
  if (use_cache) {
    if (auto hit = tl::cache_lookup(cache_dir, key)) {
      rec = tl::sweep_record_from_json(*hit);
      from_cache = true;
    }
  }
  if (!from_cache) {
    tl::EpsSweepOptions opts;
    if (cfg.contains("n")) opts.n = cfg.at("n").get<int>();
    if (cfg.contains("eta")) opts.transitions.eta = cfg.at("eta").get<double>();
    if (cfg.contains("r")) opts.transitions.r = cfg.at("r").get<double>();
    opts.seed = cfg.at("seed").get<unsigned>();
    rec = tl::eps_sweep(family, order, potential_from_config(cfg), eps_list, opts);
    if (use_cache) tl::cache_store(cache_dir, key, tl::to_json(rec));
  }

  tl::write_text_atomic(out_dir / "sweep_eps.json", tl::to_json(rec).dump(2) + "\n");
  tl::write_text_atomic(out_dir / "sweep_eps.csv", tl::sweep_csv(rec));
  std::string plot = "";
  for (const auto& r : rec.rows)
    plot += tl::format_double(r.param) + ' ' + tl::format_double(r.energy) + '\n';
  tl::write_text_atomic(out_dir / "sweep_eps.dat", plot);

  bool all_ok = true;
  for (const auto& r : rec.rows) all_ok = all_ok && r.converged;
  std::printf("sweep-eps: %zu rows, converged=%s%s\n", rec.rows.size(),
              all_ok ? "true" : "false", from_cache ? " (cached)" : "");
  return all_ok ? kExitOk : kExitNotConverged;
}

int run_sweep_s(const tl::RunConfig& rc) {
  const tl::json& cfg = rc.raw;
  if (!cfg.contains("kind")) throw tl::ConfigError("config: \"kind\" is required for sweep-s");
  const std::string kind_name = cfg.at("kind").get<std::string>();
  tl::SSweepKind kind;
  if (kind_name == "to_half")
    kind = tl::SSweepKind::ToHalf;
  else if (kind_name == "bbm_left")
    kind = tl::SSweepKind::BbmLeft;
  else if (kind_name == "ms_right")
    kind = tl::SSweepKind::MsRight;
  else
    throw tl::ConfigError("config: sweep-s \"kind\" must be to_half, bbm_left, or ms_right");
  const int k = cfg.contains("k") ? cfg.at("k").get<int>() : 1;
  std::vector<double> s_list;
  if (cfg.contains("s_list")) s_list = cfg.at("s_list").get<std::vector<double>>();

  const fs::path out_dir = cfg.at("output_dir").get<std::string>();
  fs::create_directories(out_dir);
  const fs::path cache_dir = tl::cache_directory(cfg.at("cache_dir").get<std::string>());
  const bool use_cache = cfg.at("use_cache").get<bool>();
  const std::string key = tl::cache_key(cache_config(cfg));

  tl::SweepRecord rec;
  bool from_cache = false;
  if (use_cache) {
    if (auto hit = tl::cache_lookup(cache_dir, key)) {
      rec = tl::sweep_record_from_json(*hit);
      from_cache = true;
    }
  }
  if (!from_cache) {
    rec = tl::s_sweep(kind, k, s_list, potential_from_config(cfg));
    if (use_cache) tl::cache_store(cache_dir, key, tl::to_json(rec));
  }

  tl::json out = tl::to_json(rec);
  try {
    tl::Extrapolation ex = tl::extrapolate(rec);
    out["extrapolation"] =
        tl::json{{"limit", ex.limit}, {"slope", ex.slope}, {"residual", ex.residual}};
    std::printf("sweep-s %s: limit=%s residual=%s%s\n", rec.label.c_str(),
                tl::format_double(ex.limit).c_str(), tl::format_double(ex.residual).c_str(),
                from_cache ? " (cached)" : "");
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "warning: %s\n", e.what());
  }
  tl::write_text_atomic(out_dir / "sweep_s.json", out.dump(2) + "\n");
  tl::write_text_atomic(out_dir / "sweep_s.csv", tl::sweep_csv(rec));
  std::string plot = "";
  for (const auto& r : rec.rows)
    plot += tl::format_double(r.gap) + ' ' + tl::format_double(r.energy) + '\n';
  tl::write_text_atomic(out_dir / "sweep_s.dat", plot);

  bool all_ok = true;
  for (const auto& r : rec.rows) all_ok = all_ok && r.converged;
  return all_ok ? kExitOk : kExitNotConverged;
}

int run_profile(const tl::RunConfig& rc) {
  // Single minimization at fixed eps on (0,1) with pinned boundary layers;
  // artifacts are the profile and the solver trace.
  const tl::json& cfg = rc.raw;
  if (!cfg.contains("family")) throw tl::ConfigError("config: \"family\" is required for profile");
  if (!cfg.contains("eps")) throw tl::ConfigError("config: \"eps\" is required for profile");
  const tl::Family family = family_from_name(cfg.at("family").get<std::string>());
  const double eps = cfg.at("eps").get<double>();
  const int n = cfg.contains("n") ? cfg.at("n").get<int>() : 1024;

  tl::FunctionalSpec spec;
  spec.family = family;
  spec.potential = potential_from_config(cfg);
  spec.order = {cfg.contains("k") ? cfg.at("k").get<int>() : 0,
                cfg.contains("s") ? cfg.at("s").get<double>() : 0.0};
  spec.eps = eps;
  spec.grid = tl::make_grid(0.0, 1.0, n);
  spec.domain_mode = tl::DomainMode::Bounded;
  if (family == tl::Family::PhaseHalf) spec.scaling = tl::ScalingVariant::Log;
  const int layer = std::max(1, n / 10);
  for (int i = 0; i < layer; ++i) {
    spec.pins.indices.push_back(i);
    spec.pins.pinned_values.push_back(-1.0);
    spec.pins.indices.push_back(n - 1 - i);
    spec.pins.pinned_values.push_back(1.0);
  }

  tl::InitParams ip;
  ip.center = 0.5;
  ip.lambda = eps;
  tl::GridFunction start =
      tl::init_profile(tl::ProfileInit::Tanh, spec.grid, tl::TailSpec::none(), ip);
  tl::SolverOptions opts;
  opts.seed = cfg.at("seed").get<unsigned>();
  tl::MinimizeResult res = tl::minimize(spec, start, opts);

  const fs::path out_dir = cfg.at("output_dir").get<std::string>();
  fs::create_directories(out_dir);
  tl::write_text_atomic(out_dir / "profile.csv", tl::profile_csv(res.v));
  tl::write_text_atomic(out_dir / "trace.csv", tl::trace_csv(res.trace));
  tl::json out{{"energy", res.energy},
               {"converged", res.converged},
               {"iterations", res.iterations},
               {"profile", tl::to_json(res.v)}};
  tl::write_text_atomic(out_dir / "profile.json", out.dump(2) + "\n");
  std::printf("profile: energy=%s iterations=%d converged=%s\n",
              tl::format_double(res.energy).c_str(), res.iterations,
              res.converged ? "true" : "false");
  return res.converged ? kExitOk : kExitNotConverged;
}

int run_check(const tl::RunConfig& rc) {
  (void)rc;
  struct Row {
    std::string name;
    bool pass;
  };
  std::vector<Row> rows;

  // Potential validation.
  {
    auto rep = tl::Potential::quartic().validate();
    rows.push_back({"potential: quartic hypotheses", rep.all_pass()});
  }
  // Kernel symmetry and reflection.
  {
    tl::ProfileGrid g{-1.0, 1.0, 32};
    tl::KernelMatrix K(g, 0.75);
    bool ok = true;
    for (int i = 0; i < g.n && ok; ++i)
      for (int j = 0; j < g.n; ++j)
        if (K.at(i, j) != K.at(j, i)) {
          ok = false;
          break;
        }
    const double ck = tl::cell_kernel(0, 1, 2, 3, 0.3);
    ok = ok && std::abs(ck - tl::cell_kernel(-3, -2, -1, 0, 0.3)) < 1e-14 * ck;
    rows.push_back({"kernel: symmetry and reflection", ok});
  }
  // Gradient check per family.
  {
    bool ok = true;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int fam = 0; fam < 5; ++fam) {
      tl::FunctionalSpec spec;
      spec.grid = tl::make_grid(-2.0, 2.0, 64);
      spec.domain_mode = tl::DomainMode::Bounded;
      spec.eps = 0.25;
      switch (fam) {
        case 0:
          spec.family = tl::Family::PhaseFractional;
          spec.order = {0, 0.75};
          break;
        case 1:
          spec.family = tl::Family::PhaseInteger;
          spec.order = {1, 0.0};
          break;
        case 2:
          spec.family = tl::Family::PhaseHalf;
          spec.order = {0, 0.5};
          spec.scaling = tl::ScalingVariant::Log;
          break;
        case 3:
          spec.family = tl::Family::FdInteger;
          spec.order = {2, 0.0};
          spec.potential = tl::Potential::truncated_quadratic();
          break;
        case 4:
          spec.family = tl::Family::FdFractional;
          spec.order = {1, 0.3};
          spec.potential = tl::Potential::truncated_quadratic();
          break;
      }
      tl::EnergyModel model(spec);
      tl::GridFunction v{spec.grid, std::vector<double>(64), tl::TailSpec::none()};
      for (auto& x : v.values) x = u(rng);
      std::vector<double> g;
      model.energy_and_gradient(v, g);
      for (int t = 0; t < 20; ++t) {
        const int i = static_cast<int>(rng() % 64);
        const double h = 1e-5;
        tl::GridFunction vp = v, vm = v;
        vp.values[i] += h;
        vm.values[i] -= h;
        const double fd = (model.energy(vp) - model.energy(vm)) / (2.0 * h);
        if (std::abs(fd - g[i]) > 1e-6 * std::max(1.0, std::abs(fd))) ok = false;
      }
    }
    rows.push_back({"energy: analytic gradients match finite differences", ok});
  }
  // Scaling identity.
  {
    tl::FunctionalSpec spec;
    spec.family = tl::Family::PhaseFractional;
    spec.order = {0, 0.75};
    spec.eps = 0.25;
    spec.grid = tl::make_grid(-1.0, 1.0, 256);
    spec.domain_mode = tl::DomainMode::Bounded;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    tl::GridFunction v{spec.grid, std::vector<double>(256), tl::TailSpec::none()};
    for (auto& x : v.values) x = u(rng);
    auto [lhs, rhs] = tl::scaling_identity_check(spec, v);
    rows.push_back({"energy: exact scaling identity", std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs)});
  }

  bool all = true;
  for (const auto& r : rows) {
    std::printf("%-55s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL");
    all = all && r.pass;
  }
  return all ? kExitOk : kExitError;
}

int run_export(const tl::RunConfig& rc) {
  const tl::json& cfg = rc.raw;
  if (!cfg.contains("input")) throw tl::ConfigError("config: \"input\" is required for export");
  if (!cfg.contains("output")) throw tl::ConfigError("config: \"output\" is required for export");
  const tl::json payload = tl::json::parse(tl::read_text(cfg.at("input").get<std::string>()));
  const fs::path out = cfg.at("output").get<std::string>();
  if (payload.contains("rows")) {
    tl::export_csv(tl::sweep_record_from_json(payload), out);
  } else if (payload.contains("value")) {
    tl::export_csv(std::vector<tl::TensionResult>{tl::tension_result_from_json(payload)}, out);
  } else {
    throw tl::ConfigError("export: unrecognized payload in input file");
  }
  std::printf("exported %s\n", out.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tensionlab: surface tensions and jump energies of singularly perturbed 1-D energies"};
  app.set_version_flag("--version", tl::kToolVersion);
  app.require_subcommand(0, 1);

  std::string config_path;
  tl::json cli_cfg = tl::json::object();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option_function<std::string>(
        "--kind", [&](const std::string& v) { cli_cfg["kind"] = v; }, "problem kind");
    sub->add_option_function<std::string>(
        "--family", [&](const std::string& v) { cli_cfg["family"] = v; }, "energy family");
    sub->add_option_function<int>("--k", [&](int v) { cli_cfg["k"] = v; }, "integer order k");
    sub->add_option_function<double>("--s", [&](double v) { cli_cfg["s"] = v; }, "fractional order s");
    sub->add_option_function<double>("--delta", [&](double v) { cli_cfg["delta"] = v; }, "jump size");
    sub->add_option_function<double>("--eps", [&](double v) { cli_cfg["eps"] = v; }, "epsilon");
    sub->add_option_function<std::vector<double>>(
        "--eps-list", [&](const std::vector<double>& v) { cli_cfg["eps_list"] = v; }, "eps sweep values");
    sub->add_option_function<std::vector<double>>(
        "--s-list", [&](const std::vector<double>& v) { cli_cfg["s_list"] = v; }, "s sweep values");
    sub->add_option_function<std::string>(
        "--potential", [&](const std::string& v) { cli_cfg["potential"] = v; }, "potential name");
    sub->add_option_function<int>("--n", [&](int v) { cli_cfg["n"] = v; }, "grid cells");
    sub->add_option_function<std::string>(
        "--output-dir", [&](const std::string& v) { cli_cfg["output_dir"] = v; }, "artifact directory");
    sub->add_option_function<std::string>(
        "--cache-dir", [&](const std::string& v) { cli_cfg["cache_dir"] = v; }, "cache directory");
    sub->add_option_function<unsigned>("--seed", [&](unsigned v) { cli_cfg["seed"] = v; }, "RNG seed");
    sub->add_flag_function(
        "--no-cache", [&](std::int64_t) { cli_cfg["use_cache"] = false; }, "disable result cache");
    sub->add_option_function<std::string>(
        "--input", [&](const std::string& v) { cli_cfg["input"] = v; }, "input JSON (export)");
    sub->add_option_function<std::string>(
        "--output", [&](const std::string& v) { cli_cfg["output"] = v; }, "output CSV (export)");
  };

  for (const char* name : {"tension", "sweep-eps", "sweep-s", "profile", "check", "export"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);
  if (app.get_subcommands().empty()) {
    std::fprintf(stderr, "error: a command is required (tension | sweep-eps | sweep-s | profile | check | export)\n");
    return kExitError;
  }

  try {
    tl::json cfg = tl::json::object();
    if (!config_path.empty()) cfg = tl::json::parse(tl::read_text(config_path));
    for (const auto& [key, value] : cli_cfg.items()) cfg[key] = value;
    cfg["command"] = app.get_subcommands().front()->get_name();
    tl::RunConfig rc = [&] {
      try {
        return tl::validate_config(std::move(cfg));
      } catch (const tl::json::parse_error& e) {
        throw tl::ConfigError(std::string("config: ") + e.what());
      }
    }();

    if (rc.command == "tension") return run_tension(rc, false);
    if (rc.command == "sweep-eps") return run_sweep_eps(rc);
    if (rc.command == "sweep-s") return run_sweep_s(rc);
    if (rc.command == "profile") return run_profile(rc);
    if (rc.command == "check") return run_check(rc);
    if (rc.command == "export") return run_export(rc);
    std::fprintf(stderr, "error: unknown command\n");
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
