#include "fanlab/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "fanlab/cli/output.hpp"
#include "fanlab/errors.hpp"
#include "fanlab/experiments.hpp"
#include "fanlab/hydro.hpp"
#include "fanlab/lpp.hpp"
#include "fanlab/server.hpp"
#include "fanlab/stats.hpp"
#include "fanlab/tasep.hpp"

namespace fanlab::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
  std::string command;
  const json& cfg;
  fs::path out;
  bool plot;
  unsigned workers;
  std::uint64_t seed;
  CommandResult result;

  std::string manifest_name() const { return command + ".manifest.json"; }

  CsvTable table(std::vector<std::string> header) const {
    CsvTable t(std::move(header));
    t.comment("manifest: " + manifest_name());
    t.comment("seed: " + fmt(seed));
    return t;
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = out / name;
    write_atomic(p, content);
    result.files.push_back(p);
  }
};

Context make_context(const std::string& command, const json& cfg) {
  Context c{command,
            cfg,
            get_string(cfg, "out"),
            get_bool(cfg, "plot"),
            static_cast<unsigned>(get_int(cfg, "workers", 0)),
            static_cast<std::uint64_t>(get_int(cfg, "seed", 0)),
            {}};
  c.write(c.manifest_name(), manifest_text(command, cfg));
  return c;
}

void need(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// ---------------------------------------------------------------- simulate

void simulate(Context& c) {
  const double lambda = get_double(c.cfg, "lambda"), rho = get_double(c.cfg, "rho");
  const double t = get_double(c.cfg, "t");
  const auto replicas = get_int(c.cfg, "replicas", 1);
  const Site window = get_int(c.cfg, "window", 0);
  need(t > 0.0, "t must be positive");
  need(lambda >= 0 && lambda <= 1 && rho >= 0 && rho <= 1, "densities must lie in [0, 1]");
  const Site L = window > 0 ? window : default_window(t);

  std::vector<EvolveResult> runs(static_cast<std::size_t>(replicas));
  std::vector<std::uint64_t> seeds(runs.size());
  stats::parallel_for(replicas, c.workers, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    seeds[idx] = derive_seed(c.seed, static_cast<std::uint64_t>(r));
    const HarrisSystem clocks(seeds[idx], clock_sites(L), t);
    runs[idx] = evolve(init_shock({lambda, rho}, L, seeds[idx]), clocks, t);
  });

  CsvTable csv = c.table({"experiment", "replica", "seed", "t", "X", "ratio", "left_front", "right_front"});
  std::vector<Series> series;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    auto emit = [&](double time, Site x, Site lf, Site rf) {
      csv.row({"simulate", fmt(static_cast<std::int64_t>(r)), fmt(seeds[r]), fmt(time), fmt(x),
               fmt(time > 0 ? static_cast<double>(x) / time : 0.0), fmt(lf), fmt(rf)});
    };
    emit(0.0, 0, -L - 1, L + 1);
    Series s{"replica " + std::to_string(r), {}};
    for (const auto& p : runs[r].trajectory) {
      emit(p.time, p.x, p.left_front, p.right_front);
      if (p.time >= 1.0) s.points.emplace_back(p.time, static_cast<double>(p.x) / p.time);
    }
    const auto& st = runs[r].state;
    emit(st.time, st.second_class_site, st.left_front, st.right_front);
    series.push_back(std::move(s));
  }
  c.write("simulate.csv", csv.str());
  if (c.plot) c.write("simulate.svg", svg_plot("second-class particle", "t", "X(t)/t", series));
  std::ostringstream msg;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    msg << "replica " << r << ": X(" << t << ") = " << runs[r].state.second_class_site << '\n';
  }
  c.result.summary = msg.str();
}

// ---------------------------------------------------------------- coupling-verify

void coupling_verify(Context& c) {
  const double lambda = get_double(c.cfg, "lambda"), rho = get_double(c.cfg, "rho");
  const auto times = get_double_list(c.cfg, "times");
  const Site L = get_int(c.cfg, "window", 1);
  const auto seeds = get_int(c.cfg, "seeds", 1);
  need(lambda >= 0 && lambda <= 1 && rho >= 0 && rho <= 1, "densities must lie in [0, 1]");
  need(!times.empty(), "times must not be empty");
  need(std::is_sorted(times.begin(), times.end()) && times.front() >= 0.0, "times must be nonnegative and nondecreasing");
  const double t_max = times.back();
  const Site reach = required_k_range(0, t_max).hi;
  const SiteRange queries{-L - 1 + reach, L - reach};
  need(!queries.empty(), "window too small for the largest time");
  const Site hw = interface_half_width(t_max);

  std::vector<CouplingReport> reports(static_cast<std::size_t>(seeds));
  std::vector<std::uint64_t> seed_of(reports.size());
  stats::parallel_for(seeds, c.workers, [&](std::int64_t s) {
    const auto idx = static_cast<std::size_t>(s);
    seed_of[idx] = derive_seed(c.seed, static_cast<std::uint64_t>(s));
    const HeightProcess z0 = height_from_config(init_shock({lambda, rho}, L, seed_of[idx]));
    const HarrisSystem clocks(seed_of[idx], {-L - 1 - hw, L + hw}, std::max(t_max, 1.0));
    reports[idx] = verify_coupling(z0, clocks, clocks, queries, times);
  });

  CsvTable csv = c.table({"seed_index", "seed", "t", "i", "variational", "direct", "match"});
  std::size_t mismatches = 0, rows = 0;
  std::ostringstream msg;
  for (std::size_t s = 0; s < reports.size(); ++s) {
    for (const auto& r : reports[s].rows) {
      csv.row({fmt(static_cast<std::int64_t>(s)), fmt(seed_of[s]), fmt(r.t), fmt(r.i), fmt(r.variational),
               fmt(r.direct), fmt(r.variational == r.direct)});
    }
    rows += reports[s].rows.size();
    mismatches += reports[s].mismatches;
    if (auto bad = reports[s].first_mismatch()) {
      msg << "seed index " << s << ": first mismatch at i = " << bad->i << ", t = " << bad->t << " (variational "
          << bad->variational << ", direct " << bad->direct << ")\n";
    }
  }
  c.write("coupling.csv", csv.str());
  msg << (mismatches == 0 ? "PASS" : "FAIL") << ": " << rows << " queries, " << mismatches << " mismatches\n";
  c.result.summary = msg.str();
  if (mismatches != 0) c.result.exit_code = kAssertion;
}

// ---------------------------------------------------------------- lpp-shape

void lpp_shape(Context& c) {
  const auto ns = get_int_list(c.cfg, "n", 2);
  const auto thetas = get_double_list(c.cfg, "thetas");
  const auto replicas = get_int(c.cfg, "replicas", 2);
  const bool strict = get_bool(c.cfg, "strict");
  CsvTable csv = c.table({"n", "theta", "replicas", "mean", "std", "stderr", "target", "envelope", "seed",
                          "upper_bound_ok"});
  csv.comment("mean, std and envelope refer to T([n theta], n - [n theta]) / n");
  bool all_ok = true;
  std::ostringstream msg;
  for (auto n : ns) {
    for (double theta : thetas) {
      need(theta > 0 && theta < 1 && static_cast<double>(n) * std::min(theta, 1 - theta) >= 1,
           "each theta must lie in (0, 1) with n min(theta, 1 - theta) >= 1");
      const auto row = lpp::limit_shape_experiment(n, theta, replicas, c.seed, c.workers);
      const double env = row.envelope / static_cast<double>(n);
      const bool ok = row.mean <= row.target + 3.0 * row.stderr_ && row.std <= env;
      all_ok = all_ok && ok;
      csv.row({fmt(row.n), fmt(row.theta), fmt(row.replicas), fmt(row.mean), fmt(row.std), fmt(row.stderr_),
               fmt(row.target), fmt(env), fmt(row.seed), fmt(ok)});
      msg << "n = " << n << ", theta = " << theta << ": mean " << row.mean << " (target " << row.target << ")\n";
    }
  }
  c.write("lpp_shape.csv", csv.str());
  c.result.summary = msg.str();
  if (strict && !all_ok) c.result.exit_code = kAssertion;
}

// ---------------------------------------------------------------- hydro-check

void hydro_check(Context& c) {
  const double lambda = get_double(c.cfg, "lambda"), rho = get_double(c.cfg, "rho");
  const auto n = get_int(c.cfg, "n", 1);
  const double mult = get_double(c.cfg, "t_multiplier");
  const auto replicas = get_int(c.cfg, "replicas", 1);
  const double eps1 = get_double(c.cfg, "eps1");
  const auto points = get_int(c.cfg, "profile_points", 2);
  const double step = get_double(c.cfg, "grid_step");
  const bool strict = get_bool(c.cfg, "strict");
  need(lambda >= 0 && lambda <= 1 && rho >= 0 && rho <= 1, "densities must lie in [0, 1]");
  need(mult == 0.0 || (mult > 0.5 && mult <= 2.0), "t_multiplier must be 0 or lie in (1/2, 2]");
  need(eps1 > 0 && eps1 < 1, "eps1 must lie in (0, 1)");
  need(step > 0, "grid_step must be positive");

  std::vector<HydroCompareResult> res(static_cast<std::size_t>(replicas));
  stats::parallel_for(replicas, c.workers, [&](std::int64_t r) {
    res[static_cast<std::size_t>(r)] =
        hydro_compare(lambda, rho, n, mult, derive_seed(c.seed, static_cast<std::uint64_t>(r)), eps1);
  });
  CsvTable csv = c.table({"replica", "seed", "n", "t", "window", "max_deviation", "argmax", "normalized", "pass"});
  std::int64_t passed = 0;
  for (std::size_t r = 0; r < res.size(); ++r) {
    const auto& h = res[r];
    const bool ok = h.normalized <= 1.0;
    passed += ok;
    csv.row({fmt(static_cast<std::int64_t>(r)), fmt(h.seed), fmt(h.n), fmt(h.t), fmt(h.window), fmt(h.max_deviation),
             fmt(h.argmax), fmt(h.normalized), fmt(ok)});
  }
  c.write("hydro.csv", csv.str());

  // Profile of the limit at the same time; the Hopf-Lax column is computed
  // independently from U_0.
  const hydro::RiemannData data{lambda, rho};
  const double t = std::max(mult * static_cast<double>(n), 1.0);
  CsvTable prof = c.table({"x", "u", "U", "U_hopf_lax"});
  prof.comment("t: " + fmt(t) + ", lambda: " + fmt(lambda) + ", rho: " + fmt(rho));
  Series u_series{"u_t", {}};
  const auto U0 = [&](double y) { return hydro::initial_integral(data, y); };
  for (std::int64_t k = 0; k < points; ++k) {
    const double x = -1.5 * t + 3.0 * t * static_cast<double>(k) / static_cast<double>(points - 1);
    const double u = hydro::entropy_density(data, t, x);
    prof.row({fmt(x), fmt(u), fmt(hydro::integrated_solution(data, t, x)), fmt(hydro::hopf_lax(U0, t, x, step * t))});
    u_series.points.emplace_back(x, u);
  }
  c.write("hydro_profile.csv", prof.str());
  if (c.plot) c.write("hydro_profile.svg", svg_plot("entropy solution", "x", "u_t(x)", {u_series}));

  std::ostringstream msg;
  msg << passed << "/" << replicas << " replicas with normalized deviation <= 1\n";
  c.result.summary = msg.str();
  if (strict && passed != replicas) c.result.exit_code = kAssertion;
}

// ---------------------------------------------------------------- sll

void sll(Context& c) {
  SllConfig sc;
  sc.lambda = get_double(c.cfg, "lambda");
  sc.rho = get_double(c.cfg, "rho");
  sc.grid.m = get_int(c.cfg, "m", 16);
  sc.grid.n_min = get_int(c.cfg, "n_min", 0);
  sc.grid.n_max = get_int(c.cfg, "n_max", 0);
  sc.replicas = get_int(c.cfg, "replicas", 1);
  sc.base_seed = c.seed;
  sc.workers = c.workers;
  const double beta = get_double(c.cfg, "beta");
  const double ks_threshold = get_double(c.cfg, "ks_threshold");
  const bool strict = get_bool(c.cfg, "strict");
  need(sc.lambda >= 0 && sc.lambda <= 1 && sc.rho >= 0 && sc.rho <= 1, "densities must lie in [0, 1]");
  need(sc.grid.m >= 16 && (sc.grid.m & (sc.grid.m - 1)) == 0, "m must be a power of two >= 16");
  need(sc.grid.n_min <= sc.grid.n_max && sc.grid.n_max <= 20, "need n_min <= n_max <= 20");
  need(beta > 0 && beta < 1, "beta must lie in (0, 1)");

  const ReplicaStats st = run_sll(sc);

  CsvTable traj = c.table({"experiment", "replica", "seed", "n", "i", "t", "X", "ratio"});
  std::vector<Series> series;
  for (std::int64_t r = 0; r < st.replicas(); ++r) {
    Series s{"replica " + std::to_string(r), {}};
    for (std::int64_t n = sc.grid.n_min; n <= sc.grid.n_max; ++n) {
      for (std::int64_t i = 0; i <= sc.grid.m; ++i) {
        const double t = sc.grid.time(n, i);
        traj.row({"sll", fmt(r), fmt(st.seeds[static_cast<std::size_t>(r)]), fmt(n), fmt(i), fmt(t),
                  fmt(st.X(r, n, i)), fmt(st.ratio(r, n, i))});
        if (i < sc.grid.m) s.points.emplace_back(t, st.ratio(r, n, i));
      }
    }
    if (r < 8) series.push_back(std::move(s));
  }
  c.write("sll_trajectories.csv", traj.str());

  CsvTable sum = c.table({"experiment", "statistic", "value", "threshold", "pass"});
  sum.comment("finite-scale shadows of almost-sure statements; nothing here observes a limit");
  bool ok = true;
  std::ostringstream msg;
  if (sc.lambda > sc.rho) {
    const double ks = uniform_law_ks(st);
    ok = ks <= ks_threshold;
    sum.row({"sll", "ks_uniform_terminal", fmt(ks), fmt(ks_threshold), fmt(ok)});
    msg << "KS distance at t = " << st.times.back() << ": " << ks << " (threshold " << ks_threshold << ") "
        << (ok ? "PASS" : "FAIL") << '\n';
  } else {
    const double med = stats::median(st.terminal_ratios());
    sum.row({"sll", "median_terminal_ratio", fmt(med), fmt(1.0 - 2.0 * sc.rho), ""});
    msg << "median X(T)/T = " << med << " (characteristic speed " << 1.0 - 2.0 * sc.rho << ")\n";
  }
  for (std::int64_t n = sc.grid.n_min; n <= sc.grid.n_max; ++n) {
    const double T = std::ldexp(1.0, static_cast<int>(n));
    sum.row({"sll", "cauchy_gap_T" + std::to_string(static_cast<std::int64_t>(T)), fmt(cauchy_gap(st, T)), "", ""});
  }
  for (const auto& row : dyadic_oscillation(st, beta)) {
    const std::string tag = "_n" + std::to_string(row.n);
    sum.row({"sll", "exceed_fraction" + tag, fmt(row.exceed_fraction), fmt(row.threshold), ""});
    sum.row({"sll", "sup_oscillation_median" + tag, fmt(row.sup_median), fmt(row.budget), ""});
    sum.row({"sll", "step_bound_violations" + tag, fmt(row.step_violations), fmt(row.poisson_reference), ""});
  }
  c.write("sll_summary.csv", sum.str());
  if (c.plot) c.write("sll.svg", svg_plot("X(t)/t on the dyadic grid", "t", "X(t)/t", series));
  c.result.summary = msg.str();
  if (strict && !ok) c.result.exit_code = kAssertion;
}

}  // namespace

CommandResult run_command(const std::string& command, const json& cfg) {
  static const std::map<std::string, void (*)(Context&)> dispatch = {
      {"simulate", simulate}, {"coupling-verify", coupling_verify}, {"lpp-shape", lpp_shape},
      {"hydro-check", hydro_check}, {"sll", sll}};
  const auto it = dispatch.find(command);
  if (it == dispatch.end()) throw ConfigError("unknown command '" + command + "'");
  Context c = make_context(command, cfg);
  it->second(c);
  return std::move(c.result);
}

int main_entry(int argc, char** argv) {
  CLI::App app{"TASEP shock, second-class particle and last-passage laboratory", "fanlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::map<std::string, std::optional<std::string>> config_paths;
  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, std::map<std::string, std::string>> raw;
  for (const auto& name : commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option_function<std::string>(
        "--config", [&, name](const std::string& p) { config_paths[name] = p; }, "JSON configuration file");
    for (const auto& key : schema(name)) {
      sub->add_option_function<std::string>(
          "--" + key.name, [&, name, k = key.name](const std::string& v) { flags[name][k] = v; },
          key.help + " (default " + key.fallback.dump() + ")");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const json cfg = resolve_config(command, config_paths[command], flags[command]);
    const CommandResult res = run_command(command, cfg);
    std::cout << res.summary;
    for (const auto& f : res.files) std::cout << "wrote " << f.string() << '\n';
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kConfig;
  } catch (const GridTooSmall& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return kAssertion;
  } catch (const InternalError& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace fanlab::cli
