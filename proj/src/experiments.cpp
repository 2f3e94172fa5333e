#include "fanlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fanlab/errors.hpp"
#include "fanlab/hydro.hpp"
#include "fanlab/server.hpp"
#include "fanlab/stats.hpp"
#include "fanlab/tasep.hpp"

namespace fanlab {

void DyadicGrid::validate() const {
  if (m < 1 || (m & (m - 1)) != 0) throw std::invalid_argument("dyadic grid: m must be a power of two");
  if (n_min < 0 || n_min > n_max || n_max > 40) throw std::invalid_argument("dyadic grid: need 0 <= n_min <= n_max <= 40");
}

double DyadicGrid::time(std::int64_t n, std::int64_t i) const {
  return std::ldexp(1.0 + static_cast<double>(i) / static_cast<double>(m), static_cast<int>(n));
}

std::vector<double> DyadicGrid::distinct_times() const {
  validate();
  std::vector<double> out;
  for (std::int64_t n = n_min; n <= n_max; ++n) {
    for (std::int64_t i = 0; i < m; ++i) out.push_back(time(n, i));
  }
  out.push_back(horizon());
  return out;
}

std::size_t DyadicGrid::slot(std::int64_t n, std::int64_t i) const {
  if (n < n_min || n > n_max || i < 0 || i > m) throw std::out_of_range("dyadic grid index out of range");
  return static_cast<std::size_t>((n - n_min) * m + i);
}

Site ReplicaStats::X(std::int64_t r, std::int64_t n, std::int64_t i) const {
  return positions.at(static_cast<std::size_t>(r))[config.grid.slot(n, i)];
}

double ReplicaStats::ratio(std::int64_t r, std::int64_t n, std::int64_t i) const {
  return static_cast<double>(X(r, n, i)) / config.grid.time(n, i);
}

double ReplicaStats::ratio_at(std::int64_t r, double t) const {
  const auto it = std::find(times.begin(), times.end(), t);
  if (it == times.end()) throw std::invalid_argument("ratio_at: " + std::to_string(t) + " is not a grid time");
  return static_cast<double>(positions.at(static_cast<std::size_t>(r))[static_cast<std::size_t>(it - times.begin())]) / t;
}

std::vector<double> ReplicaStats::terminal_ratios() const {
  std::vector<double> out;
  out.reserve(positions.size());
  for (const auto& p : positions) out.push_back(static_cast<double>(p.back()) / times.back());
  return out;
}

ReplicaStats run_sll(const SllConfig& config) {
  config.grid.validate();
  if (config.grid.m < 16) throw std::invalid_argument("run_sll: m must be >= 16");
  if (config.replicas < 1) throw std::invalid_argument("run_sll: replicas must be >= 1");
  const double T = config.grid.horizon();
  if (config.window != 0 && static_cast<double>(config.window) < T) {
    throw std::invalid_argument("run_sll: window smaller than the horizon");
  }
  const Site L = config.window != 0 ? config.window : default_window(T);
  const ShockInitialCondition ic{config.lambda, config.rho};

  ReplicaStats out;
  out.config = config;
  out.times = config.grid.distinct_times();
  out.seeds.resize(static_cast<std::size_t>(config.replicas));
  out.positions.resize(static_cast<std::size_t>(config.replicas));
  out.events.resize(static_cast<std::size_t>(config.replicas));

  stats::parallel_for(config.replicas, config.workers, [&](std::int64_t r) {
    const auto idx = static_cast<std::size_t>(r);
    const std::uint64_t seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(r));
    const HarrisSystem clocks(seed, clock_sites(L), T);
    Dynamics dyn(init_shock(ic, L, seed), clocks);
    std::vector<Site> xs;
    xs.reserve(out.times.size());
    for (double t : out.times) {
      dyn.run_until(t);
      const auto& s = dyn.state();
      if (!s.valid_region().contains(s.second_class_site)) {
        throw GridTooSmall("run_sll: second-class particle left the valid region (replica " + std::to_string(r) + ")");
      }
      xs.push_back(s.second_class_site);
    }
    out.seeds[idx] = seed;
    out.positions[idx] = std::move(xs);
    out.events[idx] = dyn.events();
  });
  return out;
}

double uniform_law_ks(const ReplicaStats& stats) {
  const auto& c = stats.config;
  if (!(c.lambda > c.rho)) throw UnsupportedCase("uniform_law_ks: the uniform law needs lambda > rho");
  return stats::ks_uniform(stats.terminal_ratios(), 1.0 - 2.0 * c.lambda, 1.0 - 2.0 * c.rho);
}

double cauchy_gap(const ReplicaStats& stats, double T) {
  std::vector<double> gaps;
  for (std::int64_t r = 0; r < stats.replicas(); ++r) {
    gaps.push_back(std::abs(stats.ratio_at(r, 2.0 * T) - stats.ratio_at(r, T)));
  }
  return stats::median(std::move(gaps));
}

std::vector<OscillationRow> dyadic_oscillation(const ReplicaStats& stats, double beta, double eps) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("dyadic_oscillation: beta must lie in (0, 1)");
  const DyadicGrid& g = stats.config.grid;
  std::vector<OscillationRow> rows;
  for (std::int64_t n = g.n_min; n <= g.n_max; ++n) {
    OscillationRow row{};
    row.n = n;
    row.threshold = std::exp2(-static_cast<double>(n) * (1.0 - beta));
    row.budget = static_cast<double>(g.m) * row.threshold;
    const double dt = std::ldexp(1.0, static_cast<int>(n)) / static_cast<double>(g.m);
    row.step_bound = (1.0 + eps) * dt;
    row.poisson_reference = stats::poisson_tail(dt, static_cast<std::int64_t>(std::floor(row.step_bound)));
    std::vector<double> sups;
    std::int64_t exceed = 0, violations = 0, steps = 0;
    for (std::int64_t r = 0; r < stats.replicas(); ++r) {
      double sup = 0.0;
      for (std::int64_t i = 0; i < g.m; ++i) {
        const double step = std::abs(stats.ratio(r, n, i + 1) - stats.ratio(r, n, i));
        sup = std::max(sup, step);
        exceed += step > row.threshold;
        violations += static_cast<double>(std::abs(stats.X(r, n, i + 1) - stats.X(r, n, i))) > row.step_bound;
        ++steps;
      }
      sups.push_back(sup);
    }
    row.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(steps);
    row.step_violations = static_cast<double>(violations) / static_cast<double>(steps);
    row.sup_median = stats::median(sups);
    row.sup_q90 = stats::quantile(sups, 0.9);
    row.sup_max = *std::max_element(sups.begin(), sups.end());
    rows.push_back(row);
  }
  return rows;
}

Site hydro_window(std::int64_t n, double t) { return 4 * n + static_cast<Site>(std::ceil(t)) + sup_margin(t); }

HydroCompareResult hydro_compare(double lambda, double rho, std::int64_t n, double t_multiplier, std::uint64_t seed,
                                 double eps1) {
  if (n < 1) throw std::invalid_argument("hydro_compare: n must be >= 1");
  if (!(t_multiplier == 0.0 || (t_multiplier > 0.5 && t_multiplier <= 2.0))) {
    throw std::invalid_argument("hydro_compare: t_multiplier must be 0 or lie in (1/2, 2]");
  }
  const hydro::RiemannData data{lambda, rho};
  hydro::validate(data);
  const double t = t_multiplier * static_cast<double>(n);
  const Site L = hydro_window(n, t);
  OccupancyState state = init_shock({lambda, rho}, L, seed);
  std::uint64_t events = 0;
  if (t > 0.0) {
    const HarrisSystem clocks(seed, clock_sites(L), t);
    Dynamics dyn(std::move(state), clocks);
    dyn.run_until(t);
    state = dyn.state();
    events = dyn.events();
  }
  const SiteRange probe{-4 * n, 4 * n};
  if (!state.valid_region().contains(probe)) {
    throw GridTooSmall("hydro_compare: the window edge reached [-4n, 4n]");
  }
  const HeightProcess z = height_from_config(state);
  HydroCompareResult res{n, t, L, 0.0, 0, 0.0, seed, events};
  for (Site y = probe.lo; y <= probe.hi; ++y) {
    const double dev = std::abs(static_cast<double>(z(y)) - hydro::integrated_solution(data, t, static_cast<double>(y)));
    if (dev > res.max_deviation) {
      res.max_deviation = dev;
      res.argmax = y;
    }
  }
  res.normalized = res.max_deviation / std::pow(std::max(t, 1.0), 1.0 - eps1);
  return res;
}

}  // namespace fanlab
