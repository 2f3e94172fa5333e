#pragma once

#include <cstdint>
#include <vector>

#include "fanlab/harris.hpp"

namespace fanlab {

// Times t_i^n = 2^n (1 + i/m), i = 0..m, n = n_min..n_max. Consecutive scales
// share an endpoint: t_m^n = t_0^{n+1}.
struct DyadicGrid {
  std::int64_t m = 16;
  std::int64_t n_min = 4;
  std::int64_t n_max = 10;

  // Throws std::invalid_argument unless m is a power of two and
  // 0 <= n_min <= n_max <= 40.
  void validate() const;

  double time(std::int64_t n, std::int64_t i) const;
  double horizon() const { return time(n_max, m); }

  // Distinct grid times in increasing order.
  std::vector<double> distinct_times() const;
  // Position of t_i^n in distinct_times().
  std::size_t slot(std::int64_t n, std::int64_t i) const;
};

struct SllConfig {
  double lambda = 1.0;
  double rho = 0.0;
  DyadicGrid grid;
  std::int64_t replicas = 100;
  std::uint64_t base_seed = 1;
  unsigned workers = 0;
  Site window = 0;  // 0: three times the horizon
};

// Second-class positions X(t) on the dyadic grid for every replica.
struct ReplicaStats {
  SllConfig config;
  std::vector<double> times;                   // distinct grid times
  std::vector<std::uint64_t> seeds;            // per replica
  std::vector<std::vector<Site>> positions;    // [replica][slot]
  std::vector<std::uint64_t> events;           // per replica

  std::int64_t replicas() const { return static_cast<std::int64_t>(seeds.size()); }
  Site X(std::int64_t r, std::int64_t n, std::int64_t i) const;
  double ratio(std::int64_t r, std::int64_t n, std::int64_t i) const;
  // X(t)/t for a grid time t; throws std::invalid_argument off the grid.
  double ratio_at(std::int64_t r, double t) const;
  std::vector<double> terminal_ratios() const;
};

// Throws std::invalid_argument if m < 16, replicas < 1, or a given window is
// smaller than the horizon; GridTooSmall if the second-class particle ever
// leaves the valid region.
ReplicaStats run_sll(const SllConfig& config);

// KS distance of X(T)/T at the terminal time to U[1 - 2 lambda, 1 - 2 rho].
// Throws UnsupportedCase unless lambda > rho.
double uniform_law_ks(const ReplicaStats& stats);

// Median over replicas of |X(2T)/2T - X(T)/T|; T and 2T must be grid times.
double cauchy_gap(const ReplicaStats& stats, double T);

struct OscillationRow {
  std::int64_t n;
  double threshold;       // 2^{-n(1 - beta)}
  double budget;          // m 2^{-n(1 - beta)}
  double exceed_fraction; // replica-steps with |ratio step| > threshold
  double sup_median;      // per-replica sup over i of the ratio step
  double sup_q90;
  double sup_max;
  double step_bound;          // (1 + eps) 2^n / m
  double step_violations;     // fraction of steps with |X step| > step_bound
  double poisson_reference;   // P(Poisson(2^n / m) > step_bound)
};

// Per-scale oscillation table for n in [n_min, n_max]. eps is the slack in
// the per-step displacement bound.
std::vector<OscillationRow> dyadic_oscillation(const ReplicaStats& stats, double beta, double eps = 0.5);

struct HydroCompareResult {
  std::int64_t n;
  double t;
  Site window;
  double max_deviation;  // max over |y| <= 4n of |z_t(y) - U_t(y)|
  Site argmax;
  double normalized;     // max_deviation / max(t, 1)^{1 - eps1}
  std::uint64_t seed;
  std::uint64_t events;
};

// Runs the particle system to t = t_multiplier * n from Bernoulli shock data
// and compares its height function with the integrated hydrodynamic solution.
// t_multiplier must be 0 or lie in (1/2, 2].
HydroCompareResult hydro_compare(double lambda, double rho, std::int64_t n, double t_multiplier, std::uint64_t seed,
                                 double eps1 = 0.05);

// Window used by hydro_compare: 4n + ceil(t) + ceil(10 sqrt(t) + 10).
Site hydro_window(std::int64_t n, double t);

}  // namespace fanlab
