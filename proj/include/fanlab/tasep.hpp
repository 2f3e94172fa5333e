#pragma once

#include <cstdint>
#include <vector>

#include "fanlab/harris.hpp"

namespace fanlab {

enum class Cell : std::uint8_t { empty = 0, first = 1, second = 2 };

// Product Bernoulli initial profile: density lambda on x < 0, rho on x > 0.
struct ShockInitialCondition {
  double lambda = 1.0;
  double rho = 0.0;

  bool decreasing() const noexcept { return lambda > rho; }
  // lambda < rho runs fine but is not the rarefaction-fan regime.
  bool outside_fan_regime() const noexcept { return !decreasing(); }
};

// TASEP configuration on the closed window [-L, L] with exactly one
// second-class particle.
//
// Contamination fronts: left_front is the position of a lone walker started
// at -L-1 that steps right at every epoch of its current site; right_front
// starts at L+1 and steps left at every epoch of the site just to its left.
// Cells strictly between the fronts have not felt the window boundary, so
// they agree with the infinite-volume process driven by the same clocks.
struct OccupancyState {
  Site L = 0;
  std::vector<Cell> cells;  // index x + L
  double time = 0.0;
  Site second_class_site = 0;
  Site left_front = 0;
  Site right_front = 0;
  // Cumulative particle currents across bond (x, x+1), index x + L for
  // x in [-L, L-1]. flux_first counts first-class crossings; flux_all counts
  // crossings of the process that treats the second-class particle as an
  // ordinary one.
  std::vector<std::int64_t> flux_first;
  std::vector<std::int64_t> flux_all;

  SiteRange window() const noexcept { return {-L, L}; }
  SiteRange valid_region() const noexcept { return {left_front + 1, right_front - 1}; }

  Cell at(Site x) const { return cells[static_cast<std::size_t>(x + L)]; }
  Cell& at(Site x) { return cells[static_cast<std::size_t>(x + L)]; }

  std::int64_t first_class_count() const;
};

// Throws std::invalid_argument for densities outside [0, 1] or L < 1.
// Site 0 holds the second-class particle and no first-class particle.
OccupancyState init_shock(const ShockInitialCondition& ic, Site L, std::uint64_t seed);

// State with the given cells (values 0/1/2, exactly one 2) at time 0.
OccupancyState make_state(const std::vector<Cell>& cells);

// eta_0 * 1{|x| <= radius}; the second-class particle is kept.
OccupancyState truncate(const OccupancyState& state, Site radius);

// Window size used when none is given: three times the horizon.
Site default_window(double horizon);

// Clocks covering everything a window-L run touches, fronts included.
SiteRange clock_sites(Site L);

struct TrajectoryPoint {
  double time;
  Site x;
  Site left_front;
  Site right_front;
};

// Event-driven TASEP on the Harris system. Only epochs at bonds where a move
// is possible are scheduled; epochs elsewhere are no-ops under the exclusion
// rule, so skipping them leaves the realisation unchanged.
class Dynamics {
 public:
  // Throws std::out_of_range if the clocks do not cover clock_sites(L).
  Dynamics(OccupancyState state, const HarrisSystem& clocks);

  // Process every epoch in (time, t_end]. Appends a point each time the
  // second-class particle moves. Throws std::invalid_argument if t_end is
  // beyond the horizon or before the current time.
  void run_until(double t_end, std::vector<TrajectoryPoint>* trajectory = nullptr);

  const OccupancyState& state() const noexcept { return state_; }
  std::uint64_t events() const noexcept { return events_; }

 private:
  bool active(Site x) const;
  void arm_if_active(Site x);
  void fronts_to(double t);

  OccupancyState state_;
  const HarrisSystem* clocks_;
  EpochQueue queue_;
  double front_time_ = 0.0;
  std::uint64_t events_ = 0;
};

struct EvolveResult {
  OccupancyState state;
  std::vector<TrajectoryPoint> trajectory;
};

EvolveResult evolve(OccupancyState state, const HarrisSystem& clocks, double t_end);

// Moves both fronts through every epoch in (from, to]. Returns the new
// (left_front, right_front). A front stops when it reaches the far edge of
// the window.
std::pair<Site, Site> advance_fronts(OccupancyState& state, const HarrisSystem& clocks, double from, double to);

struct ProfileBin {
  double center;
  double density;
};

// Empirical density over full bins tiling the valid region, left to right.
// second_class_weight is how much the second-class particle counts (0, 1/2
// or 1 are the usual choices).
std::vector<ProfileBin> density_profile(const OccupancyState& state, Site bin_width,
                                        double second_class_weight = 0.0);

}  // namespace fanlab
