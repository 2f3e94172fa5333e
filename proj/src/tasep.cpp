#include "fanlab/tasep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fanlab/errors.hpp"
#include "fanlab/rng.hpp"

namespace fanlab {

namespace {

void check_density(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("density ") + name + " must lie in [0, 1]");
  }
}

OccupancyState blank_state(Site L) {
  OccupancyState s;
  s.L = L;
  s.cells.assign(static_cast<std::size_t>(2 * L + 1), Cell::empty);
  s.flux_first.assign(static_cast<std::size_t>(2 * L), 0);
  s.flux_all.assign(static_cast<std::size_t>(2 * L), 0);
  s.left_front = -L - 1;
  s.right_front = L + 1;
  return s;
}

}  // namespace

std::int64_t OccupancyState::first_class_count() const {
  return std::count(cells.begin(), cells.end(), Cell::first);
}

OccupancyState init_shock(const ShockInitialCondition& ic, Site L, std::uint64_t seed) {
  check_density(ic.lambda, "lambda");
  check_density(ic.rho, "rho");
  if (L < 1) throw std::invalid_argument("init_shock: window half-width L must be >= 1");
  OccupancyState s = blank_state(L);
  const std::uint64_t key = subkey(seed, std::uint64_t{0x1417});
  for (Site x = -L; x <= L; ++x) {
    if (x == 0) continue;
    CounterStream rng(subkey(key, x));
    if (rng.bernoulli(x < 0 ? ic.lambda : ic.rho)) s.at(x) = Cell::first;
  }
  s.at(0) = Cell::second;
  s.second_class_site = 0;
  return s;
}

OccupancyState make_state(const std::vector<Cell>& cells) {
  if (cells.size() < 3 || cells.size() % 2 == 0) {
    throw std::invalid_argument("make_state: need an odd number (>= 3) of cells");
  }
  const auto L = static_cast<Site>(cells.size() / 2);
  OccupancyState s = blank_state(L);
  s.cells = cells;
  const auto n2 = std::count(cells.begin(), cells.end(), Cell::second);
  if (n2 != 1) throw std::invalid_argument("make_state: exactly one second-class cell required");
  s.second_class_site = static_cast<Site>(std::find(cells.begin(), cells.end(), Cell::second) - cells.begin()) - L;
  return s;
}

OccupancyState truncate(const OccupancyState& state, Site radius) {
  OccupancyState s = state;
  for (Site x = -s.L; x <= s.L; ++x) {
    if ((x < -radius || x > radius) && s.at(x) == Cell::first) s.at(x) = Cell::empty;
  }
  return s;
}

Site default_window(double horizon) { return std::max<Site>(1, static_cast<Site>(std::ceil(3.0 * horizon))); }

SiteRange clock_sites(Site L) { return {-L - 1, L}; }

Dynamics::Dynamics(OccupancyState state, const HarrisSystem& clocks)
    : state_(std::move(state)), clocks_(&clocks), queue_(ShiftedClockView(clocks), SiteRange{-state_.L, state_.L - 1}) {
  if (!clocks.sites().contains(clock_sites(state_.L))) {
    throw std::out_of_range("Dynamics: Harris system does not cover the window and its fronts");
  }
  front_time_ = state_.time;
  for (Site x = -state_.L; x < state_.L; ++x) arm_if_active(x);
}

bool Dynamics::active(Site x) const {
  const Cell a = state_.at(x);
  const Cell b = state_.at(x + 1);
  return (a == Cell::first && b != Cell::first) || (a == Cell::second && b == Cell::empty);
}

void Dynamics::arm_if_active(Site x) {
  if (x < -state_.L || x >= state_.L) return;
  if (active(x)) queue_.arm(x, state_.time);
}

void Dynamics::fronts_to(double t) {
  advance_fronts(state_, *clocks_, front_time_, t);
  front_time_ = t;
}

void Dynamics::run_until(double t_end, std::vector<TrajectoryPoint>* trajectory) {
  if (t_end > clocks_->horizon()) {
    throw std::invalid_argument("run_until: t_end beyond the Harris horizon");
  }
  if (t_end < state_.time) throw std::invalid_argument("run_until: t_end before current time");

  while (auto ev = queue_.pop_until(t_end)) {
    const Site x = ev->site;
    if (!active(x)) continue;  // stale entry: bond was emptied or blocked since arming
    if (trajectory) fronts_to(ev->time);
    state_.time = ev->time;
    ++events_;
    Cell& a = state_.at(x);
    Cell& b = state_.at(x + 1);
    const auto bond = static_cast<std::size_t>(x + state_.L);
    bool moved_second = false;
    if (a == Cell::first) {
      ++state_.flux_first[bond];
      if (b == Cell::empty) {
        ++state_.flux_all[bond];
      } else {
        state_.second_class_site = x;  // first-class jumps over it
        moved_second = true;
      }
    } else {
      ++state_.flux_all[bond];
      state_.second_class_site = x + 1;
      moved_second = true;
    }
    std::swap(a, b);
    arm_if_active(x - 1);
    arm_if_active(x);
    arm_if_active(x + 1);
    if (moved_second && trajectory) {
      trajectory->push_back({state_.time, state_.second_class_site, state_.left_front, state_.right_front});
    }
  }
  fronts_to(t_end);
  state_.time = t_end;
}

EvolveResult evolve(OccupancyState state, const HarrisSystem& clocks, double t_end) {
  Dynamics dyn(std::move(state), clocks);
  EvolveResult out{{}, {}};
  dyn.run_until(t_end, &out.trajectory);
  out.state = dyn.state();
  return out;
}

std::pair<Site, Site> advance_fronts(OccupancyState& state, const HarrisSystem& clocks, double from, double to) {
  const Site L = state.L;
  double t = from;
  while (state.left_front <= L) {
    const double e = clocks.next_epoch(state.left_front, t);
    if (e > to) break;
    ++state.left_front;
    t = e;
  }
  t = from;
  while (state.right_front > -L) {
    const double e = clocks.next_epoch(state.right_front - 1, t);
    if (e > to) break;
    --state.right_front;
    t = e;
  }
  return {state.left_front, state.right_front};
}

std::vector<ProfileBin> density_profile(const OccupancyState& state, Site bin_width, double second_class_weight) {
  if (bin_width < 1) throw std::invalid_argument("density_profile: bin_width must be >= 1");
  const SiteRange valid = state.valid_region();
  std::vector<ProfileBin> bins;
  for (Site lo = valid.lo; lo + bin_width - 1 <= valid.hi; lo += bin_width) {
    double mass = 0.0;
    for (Site x = lo; x < lo + bin_width; ++x) {
      const Cell c = state.at(x);
      mass += c == Cell::first ? 1.0 : (c == Cell::second ? second_class_weight : 0.0);
    }
    bins.push_back({static_cast<double>(lo) + 0.5 * static_cast<double>(bin_width - 1),
                    mass / static_cast<double>(bin_width)});
  }
  return bins;
}

}  // namespace fanlab
