#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fanlab/harris.hpp"
#include "fanlab/tasep.hpp"

namespace fanlab {

// How the second-class particle enters a height function.
enum class SecondClassAs { empty, particle };

// Server positions z(i) on a finite index range, with
// 0 <= z(i+1) - z(i) <= 1 between neighbours. Particles are the unit
// increments: eta(x) = z(x) - z(x-1).
class HeightProcess {
 public:
  // Throws std::invalid_argument if the values break the exclusion rule or
  // do not match the range.
  HeightProcess(SiteRange sites, std::vector<std::int64_t> values, double time = 0.0);

  SiteRange sites() const noexcept { return sites_; }
  double time() const noexcept { return time_; }
  std::int64_t operator()(Site i) const { return z_[index(i)]; }
  const std::vector<std::int64_t>& values() const noexcept { return z_; }

  bool satisfies_exclusion() const noexcept;

  friend bool operator==(const HeightProcess& a, const HeightProcess& b) {
    return a.sites_ == b.sites_ && a.z_ == b.z_;
  }

 private:
  friend class HeightDynamics;
  friend class PairDynamics;
  std::size_t index(Site i) const { return static_cast<std::size_t>(i - sites_.lo); }

  SiteRange sites_;
  std::vector<std::int64_t> z_;
  double time_;
};

// Height over [-L-1, L] whose increments are the occupancies of `state`.
// Without an anchor, z(0) is the initial anchor 0 minus the current
// through bond (0, 1), which is what the server dynamics would give.
HeightProcess height_from_config(const OccupancyState& state, std::optional<std::int64_t> anchor = std::nullopt,
                                 SecondClassAs second_class_as = SecondClassAs::empty);

// Height for a 0/1 configuration on [first, first + n - 1] that is empty
// everywhere else, over [first - 1 - pad, first + n - 1 + pad], with z(0) = 0.
HeightProcess height_from_occupancy(std::span<const std::uint8_t> eta, Site first, Site pad);

// Occupancies eta(x) = z(x) - z(x-1) for x in (lo, hi].
std::vector<std::uint8_t> config_from_height(const HeightProcess& z);

// Server dynamics: at an epoch of site i, z(i) drops by one if that keeps
// the exclusion rule with both neighbours. The end servers never move, which
// is a closed window in the particle picture.
//
// valid_region() is the set of servers that still agree with the infinite
// system on the same clocks: a walker starts on each end server and steps
// inward at every epoch of the server it would step onto. boundary_touched()
// is the cruder flag that a server next to an end has moved.
class HeightDynamics {
 public:
  HeightDynamics(HeightProcess z, ShiftedClockView clocks);

  void run_until(double t_end);

  const HeightProcess& height() const noexcept { return z_; }
  bool boundary_touched() const noexcept { return touched_; }
  SiteRange valid_region() const noexcept { return {left_front_ + 1, right_front_ - 1}; }
  std::uint64_t events() const noexcept { return events_; }

 private:
  bool movable(Site i) const;
  void arm_if_movable(Site i);
  void fronts_to(double t);

  HeightProcess z_;
  EpochQueue queue_;
  Site left_front_;
  Site right_front_;
  double front_time_;
  bool touched_ = false;
  std::uint64_t events_ = 0;
};

HeightProcess evolve_height(HeightProcess z, ShiftedClockView clocks, double t_end, bool* boundary_touched = nullptr);

// Growth interface xi^k: starts from the wedge xi(i) = max(0, -i) and
// grows by one at site i at the epochs of clock i + k whenever the result
// still has 0 <= xi(i) - xi(i+1) <= 1 on both sides.
class InterfaceProcess {
 public:
  InterfaceProcess(Site label, SiteRange sites);

  static std::int64_t initial(Site i) noexcept { return i < 0 ? -i : 0; }

  Site label() const noexcept { return label_; }
  SiteRange sites() const noexcept { return sites_; }
  double time() const noexcept { return time_; }
  bool edge_touched() const noexcept { return touched_; }

  // Outside the array the wedge value is returned; that is exact as long as
  // edge_touched() is false.
  std::int64_t operator()(Site i) const {
    return sites_.contains(i) ? xi_[static_cast<std::size_t>(i - sites_.lo)] : initial(i);
  }

  bool satisfies_constraint() const noexcept;

 private:
  friend class InterfaceGrowth;

  Site label_;
  SiteRange sites_;
  std::vector<std::int64_t> xi_;
  double time_ = 0.0;
  bool touched_ = false;
};

class InterfaceGrowth {
 public:
  // Throws std::out_of_range if the shifted array leaves the clock range.
  InterfaceGrowth(Site label, const HarrisSystem& clocks, Site half_width);

  void run_until(double t_end);
  const InterfaceProcess& interface() const noexcept { return xi_; }

 private:
  bool growable(Site i) const;
  void arm_if_growable(Site i);
  std::int64_t& at(Site i) { return xi_.xi_[static_cast<std::size_t>(i - xi_.sites_.lo)]; }

  InterfaceProcess xi_;
  EpochQueue queue_;
};

// Padding used around every query of the variational formula:
// ceil(10 sqrt(t) + 10).
Site sup_margin(double t);

// Default interface half-width for a horizon t: ceil(t) + 2 * sup_margin(t).
Site interface_half_width(double t);

InterfaceProcess evolve_interface(Site k, const HarrisSystem& clocks, double t_end, Site half_width);
InterfaceProcess evolve_interface(Site k, const HarrisSystem& clocks, double t_end);

// Memoised xi^k processes for one Harris system. Each label is evolved once
// and advanced as later times are requested.
class InterfaceCache {
 public:
  InterfaceCache(const HarrisSystem& clocks, Site half_width);

  // xi^k_t(i). Throws GridTooSmall if the interface reached its array edge.
  std::int64_t value(Site k, Site i, double t);

  std::size_t labels() const noexcept { return growth_.size(); }

 private:
  const HarrisSystem* clocks_;
  Site half_width_;
  std::map<Site, std::unique_ptr<InterfaceGrowth>> growth_;
};

// Labels that must be included for the supremum at (i, t):
// [i - ceil(t) - sup_margin(t), i + ceil(t) + sup_margin(t)].
SiteRange required_k_range(Site i, double t);

// sup over k in k_range of z0(k) - xi^k_t(i - k).
//
// Throws std::invalid_argument if k_range does not contain
// required_k_range(i, t) or is not inside z0's index range, and GridTooSmall
// if the end labels show growth at their query index (the finite sup is then
// not certified to equal the sup over all labels).
std::int64_t variational_sup(const HeightProcess& z0, const HarrisSystem& clocks, Site i, double t,
                             SiteRange k_range, InterfaceCache* cache = nullptr);

// Two height functions on the same clocks that differ by a unit step at
// step_site: z'(u) = z(u) + 1{u >= step_site}.
struct HeightPair {
  HeightProcess z;
  HeightProcess z_prime;
  Site step_site;

  // Throws std::invalid_argument if z + step is not a valid height.
  static HeightPair from_step(const HeightProcess& z, Site step_site);
};

struct StepPoint {
  double time;
  Site step_site;
};

// Evolves z and z' together, checking after every event that their
// difference is still a single unit step. Returns each change of the step
// location. Throws InternalError if the step invariant breaks.
std::vector<StepPoint> track_second_class(HeightPair& pair, const HarrisSystem& clocks, double t_end);

struct CouplingRow {
  double t;
  Site i;
  std::int64_t variational;
  std::int64_t direct;
};

struct CouplingReport {
  std::vector<CouplingRow> rows;
  std::size_t mismatches = 0;
  bool pass() const noexcept { return mismatches == 0; }
  std::optional<CouplingRow> first_mismatch() const;
};

// Compares the variational formula (interfaces on interface_clocks) with
// direct server evolution of z0 (on direct_clocks) at every query site and
// time. The two clock arguments are the same system except in negative
// controls. Times must be nondecreasing.
CouplingReport verify_coupling(const HeightProcess& z0, const HarrisSystem& interface_clocks,
                               const HarrisSystem& direct_clocks, SiteRange queries, std::span<const double> times);

}  // namespace fanlab
