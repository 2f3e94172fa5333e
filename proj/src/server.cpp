#include "fanlab/server.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fanlab/errors.hpp"

namespace fanlab {

// ---------------------------------------------------------------- heights

HeightProcess::HeightProcess(SiteRange sites, std::vector<std::int64_t> values, double time)
    : sites_(sites), z_(std::move(values)), time_(time) {
  if (sites_.empty() || z_.size() != sites_.size()) {
    throw std::invalid_argument("HeightProcess: values do not match the index range");
  }
  if (!satisfies_exclusion()) {
    throw std::invalid_argument("HeightProcess: increments must lie in {0, 1}");
  }
}

bool HeightProcess::satisfies_exclusion() const noexcept {
  for (std::size_t k = 1; k < z_.size(); ++k) {
    const auto d = z_[k] - z_[k - 1];
    if (d < 0 || d > 1) return false;
  }
  return true;
}

HeightProcess height_from_config(const OccupancyState& state, std::optional<std::int64_t> anchor,
                                 SecondClassAs second_class_as) {
  const Site L = state.L;
  const auto& flux = second_class_as == SecondClassAs::particle ? state.flux_all : state.flux_first;
  const std::int64_t z0 = anchor ? *anchor : -flux[static_cast<std::size_t>(L)];  // bond (0, 1)
  auto occupied = [&](Site x) -> std::int64_t {
    const Cell c = state.at(x);
    return c == Cell::first || (c == Cell::second && second_class_as == SecondClassAs::particle);
  };
  std::vector<std::int64_t> z(static_cast<std::size_t>(2 * L + 2));
  // index of site x is x + L + 1
  z[static_cast<std::size_t>(L + 1)] = z0;
  for (Site x = 1; x <= L; ++x) {
    z[static_cast<std::size_t>(x + L + 1)] = z[static_cast<std::size_t>(x + L)] + occupied(x);
  }
  for (Site x = 0; x > -L - 1; --x) {
    z[static_cast<std::size_t>(x + L)] = z[static_cast<std::size_t>(x + L + 1)] - occupied(x);
  }
  return HeightProcess({-L - 1, L}, std::move(z), state.time);
}

HeightProcess height_from_occupancy(std::span<const std::uint8_t> eta, Site first, Site pad) {
  if (pad < 0) throw std::invalid_argument("height_from_occupancy: negative padding");
  const auto n = static_cast<Site>(eta.size());
  const SiteRange sites{first - 1 - pad, first + n - 1 + pad};
  std::vector<std::int64_t> z(sites.size(), 0);
  for (std::size_t k = 1; k < z.size(); ++k) {
    const Site x = sites.lo + static_cast<Site>(k);
    const Site e = x - first;
    const std::int64_t occ = (e >= 0 && e < n) ? eta[static_cast<std::size_t>(e)] : 0;
    if (occ > 1) throw std::invalid_argument("height_from_occupancy: occupancies must be 0 or 1");
    z[k] = z[k - 1] + occ;
  }
  if (sites.contains(0)) {
    const auto shift = z[static_cast<std::size_t>(-sites.lo)];
    for (auto& v : z) v -= shift;
  }
  return HeightProcess(sites, std::move(z));
}

std::vector<std::uint8_t> config_from_height(const HeightProcess& z) {
  const auto& v = z.values();
  std::vector<std::uint8_t> eta;
  eta.reserve(v.size() - 1);
  for (std::size_t k = 1; k < v.size(); ++k) eta.push_back(static_cast<std::uint8_t>(v[k] - v[k - 1]));
  return eta;
}

// ---------------------------------------------------------------- server dynamics

HeightDynamics::HeightDynamics(HeightProcess z, ShiftedClockView clocks)
    : z_(std::move(z)),
      queue_(clocks, z_.sites()),
      left_front_(z_.sites().lo),
      right_front_(z_.sites().hi),
      front_time_(z_.time_) {
  for (Site i = z_.sites().lo + 1; i < z_.sites().hi; ++i) arm_if_movable(i);
}

bool HeightDynamics::movable(Site i) const {
  const SiteRange r = z_.sites();
  if (i <= r.lo || i >= r.hi) return false;
  const auto c = z_(i);
  return c > z_(i - 1) && z_(i + 1) == c;
}

void HeightDynamics::arm_if_movable(Site i) {
  if (movable(i)) queue_.arm(i, z_.time_);
}

void HeightDynamics::run_until(double t_end) {
  if (t_end > queue_.clocks().horizon()) throw std::invalid_argument("evolve_height: t_end beyond the horizon");
  if (t_end < z_.time_) throw std::invalid_argument("evolve_height: t_end before current time");
  while (auto ev = queue_.pop_until(t_end)) {
    const Site i = ev->site;
    if (!movable(i)) continue;
    z_.time_ = ev->time;
    --z_.z_[z_.index(i)];
    ++events_;
    if (i == z_.sites().lo + 1 || i == z_.sites().hi - 1) touched_ = true;
#ifndef NDEBUG
    if (z_(i) < z_(i - 1) || z_(i + 1) - z_(i) > 1) throw InternalError("server move broke the exclusion rule");
#endif
    arm_if_movable(i - 1);
    arm_if_movable(i);
    arm_if_movable(i + 1);
  }
  fronts_to(t_end);
  z_.time_ = t_end;
}

void HeightDynamics::fronts_to(double t) {
  const auto& clocks = queue_.clocks();
  double s = front_time_;
  while (left_front_ < z_.sites().hi) {
    const double e = clocks.next_epoch(left_front_ + 1, s);
    if (e > t) break;
    ++left_front_;
    s = e;
  }
  s = front_time_;
  while (right_front_ > z_.sites().lo) {
    const double e = clocks.next_epoch(right_front_ - 1, s);
    if (e > t) break;
    --right_front_;
    s = e;
  }
  front_time_ = t;
}

HeightProcess evolve_height(HeightProcess z, ShiftedClockView clocks, double t_end, bool* boundary_touched) {
  HeightDynamics dyn(std::move(z), clocks);
  dyn.run_until(t_end);
  if (boundary_touched) *boundary_touched = dyn.boundary_touched();
  return dyn.height();
}

// ---------------------------------------------------------------- interfaces

InterfaceProcess::InterfaceProcess(Site label, SiteRange sites) : label_(label), sites_(sites) {
  if (sites.size() < 3) throw std::invalid_argument("InterfaceProcess: need at least three sites");
  xi_.reserve(sites.size());
  for (Site i = sites.lo; i <= sites.hi; ++i) xi_.push_back(initial(i));
}

bool InterfaceProcess::satisfies_constraint() const noexcept {
  for (std::size_t k = 1; k < xi_.size(); ++k) {
    const auto d = xi_[k - 1] - xi_[k];
    if (d < 0 || d > 1) return false;
  }
  return true;
}

InterfaceGrowth::InterfaceGrowth(Site label, const HarrisSystem& clocks, Site half_width)
    : xi_(label, {-half_width, half_width}),
      queue_(shifted(clocks, label, SiteRange{-half_width, half_width}), SiteRange{-half_width, half_width}) {
  // Only the corner of the wedge can grow at the start.
  arm_if_growable(0);
}

bool InterfaceGrowth::growable(Site i) const {
  const SiteRange r = xi_.sites_;
  if (i <= r.lo || i >= r.hi) return false;
  const auto c = xi_(i);
  return xi_(i - 1) > c && xi_(i + 1) == c;
}

void InterfaceGrowth::arm_if_growable(Site i) {
  if (growable(i)) queue_.arm(i, xi_.time_);
}

void InterfaceGrowth::run_until(double t_end) {
  if (t_end > queue_.clocks().horizon()) throw std::invalid_argument("evolve_interface: t_end beyond the horizon");
  if (t_end < xi_.time_) throw std::invalid_argument("evolve_interface: t_end before current time");
  while (auto ev = queue_.pop_until(t_end)) {
    const Site i = ev->site;
    if (!growable(i)) continue;
    xi_.time_ = ev->time;
    ++at(i);
    if (i == xi_.sites_.lo + 1 || i == xi_.sites_.hi - 1) xi_.touched_ = true;
    arm_if_growable(i - 1);
    arm_if_growable(i);
    arm_if_growable(i + 1);
  }
  xi_.time_ = t_end;
}

Site sup_margin(double t) { return static_cast<Site>(std::ceil(10.0 * std::sqrt(std::max(t, 0.0)) + 10.0)); }

Site interface_half_width(double t) { return static_cast<Site>(std::ceil(t)) + 2 * sup_margin(t); }

InterfaceProcess evolve_interface(Site k, const HarrisSystem& clocks, double t_end, Site half_width) {
  InterfaceGrowth g(k, clocks, half_width);
  g.run_until(t_end);
  return g.interface();
}

InterfaceProcess evolve_interface(Site k, const HarrisSystem& clocks, double t_end) {
  return evolve_interface(k, clocks, t_end, interface_half_width(t_end));
}

InterfaceCache::InterfaceCache(const HarrisSystem& clocks, Site half_width)
    : clocks_(&clocks), half_width_(half_width) {}

std::int64_t InterfaceCache::value(Site k, Site i, double t) {
  auto& slot = growth_[k];
  if (!slot || slot->interface().time() > t) slot = std::make_unique<InterfaceGrowth>(k, *clocks_, half_width_);
  slot->run_until(t);
  const InterfaceProcess& xi = slot->interface();
  if (xi.edge_touched()) {
    throw GridTooSmall("interface " + std::to_string(k) + " reached the edge of its array by t = " +
                       std::to_string(t));
  }
  return xi(i);
}

SiteRange required_k_range(Site i, double t) {
  const Site reach = static_cast<Site>(std::ceil(t)) + sup_margin(t);
  return {i - reach, i + reach};
}

std::int64_t variational_sup(const HeightProcess& z0, const HarrisSystem& clocks, Site i, double t,
                             SiteRange k_range, InterfaceCache* cache) {
  if (!k_range.contains(required_k_range(i, t))) {
    throw std::invalid_argument("variational_sup: k_range too narrow for site " + std::to_string(i));
  }
  if (!z0.sites().contains(k_range)) {
    throw std::invalid_argument("variational_sup: k_range leaves the initial height's index range");
  }
  std::optional<InterfaceCache> local;
  if (!cache) cache = &local.emplace(clocks, interface_half_width(t));

  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (Site k = k_range.lo; k <= k_range.hi; ++k) {
    best = std::max(best, z0(k) - cache->value(k, i - k, t));
  }
  // Terms beyond the ends are dominated by the end terms as long as the end
  // interfaces have not grown at the queried index.
  for (Site k : {k_range.lo, k_range.hi}) {
    if (cache->value(k, i - k, t) != InterfaceProcess::initial(i - k)) {
      throw GridTooSmall("variational_sup: growth at the end label " + std::to_string(k));
    }
  }
  return best;
}

// ---------------------------------------------------------------- second-class tracker

HeightPair HeightPair::from_step(const HeightProcess& z, Site step_site) {
  if (!z.sites().contains(step_site) || step_site == z.sites().lo) {
    throw std::invalid_argument("HeightPair: step site must be inside the range, right of its first index");
  }
  std::vector<std::int64_t> v = z.values();
  for (Site u = step_site; u <= z.sites().hi; ++u) ++v[static_cast<std::size_t>(u - z.sites().lo)];
  if (z(step_site) != z(step_site - 1)) {
    throw std::invalid_argument("HeightPair: step site is occupied by a first-class particle");
  }
  return HeightPair{z, HeightProcess(z.sites(), std::move(v), z.time()), step_site};
}

// Both heights share one queue: a site is armed when either process can
// move there, and each epoch is applied to both.
class PairDynamics {
 public:
  PairDynamics(HeightPair& pair, const HarrisSystem& clocks)
      : pair_(pair), queue_(ShiftedClockView(clocks), pair.z.sites()) {
    for (Site i = lo() + 1; i < hi(); ++i) arm(i);
  }

  std::vector<StepPoint> run_until(double t_end) {
    if (t_end > queue_.clocks().horizon()) throw std::invalid_argument("track_second_class: t_end beyond horizon");
    std::vector<StepPoint> out;
    while (auto ev = queue_.pop_until(t_end)) {
      const Site i = ev->site;
      const bool mz = movable(pair_.z, i);
      const bool mp = movable(pair_.z_prime, i);
      if (!mz && !mp) continue;
      now_ = ev->time;
      if (mz) --pair_.z.z_[pair_.z.index(i)];
      if (mp) --pair_.z_prime.z_[pair_.z_prime.index(i)];
      if (mz != mp) {
        check_step(i);
        out.push_back({now_, pair_.step_site});
      }
      arm(i - 1);
      arm(i);
      arm(i + 1);
    }
    pair_.z.time_ = pair_.z_prime.time_ = t_end;
    return out;
  }

 private:
  Site lo() const { return pair_.z.sites().lo; }
  Site hi() const { return pair_.z.sites().hi; }

  static bool movable(const HeightProcess& z, Site i) {
    const SiteRange r = z.sites();
    if (i <= r.lo || i >= r.hi) return false;
    const auto c = z(i);
    return c > z(i - 1) && z(i + 1) == c;
  }

  std::int64_t diff(Site u) const { return pair_.z_prime(u) - pair_.z(u); }

  // Only site i changed, so the difference is still a single unit step iff
  // it is 0/1 at i and monotone across i's neighbours.
  void check_step(Site i) {
    const auto d = diff(i);
    const bool ok = (d == 0 || d == 1) && (i == lo() || diff(i - 1) <= d) && (i == hi() || d <= diff(i + 1));
    if (!ok) {
      throw InternalError("height pair lost its unit step at site " + std::to_string(i) + ", t = " +
                          std::to_string(now_));
    }
    pair_.step_site = d == 1 ? i : i + 1;
  }

  void arm(Site i) {
    if (movable(pair_.z, i) || movable(pair_.z_prime, i)) queue_.arm(i, now_);
  }

  HeightPair& pair_;
  EpochQueue queue_;
  double now_ = 0.0;
};

std::vector<StepPoint> track_second_class(HeightPair& pair, const HarrisSystem& clocks, double t_end) {
  if (pair.z.sites() != pair.z_prime.sites()) throw std::invalid_argument("track_second_class: ranges differ");
  for (Site u = pair.z.sites().lo; u <= pair.z.sites().hi; ++u) {
    if (pair.z_prime(u) - pair.z(u) != (u >= pair.step_site ? 1 : 0)) {
      throw std::invalid_argument("track_second_class: pair is not a unit step at step_site");
    }
  }
  PairDynamics dyn(pair, clocks);
  return dyn.run_until(t_end);
}

// ---------------------------------------------------------------- coupling report

std::optional<CouplingRow> CouplingReport::first_mismatch() const {
  for (const auto& r : rows) {
    if (r.variational != r.direct) return r;
  }
  return std::nullopt;
}

CouplingReport verify_coupling(const HeightProcess& z0, const HarrisSystem& interface_clocks,
                               const HarrisSystem& direct_clocks, SiteRange queries, std::span<const double> times) {
  CouplingReport report;
  if (times.empty()) return report;
  const double t_max = *std::max_element(times.begin(), times.end());
  InterfaceCache cache(interface_clocks, interface_half_width(t_max));
  HeightDynamics direct(z0, ShiftedClockView(direct_clocks));
  for (double t : times) {
    direct.run_until(t);
    if (!direct.valid_region().contains(queries)) {
      throw GridTooSmall("verify_coupling: the window edge has reached the query sites by t = " + std::to_string(t));
    }
    for (Site i = queries.lo; i <= queries.hi; ++i) {
      const auto v = variational_sup(z0, interface_clocks, i, t, required_k_range(i, t), &cache);
      const auto d = direct.height()(i);
      report.rows.push_back({t, i, v, d});
      if (v != d) ++report.mismatches;
    }
  }
  return report;
}

}  // namespace fanlab
