#include "fanlab/harris.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fanlab/rng.hpp"

namespace fanlab {

namespace {

constexpr std::uint64_t kSiteDomain = 0x5A17E5EEDULL;

bool earlier(const EpochQueue::Event& a, const EpochQueue::Event& b) {
  return a.time < b.time || (a.time == b.time && a.site < b.site);
}

// Heap comparator: the root is the earliest event.
bool later(const EpochQueue::Event& a, const EpochQueue::Event& b) { return earlier(b, a); }

}  // namespace

HarrisSystem::HarrisSystem(std::uint64_t seed, SiteRange sites, double horizon)
    : seed_(seed), sites_(sites), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("HarrisSystem: horizon must be positive and finite");
  }
  if (sites.empty()) {
    throw std::invalid_argument("HarrisSystem: empty site range");
  }
}

std::uint64_t HarrisSystem::site_key(Site site) const noexcept {
  std::uint64_t key = subkey(seed_ ^ kSiteDomain, site);
  for (const auto& [s, salt] : resampled_) {
    if (s == site) key = subkey(key, salt ^ 0xBADC0FFEEULL);
  }
  return key;
}

void HarrisSystem::fill_block(std::uint64_t key, std::int64_t block, Block& out) const noexcept {
  CounterStream rng(subkey(key, block));
  // Poisson(1) by inversion.
  const double u = rng.uniform();
  double p = std::exp(-1.0);
  double cdf = p;
  int n = 0;
  while (u > cdf && n < kMaxPerBlock) {
    ++n;
    p /= n;
    cdf += p;
  }
  out.size = n;
  for (int i = 0; i < n; ++i) out.offsets[i] = rng.uniform();
  std::sort(out.offsets, out.offsets + n);
}

void HarrisSystem::check_site(Site site) const {
  if (!sites_.contains(site)) {
    throw std::out_of_range("HarrisSystem: site " + std::to_string(site) + " outside [" +
                            std::to_string(sites_.lo) + ", " + std::to_string(sites_.hi) + "]");
  }
}

std::vector<double> HarrisSystem::epochs(Site site) const {
  check_site(site);
  const std::uint64_t key = site_key(site);
  std::vector<double> out;
  Block b;
  const auto last = static_cast<std::int64_t>(std::ceil(horizon_));
  for (std::int64_t k = 0; k < last; ++k) {
    fill_block(key, k, b);
    for (int i = 0; i < b.size; ++i) {
      const double e = static_cast<double>(k) + b.offsets[i];
      if (e > horizon_) return out;
      out.push_back(e);
    }
  }
  return out;
}

double HarrisSystem::next_epoch(Site site, double after) const {
  check_site(site);
  if (after >= horizon_) return kNever;
  const std::uint64_t key = site_key(site);
  const auto last = static_cast<std::int64_t>(std::ceil(horizon_));
  Block b;
  for (auto k = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(after))); k < last; ++k) {
    fill_block(key, k, b);
    for (int i = 0; i < b.size; ++i) {
      const double e = static_cast<double>(k) + b.offsets[i];
      if (e > after) return e <= horizon_ ? e : kNever;
    }
  }
  return kNever;
}

std::size_t HarrisSystem::count(Site site, double t) const {
  const auto all = epochs(site);
  return static_cast<std::size_t>(std::upper_bound(all.begin(), all.end(), t) - all.begin());
}

HarrisSystem HarrisSystem::with_resampled_site(Site site, std::uint64_t salt) const {
  check_site(site);
  HarrisSystem copy = *this;
  copy.resampled_.emplace_back(site, salt);
  return copy;
}

HarrisSystem HarrisSystem::extended(SiteRange sites) const {
  if (!sites.contains(sites_)) {
    throw std::invalid_argument("HarrisSystem::extended: new range must contain the old one");
  }
  HarrisSystem copy = *this;
  copy.sites_ = sites;
  return copy;
}

ShiftedClockView shifted(const HarrisSystem& h, Site k) { return ShiftedClockView(h, k); }

ShiftedClockView shifted(const ShiftedClockView& v, Site k) { return ShiftedClockView(v.base(), v.shift() + k); }

ShiftedClockView shifted(const HarrisSystem& h, Site k, SiteRange needed) {
  if (!h.sites().contains(needed.shifted(k))) {
    throw std::out_of_range("shifted: view range shifted by " + std::to_string(k) +
                            " leaves the materialised site range");
  }
  return ShiftedClockView(h, k);
}

EpochQueue::EpochQueue(ShiftedClockView clocks, SiteRange sites)
    : clocks_(clocks), sites_(sites), pending_(sites.size(), 0) {
  heap_.reserve(std::min<std::size_t>(sites.size(), 1 << 16));
}

void EpochQueue::arm(Site site, double now) {
  const std::size_t idx = index(site);
  if (pending_[idx]) return;
  const double t = clocks_.next_epoch(site, now);
  if (t == kNever) return;
  pending_[idx] = 1;
  heap_.push_back({t, site});
  std::push_heap(heap_.begin(), heap_.end(), later);
}

std::optional<EpochQueue::Event> EpochQueue::pop_until(double t_end) {
  if (heap_.empty() || heap_.front().time > t_end) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end(), later);
  const Event e = heap_.back();
  heap_.pop_back();
  pending_[index(e.site)] = 0;
  return e;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replica) noexcept {
  return subkey(base_seed ^ 0xC0FFEE123ULL, replica);
}

}  // namespace fanlab
