#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace fanlab {

using Site = std::int64_t;

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Closed integer interval [lo, hi]. Empty when lo > hi.
struct SiteRange {
  Site lo = 0;
  Site hi = -1;

  bool empty() const noexcept { return lo > hi; }
  bool contains(Site s) const noexcept { return lo <= s && s <= hi; }
  bool contains(const SiteRange& r) const noexcept { return r.empty() || (lo <= r.lo && r.hi <= hi); }
  std::size_t size() const noexcept { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
  SiteRange shifted(Site k) const noexcept { return {lo + k, hi + k}; }

  friend bool operator==(const SiteRange&, const SiteRange&) = default;
};

// A Harris system: one rate-1 Poisson process per site on (0, horizon].
//
// The clocks are a pure function of (seed, site). Time is cut into unit
// blocks (b, b+1]; the number of epochs a site has in block b is a
// Poisson(1) draw and their positions are sorted uniforms, all taken from a
// counter-based subkey of (seed, site, b). This is an exact rate-1 Poisson
// process, and it lets next_epoch(site, t) jump straight to the block that
// contains t, so processes that skip no-op epochs still see exactly the same
// realisation as processes that look at every epoch.
//
// Instances are immutable and safe to share between threads.
class HarrisSystem {
 public:
  // Throws std::invalid_argument when horizon <= 0 or the range is empty.
  HarrisSystem(std::uint64_t seed, SiteRange sites, double horizon);

  std::uint64_t seed() const noexcept { return seed_; }
  SiteRange sites() const noexcept { return sites_; }
  double horizon() const noexcept { return horizon_; }

  // All epochs of `site` in (0, horizon], strictly increasing.
  // Throws std::out_of_range for sites outside sites().
  std::vector<double> epochs(Site site) const;

  // First epoch of `site` strictly after `after`, or kNever if there is none
  // within the horizon.
  double next_epoch(Site site, double after) const;

  // Number of epochs of `site` in (0, t].
  std::size_t count(Site site, double t) const;

  // A copy in which one site's stream is redrawn from a different subkey.
  // Only meant for negative-control tests of coupling checks.
  HarrisSystem with_resampled_site(Site site, std::uint64_t salt) const;

  // A copy with a larger site range. Existing sites keep their epochs.
  HarrisSystem extended(SiteRange sites) const;

 private:
  static constexpr int kMaxPerBlock = 32;

  struct Block {
    int size = 0;
    double offsets[kMaxPerBlock];
  };

  std::uint64_t site_key(Site site) const noexcept;
  void fill_block(std::uint64_t key, std::int64_t block, Block& out) const noexcept;
  void check_site(Site site) const;

  std::uint64_t seed_;
  SiteRange sites_;
  double horizon_;
  std::vector<std::pair<Site, std::uint64_t>> resampled_;
};

// Clocks seen through an index shift: view site i reads base site i + shift.
class ShiftedClockView {
 public:
  ShiftedClockView(const HarrisSystem& base, Site shift = 0) noexcept : base_(&base), shift_(shift) {}

  const HarrisSystem& base() const noexcept { return *base_; }
  Site shift() const noexcept { return shift_; }
  double horizon() const noexcept { return base_->horizon(); }
  SiteRange sites() const noexcept { return base_->sites().shifted(-shift_); }

  std::vector<double> epochs(Site i) const { return base_->epochs(i + shift_); }
  double next_epoch(Site i, double after) const { return base_->next_epoch(i + shift_, after); }

 private:
  const HarrisSystem* base_;
  Site shift_;
};

ShiftedClockView shifted(const HarrisSystem& h, Site k);
ShiftedClockView shifted(const ShiftedClockView& v, Site k);

// Same as shifted(h, k) but throws std::out_of_range unless every view site
// in `needed` maps into h.sites().
ShiftedClockView shifted(const HarrisSystem& h, Site k, SiteRange needed);

// Global time-ordered merge of the epochs of a set of sites. Only sites that
// have been armed are in the queue; a site stays queued (at most once) until
// its epoch is popped. Ties are broken by site index.
//
// Arming a site whose entry is still pending is a no-op: the pending entry is
// already the first epoch after the current time, because nothing of that site
// has been popped since it was scheduled.
class EpochQueue {
 public:
  struct Event {
    double time;
    Site site;
  };

  EpochQueue(ShiftedClockView clocks, SiteRange sites);

  void arm(Site site, double now);
  bool pending(Site site) const { return pending_[index(site)]; }

  // Earliest queued epoch with time <= t_end, removed from the queue.
  std::optional<Event> pop_until(double t_end);

  std::size_t size() const noexcept { return heap_.size(); }
  const ShiftedClockView& clocks() const noexcept { return clocks_; }

 private:
  std::size_t index(Site site) const { return static_cast<std::size_t>(site - sites_.lo); }

  ShiftedClockView clocks_;
  SiteRange sites_;
  std::vector<Event> heap_;
  std::vector<char> pending_;
};

// Deterministic per-replica seed.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t replica) noexcept;

}  // namespace fanlab
