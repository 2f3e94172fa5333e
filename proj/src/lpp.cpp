#include "fanlab/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fanlab/errors.hpp"
#include "fanlab/harris.hpp"
#include "fanlab/rng.hpp"
#include "fanlab/stats.hpp"

namespace fanlab::lpp {

namespace {

constexpr std::uint64_t kWeightDomain = 0x1BB0C0DEULL;

void check_dims(std::int64_t I, std::int64_t J) {
  if (I < 1 || J < 1) throw std::invalid_argument("passage grid dimensions must be >= 1");
}

}  // namespace

std::size_t PassageGrid::index(std::int64_t i, std::int64_t j) const {
  if (!contains(i, j)) {
    throw std::out_of_range("cell (" + std::to_string(i) + ", " + std::to_string(j) + ") outside the passage grid");
  }
  return static_cast<std::size_t>(i * J_ + j);
}

void PassageGrid::fill_times() {
  T_.assign(tau_.size(), 0.0);
  for (std::int64_t i = 0; i < I_; ++i) {
    for (std::int64_t j = 0; j < J_; ++j) {
      const double up = i > 0 ? T_[static_cast<std::size_t>((i - 1) * J_ + j)] : 0.0;
      const double left = j > 0 ? T_[static_cast<std::size_t>(i * J_ + j - 1)] : 0.0;
      T_[static_cast<std::size_t>(i * J_ + j)] = std::max(up, left) + tau_[static_cast<std::size_t>(i * J_ + j)];
    }
  }
}

double cell_weight(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  return CounterStream(subkey(subkey(seed ^ kWeightDomain, i), j)).exponential();
}

PassageGrid sample_grid(std::int64_t I, std::int64_t J, std::uint64_t seed) {
  check_dims(I, J);
  PassageGrid g;
  g.I_ = I;
  g.J_ = J;
  g.seed_ = seed;
  g.tau_.resize(static_cast<std::size_t>(I * J));
  for (std::int64_t i = 0; i < I; ++i) {
    for (std::int64_t j = 0; j < J; ++j) g.tau_[static_cast<std::size_t>(i * J + j)] = cell_weight(seed, i, j);
  }
  g.fill_times();
  return g;
}

PassageGrid grid_from_weights(std::int64_t I, std::int64_t J, std::vector<double> weights) {
  check_dims(I, J);
  if (weights.size() != static_cast<std::size_t>(I * J)) {
    throw std::invalid_argument("grid_from_weights: expected I * J weights");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("grid_from_weights: weights must be positive");
  }
  PassageGrid g;
  g.I_ = I;
  g.J_ = J;
  g.tau_ = std::move(weights);
  g.fill_times();
  return g;
}

double corner_passage_time(std::int64_t i, std::int64_t j, std::uint64_t seed) {
  if (i < 0 || j < 0) throw std::invalid_argument("corner_passage_time: negative corner");
  std::vector<double> row(static_cast<std::size_t>(j + 1), 0.0);
  for (std::int64_t a = 0; a <= i; ++a) {
    double left = 0.0;
    for (std::int64_t b = 0; b <= j; ++b) {
      double& cell = row[static_cast<std::size_t>(b)];
      cell = std::max(cell, left) + cell_weight(seed, a, b);
      left = cell;
    }
  }
  return row.back();
}

bool in_wedge(const WedgePoint& p) noexcept { return p.y >= 1 && p.x >= 1 - p.y; }

UprightPoint wedge_to_upright(const WedgePoint& p) {
  if (!in_wedge(p)) {
    throw std::invalid_argument("(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is not a wedge point");
  }
  return {p.x + p.y - 1, p.y - 1};
}

WedgePoint upright_to_wedge(const UprightPoint& q) {
  if (q.i < 0 || q.j < 0) throw std::invalid_argument("upright point must have nonnegative coordinates");
  return {q.i - q.j, q.j + 1};
}

double wedge_time(const PassageGrid& grid, std::int64_t i, std::int64_t j) {
  if (j <= std::max<std::int64_t>(0, -i)) return 0.0;
  const UprightPoint q = wedge_to_upright({i, j});
  if (!grid.contains(q.i, q.j)) {
    throw GridTooSmall("wedge cell (" + std::to_string(i) + ", " + std::to_string(j) + ") needs upright cell (" +
                       std::to_string(q.i) + ", " + std::to_string(q.j) + ")");
  }
  return grid.time(q.i, q.j);
}

std::int64_t interface_from_grid(const PassageGrid& grid, double t, std::int64_t i) {
  std::int64_t j = std::max<std::int64_t>(0, -i);
  while (wedge_time(grid, i, j + 1) <= t) ++j;
  return j;
}

double gamma_shape(double x, double y) {
  if (y < 0.0 || x + y < 0.0) throw std::invalid_argument("gamma_shape: need y >= 0 and x + y >= 0");
  const double s = std::sqrt(y) + std::sqrt(x + y);
  return s * s;
}

double g_shape(double x) { return 0.25 * (1.0 - x) * (1.0 - x); }

double flux(double u) { return u * (1.0 - u); }

double f_diag(double x) {
  if (x < 0.0 || x > 1.0) throw std::invalid_argument("f_diag: x must lie in [0, 1]");
  return 1.0 + 2.0 * std::sqrt(x * (1.0 - x));
}

double f_diag_second(double x) {
  if (x <= 0.0 || x >= 1.0) throw std::invalid_argument("f_diag_second: x must lie in (0, 1)");
  const double s = x * (1.0 - x);
  const double ds = 1.0 - 2.0 * x;
  return -2.0 / std::sqrt(s) - ds * ds / (2.0 * s * std::sqrt(s));
}

double legendre_check(std::span<const double> u_grid, std::span<const double> r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("legendre_check: empty r grid");
  double worst = 0.0;
  for (double u : u_grid) {
    double inf = std::numeric_limits<double>::infinity();
    for (double r : r_grid) inf = std::min(inf, u * r + g_shape(r));
    worst = std::max(worst, std::abs(flux(u) - inf));
  }
  return worst;
}

namespace {

std::vector<double> scaled_corner_samples(std::int64_t n, double theta, std::int64_t replicas, std::uint64_t seed,
                                          unsigned workers) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0, 1)");
  if (static_cast<double>(n) * std::min(theta, 1.0 - theta) < 1.0) {
    throw std::invalid_argument("n min(theta, 1 - theta) must be >= 1");
  }
  if (replicas < 1) throw std::invalid_argument("replicas must be >= 1");
  const auto i = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * theta));
  const std::int64_t j = n - i;
  std::vector<double> out(static_cast<std::size_t>(replicas));
  stats::parallel_for(replicas, workers, [&](std::int64_t r) {
    out[static_cast<std::size_t>(r)] =
        corner_passage_time(i, j, derive_seed(seed, static_cast<std::uint64_t>(r))) / static_cast<double>(n);
  });
  return out;
}

double envelope(std::int64_t n) {
  const double dn = static_cast<double>(n);
  return 3.0 * std::sqrt(dn) * std::log(dn * dn);
}

}  // namespace

ShapeRow limit_shape_experiment(std::int64_t n, double theta, std::int64_t replicas, std::uint64_t seed,
                                unsigned workers) {
  const auto xs = scaled_corner_samples(n, theta, replicas, seed, workers);
  const double sd = stats::stddev(xs);
  return {n,
          theta,
          replicas,
          stats::mean(xs),
          sd,
          sd / std::sqrt(static_cast<double>(replicas)),
          f_diag(theta),
          envelope(n),
          seed};
}

std::vector<ShapeRow> concentration_experiment(std::span<const std::int64_t> n_list, double theta,
                                               std::int64_t replicas, std::uint64_t seed, unsigned workers) {
  std::vector<ShapeRow> rows;
  for (std::int64_t n : n_list) {
    if (n < 2) throw std::invalid_argument("concentration_experiment: n must be >= 2");
    auto xs = scaled_corner_samples(n, theta, replicas, seed, workers);
    for (double& x : xs) x *= static_cast<double>(n);  // back to raw passage times
    const double sd = stats::stddev(xs);
    rows.push_back({n, theta, replicas, stats::mean(xs), sd, sd / std::sqrt(static_cast<double>(replicas)),
                    f_diag(theta) * static_cast<double>(n), envelope(n), seed});
  }
  return rows;
}

ConcavityReport f_concavity_check(double theta, double delta, std::int64_t samples, std::uint64_t seed) {
  if (!(theta > 0.0 && theta <= 0.5)) throw std::invalid_argument("f_concavity_check: theta must lie in (0, 1/2]");
  if (!(delta > 0.0 && delta < theta)) throw std::invalid_argument("f_concavity_check: delta must lie in (0, theta)");
  ConcavityReport rep{};

  // Central differences; the truncation error is h^2 f''''/12, far below the slack.
  rep.max_second_derivative = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 500; ++k) {
    const double x = k / 1000.0;
    const double h = std::min(1e-4, x / 4.0);
    const double d2 = (f_diag(x + h) - 2.0 * f_diag(x) + f_diag(x - h)) / (h * h);
    rep.max_second_derivative = std::max(rep.max_second_derivative, d2);
  }
  rep.curvature_ok = rep.max_second_derivative <= -4.0 + 1e-3;

  rep.worst_margin = std::numeric_limits<double>::infinity();
  CounterStream rng(subkey(seed, std::uint64_t{0x7A}));
  const double bound = f_diag(theta) - 2.0 * delta * delta;
  std::vector<double> xs, ws;
  for (std::int64_t s = 0; s < samples; ++s) {
    const int k = 1 + static_cast<int>(rng.uniform() * 6.0);
    xs.clear();
    ws.clear();
    double below = 0.0, above = 0.0;  // weighted distances on each side of theta
    for (int q = 0; q < k; ++q) {
      const bool left = rng.uniform() < 0.5;
      const double x = left ? (theta - delta) * rng.uniform() : theta + delta + (1.0 - theta - delta) * rng.uniform();
      const double w = rng.uniform();
      xs.push_back(x);
      ws.push_back(w);
      (x < theta ? below : above) += w * std::abs(x - theta);
    }
    if (below == 0.0 || above == 0.0) {
      ++rep.skipped;  // mean theta is out of reach from one side
      continue;
    }
    // Rescale each side so the weighted mean lands on theta.
    double total = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      ws[q] *= xs[q] < theta ? above : below;
      total += ws[q];
    }
    double mix = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) mix += ws[q] / total * f_diag(xs[q]);
    rep.worst_margin = std::min(rep.worst_margin, bound - mix);
    ++rep.accepted;
  }
  rep.mixture_ok = rep.accepted > 0 && rep.worst_margin >= -1e-12;
  return rep;
}

}  // namespace fanlab::lpp
