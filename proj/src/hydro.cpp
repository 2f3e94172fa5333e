#include "fanlab/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fanlab/errors.hpp"
#include "fanlab/lpp.hpp"

namespace fanlab::hydro {

using lpp::flux;
using lpp::g_shape;

void validate(const RiemannData& d) {
  if (!(d.lambda >= 0.0 && d.lambda <= 1.0) || !(d.rho >= 0.0 && d.rho <= 1.0)) {
    throw std::invalid_argument("Riemann densities must lie in [0, 1]");
  }
}

double initial_integral(const RiemannData& d, double x) { return x < 0.0 ? d.lambda * x : d.rho * x; }

double fan_density(const RiemannData& d, double t, double x) {
  validate(d);
  if (d.lambda <= d.rho) throw UnsupportedCase("fan_density: the fan needs lambda > rho");
  if (!(t > 0.0)) throw std::invalid_argument("fan_density: t must be positive");
  if (x <= (1.0 - 2.0 * d.lambda) * t) return d.lambda;
  if (x <= (1.0 - 2.0 * d.rho) * t) return (t - x) / (2.0 * t);
  return d.rho;
}

double entropy_density(const RiemannData& d, double t, double x) {
  if (d.lambda > d.rho) return fan_density(d, t, x);
  validate(d);
  if (!(t > 0.0)) throw std::invalid_argument("entropy_density: t must be positive");
  return x < (1.0 - d.lambda - d.rho) * t ? d.lambda : d.rho;
}

double integrated_solution(const RiemannData& d, double t, double x) {
  validate(d);
  if (t < 0.0) throw std::invalid_argument("integrated_solution: t must be >= 0");
  if (t == 0.0) return initial_integral(d, x);
  if (d.lambda <= d.rho) {
    return std::max(d.lambda * x - t * flux(d.lambda), d.rho * x - t * flux(d.rho));
  }
  if (x <= (1.0 - 2.0 * d.lambda) * t) return d.lambda * x - t * flux(d.lambda);
  if (x <= (1.0 - 2.0 * d.rho) * t) return -(t - x) * (t - x) / (4.0 * t);
  return d.rho * x - t * flux(d.rho);
}

double hopf_lax(const std::function<double(double)>& U0, double t, double x, double h) {
  if (!(t > 0.0)) throw std::invalid_argument("hopf_lax: t must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("hopf_lax: grid step must be positive");
  auto value = [&](double y) { return U0(y) - t * g_shape((x - y) / t); };
  const double a = x - t;
  const auto N = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(2.0 * t / h)));
  const double step = 2.0 * t / static_cast<double>(N);
  double best = value(a), best_y = a;
  for (std::int64_t k = 1; k <= N; ++k) {
    const double y = a + static_cast<double>(k) * step;
    const double v = value(y);
    if (v > best) {
      best = v;
      best_y = y;
    }
  }
  // Golden-section pass on the bracket around the best grid point.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::max(a, best_y - step), hi = std::min(x + t, best_y + step);
  double c = hi - phi * (hi - lo), e = lo + phi * (hi - lo);
  double fc = value(c), fe = value(e);
  for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, std::abs(x)); ++it) {
    if (fc > fe) {
      hi = e;
      e = c;
      fe = fc;
      c = hi - phi * (hi - lo);
      fc = value(c);
    } else {
      lo = c;
      c = e;
      fc = fe;
      e = lo + phi * (hi - lo);
      fe = value(e);
    }
  }
  return std::max({best, fc, fe});
}

ClosenessReport closeness(std::span<const std::uint8_t> eta, std::int64_t first,
                          const std::function<double(double)>& U0, std::int64_t M, std::int64_t n, double v) {
  if (M < 1 || n < 1) throw std::invalid_argument("closeness: M and n must be >= 1");
  const std::int64_t R = M * n;
  const auto last = first + static_cast<std::int64_t>(eta.size()) - 1;
  if (first > -R || last < R) throw std::invalid_argument("closeness: configuration does not cover [-Mn, Mn]");
  const double dn = static_cast<double>(n);
  const double base = U0(-static_cast<double>(M));
  ClosenessReport rep{true, 0.0, -R};
  std::int64_t partial = 0;
  for (std::int64_t x = -R; x <= R; ++x) {
    partial += eta[static_cast<std::size_t>(x - first)];
    const double dev = std::abs(static_cast<double>(partial) - dn * (U0(static_cast<double>(x) / dn) - base));
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.argmax = x;
    }
  }
  rep.close = rep.max_deviation <= v;
  return rep;
}

double maximizer_objective(const RiemannData& d, double x, double s, double v) {
  return integrated_solution(d, 1.0, v) - (s - 1.0) * g_shape((x * s - v) / (s - 1.0));
}

MaximizerReport maximizer_check(const RiemannData& d, double x, double s, std::int64_t m, double grid_step) {
  validate(d);
  if (d.lambda <= d.rho) throw std::invalid_argument("maximizer_check: needs lambda > rho");
  if (m < 1) throw std::invalid_argument("maximizer_check: m must be >= 1");
  if (!(grid_step > 0.0)) throw std::invalid_argument("maximizer_check: grid step must be positive");
  const double dm = static_cast<double>(m);
  if (s < 1.0 + 0.5 / dm || s > 1.0 + 1.0 / dm) throw std::invalid_argument("maximizer_check: s outside [1 + 1/2m, 1 + 1/m]");
  const double delta = 10.0 / dm;
  if (!(x > 1.0 - 2.0 * d.lambda + delta && x < 1.0 - 2.0 * d.rho - delta)) {
    throw std::invalid_argument("maximizer_check: x is not inside the fan by the required margin");
  }
  MaximizerReport rep{};
  rep.target = integrated_solution(d, s, x * s);
  const double w = s - 1.0;

  rep.max_value = -INFINITY;
  const auto n1 = static_cast<std::int64_t>(std::ceil(w / grid_step));
  for (std::int64_t k = -n1; k <= n1; ++k) {
    const double v = x * s + static_cast<double>(k) * grid_step;
    const double val = maximizer_objective(d, x, s, v);
    if (val > rep.max_value) {
      rep.max_value = val;
      rep.argmax = v;
    }
  }
  rep.argmax_ok = std::abs(rep.argmax - x) <= grid_step;

  rep.worst_slack = -INFINITY;
  const auto n2 = static_cast<std::int64_t>(std::ceil(2.0 * w / grid_step)) - 1;
  for (std::int64_t k = -n2; k <= n2; ++k) {
    const double v = x * s + static_cast<double>(k) * grid_step;
    const double slack = maximizer_objective(d, x, s, v) - (rep.target - (v - x) * (v - x));
    rep.worst_slack = std::max(rep.worst_slack, slack);
  }
  rep.gap_ok = rep.worst_slack <= 1e-12;
  return rep;
}

double maximizer_curvature(const RiemannData& d, double x, double s, double h) {
  double worst = -INFINITY;
  for (int k = -4; k <= 4; ++k) {
    const double v = x + k * 0.25 * (s - 1.0);
    const double d2 = (maximizer_objective(d, x, s, v + h) - 2.0 * maximizer_objective(d, x, s, v) +
                       maximizer_objective(d, x, s, v - h)) /
                      (h * h);
    worst = std::max(worst, d2);
  }
  return worst;
}

}  // namespace fanlab::hydro
