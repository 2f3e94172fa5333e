#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace fanlab::hydro {

// Riemann data for u_t + (u(1-u))_x = 0: density lambda left of 0, rho right.
struct RiemannData {
  double lambda = 1.0;
  double rho = 0.0;
};

// Throws std::invalid_argument for densities outside [0, 1].
void validate(const RiemannData& d);

// U_0(x) = lambda x for x < 0, rho x for x > 0.
double initial_integral(const RiemannData& d, double x);

// Rarefaction fan. Throws UnsupportedCase when lambda <= rho and
// std::invalid_argument when t <= 0.
double fan_density(const RiemannData& d, double t, double x);

// Entropy solution for any Riemann data: the fan when lambda > rho, the
// shock moving at speed 1 - lambda - rho when lambda < rho (constant when
// they are equal).
double entropy_density(const RiemannData& d, double t, double x);

// Closed-form U_t(x) with U_t(0) - U_0(0) = -(flux through 0 up to t).
// t = 0 gives U_0.
double integrated_solution(const RiemannData& d, double t, double x);

// sup over y in [x - t, x + t] of U0(y) - t g((x - y) / t): a grid scan with
// step h followed by a golden-section search around the best grid point.
// Throws std::invalid_argument for t <= 0 or h <= 0.
double hopf_lax(const std::function<double(double)>& U0, double t, double x, double h);

struct ClosenessReport {
  bool close;
  double max_deviation;
  std::int64_t argmax;
};

// Compares sum_{y=-Mn}^{x} eta(y) with n (U0(x/n) - U0(-M)) at every integer x
// in [-Mn, Mn]. eta covers [first, first + size). Throws std::invalid_argument
// if it does not cover [-Mn, Mn].
ClosenessReport closeness(std::span<const std::uint8_t> eta, std::int64_t first,
                          const std::function<double(double)>& U0, std::int64_t M, std::int64_t n, double v);

struct MaximizerReport {
  double argmax;
  double max_value;
  double target;       // U_s(xs)
  double worst_slack;  // max over the grid of V(v) - (target - (v - x)^2)
  bool argmax_ok;
  bool gap_ok;
  bool pass() const noexcept { return argmax_ok && gap_ok; }
};

// V(v) = U_1(v) - (s - 1) g((xs - v) / (s - 1)).
double maximizer_objective(const RiemannData& d, double x, double s, double v);

// Maximises V on a grid over |v - xs| <= s - 1 and checks the quadratic gap
// V(v) <= U_s(xs) - (v - x)^2 on a grid over |v - xs| < 2(s - 1).
// Requires lambda > rho, m >= 1, s in [1 + 1/(2m), 1 + 1/m] and
// x in (1 - 2 lambda + 10/m, 1 - 2 rho - 10/m); throws std::invalid_argument
// otherwise.
MaximizerReport maximizer_check(const RiemannData& d, double x, double s, std::int64_t m, double grid_step);

// Largest central second difference of V over a few points around x.
double maximizer_curvature(const RiemannData& d, double x, double s, double h);

}  // namespace fanlab::hydro
