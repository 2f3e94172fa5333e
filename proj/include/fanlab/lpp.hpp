#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fanlab::lpp {

// Up-right last-passage times on [0, I) x [0, J):
//   T(i, j) = max(T(i-1, j), T(i, j-1)) + tau(i, j),
// with T = 0 for out-of-range predecessors.
class PassageGrid {
 public:
  std::int64_t rows() const noexcept { return I_; }
  std::int64_t cols() const noexcept { return J_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double weight(std::int64_t i, std::int64_t j) const { return tau_[index(i, j)]; }
  double time(std::int64_t i, std::int64_t j) const { return T_[index(i, j)]; }
  bool contains(std::int64_t i, std::int64_t j) const noexcept { return i >= 0 && j >= 0 && i < I_ && j < J_; }

 private:
  friend PassageGrid sample_grid(std::int64_t, std::int64_t, std::uint64_t);
  friend PassageGrid grid_from_weights(std::int64_t, std::int64_t, std::vector<double>);

  std::size_t index(std::int64_t i, std::int64_t j) const;
  void fill_times();

  std::int64_t I_ = 0;
  std::int64_t J_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> tau_;  // row-major, i * J + j
  std::vector<double> T_;
};

// Unit-exponential weight of cell (i, j); a pure function of the seed.
double cell_weight(std::uint64_t seed, std::int64_t i, std::int64_t j);

// Throws std::invalid_argument for zero dimensions.
PassageGrid sample_grid(std::int64_t I, std::int64_t J, std::uint64_t seed);

// Weights in row-major order; they must be positive.
PassageGrid grid_from_weights(std::int64_t I, std::int64_t J, std::vector<double> weights);

// T(i, j) for the weights cell_weight(seed, ., .), one row at a time.
double corner_passage_time(std::int64_t i, std::int64_t j, std::uint64_t seed);

// Wedge points (x, y) with y >= 1 and x >= 1 - y map onto the quadrant by
// (x, y) -> (x + y - 1, y - 1).
struct WedgePoint {
  std::int64_t x;
  std::int64_t y;
  friend bool operator==(const WedgePoint&, const WedgePoint&) = default;
};

struct UprightPoint {
  std::int64_t i;
  std::int64_t j;
  friend bool operator==(const UprightPoint&, const UprightPoint&) = default;
};

bool in_wedge(const WedgePoint& p) noexcept;

// Both throw std::invalid_argument off the wedge or the quadrant.
UprightPoint wedge_to_upright(const WedgePoint& p);
WedgePoint upright_to_wedge(const UprightPoint& q);

// Time at which level j of column i of the interface is filled: 0 when
// j <= max(0, -i) (already filled at the start), otherwise the passage time
// of the wedge point (i, j). Throws GridTooSmall if that cell is outside the
// grid.
double wedge_time(const PassageGrid& grid, std::int64_t i, std::int64_t j);

// xi_t(i): the largest j with wedge_time(i, j) <= t. Throws GridTooSmall if
// the grid runs out before a cell with time > t is found.
std::int64_t interface_from_grid(const PassageGrid& grid, double t, std::int64_t i);

// Gamma(x, y) = (sqrt(y) + sqrt(x + y))^2. Throws std::invalid_argument for
// y < 0 or x + y < 0.
double gamma_shape(double x, double y);

// g(x) = (1 - x)^2 / 4, the unit level curve of Gamma.
double g_shape(double x);

// G(u) = u(1 - u).
double flux(double u);

// f(x) = (sqrt(x) + sqrt(1 - x))^2 on [0, 1], and its second derivative on
// (0, 1).
double f_diag(double x);
double f_diag_second(double x);

// max over u_grid of |G(u) - min over r_grid of (u r + g(r))|.
double legendre_check(std::span<const double> u_grid, std::span<const double> r_grid);

struct ShapeRow {
  std::int64_t n;
  double theta;
  std::int64_t replicas;
  double mean;
  double std;
  double stderr_;
  double target;
  double envelope;
  std::uint64_t seed;
};

// Mean of T([n theta], n - [n theta]) / n over replicas. Throws
// std::invalid_argument unless 0 < theta < 1 and n min(theta, 1 - theta) >= 1.
ShapeRow limit_shape_experiment(std::int64_t n, double theta, std::int64_t replicas, std::uint64_t seed,
                                unsigned workers = 0);

// Unnormalised spread of the same passage time for each n, next to the
// deviation scale 3 sqrt(n) log(n^2). n must be >= 2.
std::vector<ShapeRow> concentration_experiment(std::span<const std::int64_t> n_list, double theta,
                                               std::int64_t replicas, std::uint64_t seed, unsigned workers = 0);

struct ConcavityReport {
  double max_second_derivative;  // finite differences over (0, 1/2]
  bool curvature_ok;
  std::int64_t accepted;
  std::int64_t skipped;
  double worst_margin;  // min of f(theta) - 2 delta^2 - sum alpha f(x)
  bool mixture_ok;
  bool pass() const noexcept { return curvature_ok && mixture_ok; }
};

// Checks f'' <= -4 on (0, 1/2] and, for random mixtures sum alpha_i x_i = theta
// with every |x_i - theta| >= delta, that sum alpha_i f(x_i) <= f(theta) - 2 delta^2.
// Throws std::invalid_argument unless 0 < theta <= 1/2 and 0 < delta < theta.
ConcavityReport f_concavity_check(double theta, double delta, std::int64_t samples, std::uint64_t seed);

}  // namespace fanlab::lpp
