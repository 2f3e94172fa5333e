#include <doctest.h>

#include <cmath>

#include "fanlab/errors.hpp"
#include "fanlab/experiments.hpp"
#include "fanlab/stats.hpp"

using namespace fanlab;

TEST_CASE("dyadic grid times and slots") {
  const DyadicGrid g{16, 4, 7};
  CHECK(g.time(4, 0) == 16.0);
  CHECK(g.time(4, 8) == 24.0);
  CHECK(g.horizon() == 256.0);
  const auto times = g.distinct_times();
  CHECK(times.size() == 4 * 16 + 1);
  for (std::size_t k = 1; k < times.size(); ++k) CHECK(times[k] > times[k - 1]);
  for (std::int64_t n = 4; n < 7; ++n) {
    CHECK(g.time(n, 16) == g.time(n + 1, 0));
    CHECK(g.slot(n, 16) == g.slot(n + 1, 0));
  }
  for (std::int64_t n = 4; n <= 7; ++n) {
    for (std::int64_t i = 0; i <= 16; ++i) CHECK(times[g.slot(n, i)] == g.time(n, i));
  }
  CHECK_THROWS_AS((DyadicGrid{12, 4, 7}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((DyadicGrid{16, 8, 7}.validate()), std::invalid_argument);
  CHECK_THROWS_AS(g.slot(8, 1), std::out_of_range);
}

TEST_CASE("run_sll validates and is reproducible across worker counts") {
  SllConfig c;
  c.grid = {16, 2, 4};
  c.replicas = 12;
  c.base_seed = 9;
  CHECK_THROWS_AS(run_sll([&] { auto d = c; d.grid.m = 8; return d; }()), std::invalid_argument);
  CHECK_THROWS_AS(run_sll([&] { auto d = c; d.replicas = 0; return d; }()), std::invalid_argument);
  CHECK_THROWS_AS(run_sll([&] { auto d = c; d.window = 10; return d; }()), std::invalid_argument);
  c.workers = 1;
  const auto a = run_sll(c);
  c.workers = 3;
  const auto b = run_sll(c);
  CHECK(a.positions == b.positions);
  CHECK(a.seeds == b.seeds);
  CHECK(a.events == b.events);
  CHECK(a.replicas() == 12);
  CHECK(a.times == c.grid.distinct_times());
  for (std::int64_t r = 0; r < 12; ++r) {
    CHECK(a.X(r, 2, 0) == a.positions[static_cast<std::size_t>(r)][0]);
    CHECK(a.ratio_at(r, 32.0) == a.ratio(r, 4, 16));
  }
  CHECK_THROWS_AS(a.ratio_at(0, 33.0), std::invalid_argument);
}

TEST_CASE("second-class speed stays within t + 10 sqrt(t) log t") {
  SllConfig c;
  c.grid = {16, 4, 9};
  c.replicas = 40;
  const auto s = run_sll(c);
  for (std::int64_t r = 0; r < s.replicas(); ++r) {
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      const double t = s.times[k];
      CHECK(std::abs(static_cast<double>(s.positions[static_cast<std::size_t>(r)][k])) <= t + 10 * std::sqrt(t) * std::log(t));
    }
  }
}

TEST_CASE("flat control: the second-class particle drifts at 1 - 2 rho") {
  SllConfig c;
  c.lambda = 0.3;
  c.rho = 0.3;
  c.grid = {16, 4, 8};
  c.replicas = 200;
  const auto s = run_sll(c);
  CHECK(std::abs(stats::median(s.terminal_ratios()) - 0.4) < 0.1);
  CHECK_THROWS_AS(uniform_law_ks(s), UnsupportedCase);
}

TEST_CASE("dyadic oscillation and Cauchy gaps shrink with the scale") {
  SllConfig c;
  c.grid = {16, 6, 10};
  c.replicas = 100;
  c.base_seed = 3;
  const auto s = run_sll(c);

  const auto rows = dyadic_oscillation(s, 0.9);
  REQUIRE(rows.size() == 5);
  CHECK(rows.back().exceed_fraction <= rows.front().exceed_fraction);
  CHECK(rows.back().sup_median < rows.front().sup_median);
  for (const auto& row : rows) {
    CHECK(row.threshold == doctest::Approx(std::pow(2.0, -0.1 * static_cast<double>(row.n))));
    CHECK(row.budget == doctest::Approx(16 * row.threshold));
    CHECK(row.step_bound == doctest::Approx(1.5 * std::ldexp(1.0, static_cast<int>(row.n)) / 16));
    CHECK(row.sup_median <= row.sup_q90);
    CHECK(row.sup_q90 <= row.sup_max);
    CHECK(row.poisson_reference ==
          doctest::Approx(stats::poisson_tail(std::ldexp(1.0, static_cast<int>(row.n)) / 16,
                                              static_cast<std::int64_t>(std::floor(row.step_bound)))));
    if (row.n >= 8) CHECK(row.step_violations < 0.01);
  }
  CHECK_THROWS_AS(dyadic_oscillation(s, 1.0), std::invalid_argument);

  CHECK(cauchy_gap(s, 1024.0) < cauchy_gap(s, 64.0));
  CHECK(cauchy_gap(s, 1024.0) < 0.05);
  CHECK(uniform_law_ks(s) < 0.15);
}

TEST_CASE("hydro_compare at t = 0 and at t = n") {
  const auto flat = hydro_compare(1.0, 0.0, 64, 0.0, 1);
  CHECK(flat.t == 0.0);
  CHECK(flat.max_deviation == doctest::Approx(1.0));
  CHECK(flat.normalized == flat.max_deviation);
  CHECK(flat.window == hydro_window(64, 0.0));

  const auto r = hydro_compare(1.0, 0.0, 256, 1.0, 2);
  CHECK(r.t == 256.0);
  CHECK(r.window == 4 * 256 + 256 + 170);
  CHECK(std::abs(r.argmax) <= 4 * 256);
  CHECK(r.normalized == doctest::Approx(r.max_deviation / std::pow(256.0, 0.95)));
  CHECK(r.normalized < 0.1);
  CHECK(r.events > 0);
  const auto again = hydro_compare(1.0, 0.0, 256, 1.0, 2);
  CHECK(again.max_deviation == r.max_deviation);

  CHECK_THROWS_AS(hydro_compare(1.0, 0.0, 64, 0.3, 1), std::invalid_argument);
  CHECK_THROWS_AS(hydro_compare(1.0, 0.0, 64, 2.5, 1), std::invalid_argument);
}
