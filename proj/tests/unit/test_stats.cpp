#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "fanlab/stats.hpp"

using namespace fanlab;

TEST_CASE("moments and type-7 quantiles") {
  const std::vector<double> xs{4.0, 1.0, 3.0, 2.0};
  CHECK(stats::mean(xs) == 2.5);
  CHECK(stats::stddev(xs) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stats::stddev(std::vector<double>{7.0}) == 0.0);
  CHECK(stats::median(xs) == 2.5);
  CHECK(stats::quantile(xs, 0.25) == doctest::Approx(1.75));
  CHECK(stats::quantile(xs, 0.0) == 1.0);
  CHECK(stats::quantile(xs, 1.0) == 4.0);
  CHECK(stats::median({5.0, 1.0, 3.0}) == 3.0);
}

TEST_CASE("Kolmogorov-Smirnov distances") {
  CHECK(stats::ks_uniform({0.5}, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(stats::ks_uniform({-0.5, 0.5}, -1.0, 1.0) == doctest::Approx(0.25));
  CHECK(stats::ks_uniform({0.0, 0.5}, -1.0, 1.0) == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int k = 0; k < 100; ++k) grid.push_back((k + 0.5) / 100.0);
  CHECK(stats::ks_uniform(grid, 0.0, 1.0) == doctest::Approx(0.005));
  CHECK(stats::ks_two_sample(grid, grid) == 0.0);
  CHECK(stats::ks_two_sample({0.0, 1.0}, {2.0, 3.0}) == 1.0);
  CHECK(stats::ks_two_sample({1.0, 2.0, 3.0, 4.0}, {3.0, 4.0}) == doctest::Approx(0.5));
  // Ties across samples must not count as a gap.
  CHECK(stats::ks_two_sample({1.0, 1.0, 2.0}, {1.0, 2.0, 2.0}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("Kolmogorov survival function") {
  CHECK(stats::kolmogorov_sf(0.0) == 1.0);
  CHECK(stats::kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(stats::kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(stats::kolmogorov_sf(10.0) < 1e-50);
}

TEST_CASE("Poisson tail against the pmf sum") {
  for (double mean : {0.5, 2.0, 16.0, 64.0}) {
    // Tail summed from the far end so that small tails keep their digits.
    std::vector<double> pmf{std::exp(-mean)};
    for (std::int64_t k = 1; k < 500; ++k) pmf.push_back(pmf.back() * mean / static_cast<double>(k));
    std::vector<double> tail(pmf.size(), 0.0);
    for (std::size_t k = pmf.size() - 1; k-- > 0;) tail[k] = tail[k + 1] + pmf[k + 1];
    for (std::int64_t k = 0; k < 150; ++k) {
      const double expect = tail[static_cast<std::size_t>(k)];
      CHECK(std::abs(stats::poisson_tail(mean, k) - expect) <= 1e-9 * expect + 1e-15);
    }
  }
  CHECK(stats::poisson_tail(3.0, -1) == 1.0);
}

TEST_CASE("parallel_for covers every index once and forwards exceptions") {
  for (unsigned w : {1u, 2u, 5u}) {
    std::vector<int> hits(1000, 0);
    stats::parallel_for(1000, w, [&](std::int64_t r) { hits[static_cast<std::size_t>(r)] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(stats::parallel_for(50, 3,
                                      [&](std::int64_t r) {
                                        ++ran;
                                        if (r == 17) throw std::runtime_error("boom");
                                      }),
                  std::runtime_error);
  CHECK(ran.load() >= 1);
  CHECK(stats::default_workers() >= 1);
}
