#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fanlab::stats {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 in the denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);
// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> xs, double q);
double median(std::vector<double> xs);

// sup |F_n - F| against the uniform law on [a, b].
double ks_uniform(std::vector<double> xs, double a, double b);
double ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_sf(double x);

// P(N > k) for N ~ Poisson(mean).
double poisson_tail(double mean, std::int64_t k);

// Hardware concurrency with a floor of 1.
unsigned default_workers();

// Calls job(r) for r in [0, count) on up to `workers` threads (0 = default).
// Each job writes only its own slot, so results never depend on the schedule.
// The first exception thrown by a job is rethrown after all threads join.
void parallel_for(std::int64_t count, unsigned workers, const std::function<void(std::int64_t)>& job);

}  // namespace fanlab::stats
