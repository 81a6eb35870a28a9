#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levylab {

// Sup over the sorted sample of both one-sided gaps between the empirical CDF
// and the target CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

// Type-7 linear interpolation quantile of a sorted copy, q in [0, 1].
double quantile(std::vector<double> samples, double q);

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

}  // namespace levylab
