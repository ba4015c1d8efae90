#pragma once

#include <span>
#include <vector>

namespace cge {

double mean(std::span<const double> xs);
double median(std::vector<double> xs);
double pearson(std::span<const double> xs, std::span<const double> ys);
// Pearson correlation of average ranks (ties share their mean rank).
double spearman(std::span<const double> xs, std::span<const double> ys);
std::vector<double> average_ranks(std::span<const double> xs);

}  // namespace cge
