#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "contam/stats.h"

namespace contam {

struct NamedPValue {
  std::string name;
  double p_value = 1.0;
};

struct Exclusion {
  std::string name;
  std::string reason;
};

struct AggregateResult {
  std::vector<NamedPValue> components;  // included, after p_floor clamping
  std::vector<Exclusion> excluded;
  double fisher_statistic = 0.0;  // -2 sum ln p
  std::size_t degrees_of_freedom = 0;  // 2k
  double combined_p = 1.0;
  double threshold = 0.0;  // control threshold; 0 when no controls
};

// Fisher's method. Inputs below p_floor are raised to p_floor before the log.
// Throws ConfigError on an empty list or values outside (0, 1].
AggregateResult fisher_combine(std::span<const NamedPValue> p_values,
                               double p_floor = kDefaultPFloor);
AggregateResult fisher_combine(std::span<const double> p_values,
                               double p_floor = kDefaultPFloor);

// One negative-control model's p-values, keyed by dataset name.
struct ControlSet {
  std::string name;
  std::map<std::string, double> p_values;
};

// Drops every dataset for which any control has p < threshold, then
// Fisher-combines the target's remaining p-values. Datasets missing from a
// control are not flagged by it. Throws ConfigError when nothing remains or
// threshold is outside (0, 1].
AggregateResult filtered_aggregate(const std::map<std::string, double>& target,
                                   std::span<const ControlSet> controls,
                                   double threshold = 0.05,
                                   double p_floor = kDefaultPFloor);

struct EcdfPoint {
  double x = 0.0;
  double f = 0.0;
};

// Step points F(x) = #{p <= x} / k at every distinct value, ascending.
std::vector<EcdfPoint> ecdf(std::span<const double> p_values);

// Uniform(0,1) reference CDF drawn as its diagonal.
inline std::vector<EcdfPoint> uniform_reference() { return {{0.0, 0.0}, {1.0, 1.0}}; }

// Two-column CSV "p,ecdf".
std::string ecdf_csv(std::span<const EcdfPoint> points);

// D = sup_x |F_emp(x) - x| against Uniform(0,1), exact from order
// statistics. Values are clamped into [0, 1].
double ks_statistic(std::span<const double> p_values);

// Asymptotic critical value of D at level 0.05: 1.36 / sqrt(n).
double ks_critical_value_05(std::size_t n);

}  // namespace contam
