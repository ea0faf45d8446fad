#include "contam/aggregate.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contam/error.h"
#include "contam/special_functions.h"

namespace contam {

AggregateResult fisher_combine(std::span<const NamedPValue> p_values,
                               double p_floor) {
  if (p_values.empty())
    throw ConfigError("Fisher combination needs at least one p-value");
  AggregateResult out;
  double sum_log = 0.0;
  for (const auto& [name, p] : p_values) {
    if (!(p > 0.0) || p > 1.0)
      throw ConfigError("p-value for '" + name + "' is outside (0, 1]");
    const double clamped = std::max(p, p_floor);
    out.components.push_back({name, clamped});
    sum_log += std::log(clamped);
  }
  out.fisher_statistic = -2.0 * sum_log;
  out.degrees_of_freedom = 2 * p_values.size();
  out.combined_p = chi2_sf(out.fisher_statistic,
                           static_cast<double>(out.degrees_of_freedom));
  return out;
}

AggregateResult fisher_combine(std::span<const double> p_values,
                               double p_floor) {
  std::vector<NamedPValue> named;
  named.reserve(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i)
    named.push_back({std::to_string(i), p_values[i]});
  return fisher_combine(named, p_floor);
}

AggregateResult filtered_aggregate(const std::map<std::string, double>& target,
                                   std::span<const ControlSet> controls,
                                   double threshold, double p_floor) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw ConfigError("control threshold must lie in (0, 1]");
  std::vector<NamedPValue> kept;
  std::vector<Exclusion> excluded;
  for (const auto& [name, p] : target) {
    std::string reason;
    for (const auto& control : controls) {
      const auto it = control.p_values.find(name);
      if (it == control.p_values.end() || !(it->second < threshold)) continue;
      std::ostringstream os;
      os << (reason.empty() ? "" : "; ") << "control '" << control.name
         << "' p=" << it->second << " < " << threshold;
      reason += os.str();
    }
    if (reason.empty())
      kept.push_back({name, p});
    else
      excluded.push_back({name, reason});
  }
  if (kept.empty())
    throw ConfigError("no exchangeable components remain: all " +
                      std::to_string(target.size()) +
                      " datasets were flagged by a control");
  auto out = fisher_combine(kept, p_floor);
  out.excluded = std::move(excluded);
  out.threshold = threshold;
  return out;
}

std::vector<EcdfPoint> ecdf(std::span<const double> p_values) {
  std::vector<double> sorted(p_values.begin(), p_values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto k = static_cast<double>(sorted.size());
  std::vector<EcdfPoint> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], static_cast<double>(i + 1) / k});
  }
  return out;
}

std::string ecdf_csv(std::span<const EcdfPoint> points) {
  std::ostringstream os;
  os.precision(17);
  os << "p,ecdf\n";
  for (const auto& pt : points) os << pt.x << ',' << pt.f << '\n';
  return os.str();
}

double ks_statistic(std::span<const double> p_values) {
  if (p_values.empty()) throw ConfigError("KS statistic of an empty sample");
  std::vector<double> sorted(p_values.begin(), p_values.end());
  for (auto& v : sorted) v = std::clamp(v, 0.0, 1.0);
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double above = static_cast<double>(i + 1) / n - sorted[i];
    const double below = sorted[i] - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return d;
}

double ks_critical_value_05(std::size_t n) {
  return 1.36 / std::sqrt(static_cast<double>(n));
}

}  // namespace contam
