#include <algorithm>
#include <cmath>
#include <set>

#include "molopt/harness.hpp"

namespace molopt {

OptimizationCurve best_so_far_curve(std::span<const double> scores, Direction direction,
                                    double fallback) {
  OptimizationCurve curve;
  curve.budget = static_cast<int>(scores.size());
  curve.k = 1;
  curve.direction = direction;
  curve.fallback = fallback;
  curve.values.reserve(scores.size());
  double best = fallback;
  bool seen = false;
  for (double s : scores) {
    if (std::isfinite(s)) {
      if (!seen || (direction == Direction::Maximize ? s > best : s < best)) {
        best = s;
        seen = true;
      }
    }
    curve.values.push_back(best);
  }
  return curve;
}

OptimizationCurve topk_curve(std::span<const double> scores, int k, Direction direction,
                             double fallback) {
  OptimizationCurve curve;
  curve.budget = static_cast<int>(scores.size());
  curve.k = k;
  curve.direction = direction;
  curve.fallback = fallback;
  std::multiset<double> kept;  // the k best finite scores so far
  double kept_sum = 0.0;
  for (double s : scores) {
    if (std::isfinite(s)) {
      kept.insert(s);
      kept_sum += s;
      if (static_cast<int>(kept.size()) > k) {
        // drop the worst element for the direction
        auto it = direction == Direction::Maximize ? kept.begin() : std::prev(kept.end());
        kept_sum -= *it;
        kept.erase(it);
      }
    }
    curve.values.push_back(kept.empty() ? fallback
                                        : kept_sum / static_cast<double>(kept.size()));
  }
  return curve;
}

double auc(const OptimizationCurve& curve) {
  if (curve.values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : curve.values) sum += v;
  return sum / static_cast<double>(curve.values.size());
}

OptimizationCurve hold_fixed_extend(const OptimizationCurve& curve, int extended_budget) {
  if (extended_budget < curve.budget)
    throw std::runtime_error("hold-fixed extension must not shrink the budget");
  OptimizationCurve out = curve;
  out.budget = extended_budget;
  double last = curve.values.empty() ? curve.fallback : curve.values.back();
  out.values.resize(static_cast<std::size_t>(extended_budget), last);
  return out;
}

std::vector<double> aggregates_per_call(const Trajectory& trajectory, bool feasible_only) {
  std::vector<double> out;
  out.reserve(trajectory.records.size());
  for (const TrajectoryRecord& r : trajectory.records) {
    if (!r.outcome || (feasible_only && !r.outcome->feasible))
      out.push_back(std::numeric_limits<double>::quiet_NaN());
    else
      out.push_back(r.outcome->aggregate);
  }
  return out;
}

}  // namespace molopt
