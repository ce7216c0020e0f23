#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "molopt/harness.hpp"

namespace molopt {

namespace {

std::string metric_name(int k, int budget) {
  return "top" + std::to_string(k) + "_auc@" + std::to_string(budget);
}

std::string fixed(double v, int places) {
  if (std::isnan(v)) return "NaN";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(places);
  os << v;
  return os.str();
}

}  // namespace

MetricReport replay_metrics(const std::vector<std::string>& paths,
                            const ReplayOptions& options) {
  MetricReport report;
  for (const std::string& path : paths) {
    Trajectory traj;
    try {
      traj = load_trajectory(path);
    } catch (const std::exception& e) {
      report.errors.push_back(e.what());
      continue;
    }
    TraceMetrics tm;
    tm.path = path;
    tm.task_id = traj.task_id.empty() ? path : traj.task_id;
    tm.seed = traj.seed;
    tm.calls = static_cast<int>(traj.records.size());
    double fallback = traj.direction == Direction::Minimize ? kMinimizeFallbackNm : 0.0;
    std::vector<double> scores = aggregates_per_call(traj, /*feasible_only=*/true);

    for (int budget : options.budgets) {
      std::span<const double> window(scores.data(),
                                     std::min<std::size_t>(scores.size(),
                                                           static_cast<std::size_t>(budget)));
      for (int k : options.ks) {
        OptimizationCurve curve = k == 1
                                      ? best_so_far_curve(window, traj.direction, fallback)
                                      : topk_curve(window, k, traj.direction, fallback);
        if (budget > curve.budget) curve = hold_fixed_extend(curve, budget);
        tm.values[metric_name(k, budget)] = auc(curve);
      }
      OptimizationCurve best = best_so_far_curve(window, traj.direction, fallback);
      if (budget > best.budget) best = hold_fixed_extend(best, budget);
      tm.values["best_at_" + std::to_string(budget)] =
          best.values.empty() ? fallback : best.values.back();
    }
    report.per_trace.push_back(std::move(tm));
  }

  // group by task
  std::map<std::string, std::vector<const TraceMetrics*>> by_task;
  for (const TraceMetrics& tm : report.per_trace) by_task[tm.task_id].push_back(&tm);

  std::map<std::string, std::vector<TaskMetrics>> aggregate_inputs;  // metric -> tasks
  for (const auto& [task_id, traces] : by_task) {
    MetricReport::TaskAggregate agg;
    agg.task_id = task_id;
    agg.repetitions = static_cast<int>(traces.size());
    for (const auto& [name, unused] : traces.front()->values) {
      (void)unused;
      std::vector<double> reps;
      for (const TraceMetrics* t : traces) {
        auto it = t->values.find(name);
        if (it != t->values.end()) reps.push_back(it->second);
      }
      agg.values[name] = bootstrap_ci(reps, options.level, options.resamples, options.seed);
      aggregate_inputs[name].push_back({task_id, reps});
    }
    report.per_task.push_back(std::move(agg));
  }

  for (const auto& [name, tasks] : aggregate_inputs) {
    AggregateResult r = aggregate_tasks(tasks, options.level, options.resamples, options.seed);
    BootstrapResult ci = r.ci;
    ci.point = r.sum;
    report.cross_task_sum[name] = ci;
  }
  return report;
}

std::string render_report(const MetricReport& report) {
  std::ostringstream os;
  for (const TraceMetrics& tm : report.per_trace) {
    os << tm.path << " task=" << tm.task_id << " seed=" << tm.seed
       << " calls=" << tm.calls;
    for (const auto& [name, value] : tm.values) os << " " << name << "=" << fixed(value, 4);
    os << "\n";
  }
  for (const auto& task : report.per_task) {
    os << "task " << task.task_id << " (" << task.repetitions << " repetitions)\n";
    for (const auto& [name, ci] : task.values)
      os << "  " << name << " = " << fixed(ci.point, 4) << " [" << fixed(ci.lower, 4) << ", "
         << fixed(ci.upper, 4) << "] @" << ci.level << "\n";
  }
  if (!report.cross_task_sum.empty()) {
    os << "cross-task sums over " << report.per_task.size() << " tasks\n";
    for (const auto& [name, ci] : report.cross_task_sum)
      os << "  sum " << name << " = " << fixed(ci.point, 4) << " [" << fixed(ci.lower, 4)
         << ", " << fixed(ci.upper, 4) << "] @" << ci.level << "\n";
  }
  for (const std::string& err : report.errors) os << "error: " << err << "\n";
  return os.str();
}

std::string report_table(const MetricReport& report) {
  std::ostringstream os;
  os << "scope\ttask_id\tmetric\tvalue\tlower\tupper\n";
  for (const TraceMetrics& tm : report.per_trace)
    for (const auto& [name, value] : tm.values)
      os << "trace:" << tm.path << "\t" << tm.task_id << "\t" << name << "\t"
         << fixed(value, 6) << "\t\t\n";
  for (const auto& task : report.per_task)
    for (const auto& [name, ci] : task.values)
      os << "task\t" << task.task_id << "\t" << name << "\t" << fixed(ci.point, 6) << "\t"
         << fixed(ci.lower, 6) << "\t" << fixed(ci.upper, 6) << "\n";
  for (const auto& [name, ci] : report.cross_task_sum)
    os << "sum\tall\t" << name << "\t" << fixed(ci.point, 6) << "\t" << fixed(ci.lower, 6)
       << "\t" << fixed(ci.upper, 6) << "\n";
  return os.str();
}

}  // namespace molopt
