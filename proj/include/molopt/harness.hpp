#ifndef MOLOPT_HARNESS_HPP
#define MOLOPT_HARNESS_HPP

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "molopt/agent.hpp"

namespace molopt {

struct OptimizationCurve {
  std::vector<double> values;  // s_1..s_T
  int budget = 0;
  int k = 1;
  Direction direction = Direction::Maximize;
  double fallback = 0.0;
};

// Running best over finite scores; NaN entries carry the previous value and
// positions before the first finite score take the fallback.
OptimizationCurve best_so_far_curve(std::span<const double> scores, Direction direction,
                                    double fallback);

// Mean of the min(k, finite-seen) best scores so far.
OptimizationCurve topk_curve(std::span<const double> scores, int k,
                             Direction direction = Direction::Maximize,
                             double fallback = 0.0);

// Budget-normalized area: mean of s_1..s_T.
double auc(const OptimizationCurve& curve);

// Freeze s_T for calls T+1..T'.
OptimizationCurve hold_fixed_extend(const OptimizationCurve& curve, int extended_budget);

struct BootstrapResult {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

// Seeded percentile bootstrap over the repetition values (OpenMP kernel).
BootstrapResult bootstrap_ci(std::span<const double> values, double level = 0.95,
                             int resamples = 10000, std::uint64_t seed = 0);
// Serial reference path; bit-identical to the parallel kernel.
BootstrapResult bootstrap_ci_serial(std::span<const double> values, double level = 0.95,
                                    int resamples = 10000, std::uint64_t seed = 0);

struct TaskMetrics {
  std::string task_id;
  std::vector<double> per_repetition;
};

struct AggregateResult {
  double sum = 0.0;  // sum of per-task means
  BootstrapResult ci;  // joint bootstrap over repetitions within each task
};
AggregateResult aggregate_tasks(const std::vector<TaskMetrics>& tasks, double level = 0.95,
                                int resamples = 10000, std::uint64_t seed = 0);

// Line-delimited trajectory persistence; schema-versioned header line.
void save_trajectory(const Trajectory& trajectory, const std::string& path);
Trajectory load_trajectory(const std::string& path);

// Per-call aggregate series for metric computation. Records without outcomes
// contribute NaN; with feasible_only, infeasible outcomes do too.
std::vector<double> aggregates_per_call(const Trajectory& trajectory, bool feasible_only);

struct TraceMetrics {
  std::string path;
  std::string task_id;
  unsigned seed = 0;
  int calls = 0;
  std::map<std::string, double> values;  // e.g. "top1_auc@50", "best_at_50"
};

struct MetricReport {
  std::vector<TraceMetrics> per_trace;
  struct TaskAggregate {
    std::string task_id;
    int repetitions = 0;
    std::map<std::string, BootstrapResult> values;
  };
  std::vector<TaskAggregate> per_task;
  std::map<std::string, BootstrapResult> cross_task_sum;
  std::vector<std::string> errors;  // per-file failures; other files still process
};

struct ReplayOptions {
  std::vector<int> budgets = {50};
  std::vector<int> ks = {1};
  double level = 0.95;
  int resamples = 10000;
  std::uint64_t seed = 0;
};

MetricReport replay_metrics(const std::vector<std::string>& paths,
                            const ReplayOptions& options = {});

std::string render_report(const MetricReport& report);
std::string report_table(const MetricReport& report);  // machine-readable TSV

// Curve fallback for minimization traces with no feasible molecule yet (1 mM
// in nM units).
inline constexpr double kMinimizeFallbackNm = 1'000'000.0;

}  // namespace molopt

#endif
