#include <algorithm>
#include <cmath>
#include <random>

#include "molopt/harness.hpp"

namespace molopt {

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t r) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (r + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// One resample mean with its own deterministic generator: the parallel and
// serial paths produce identical streams.
double resample_mean(std::span<const double> values, std::uint64_t seed, int r) {
  std::mt19937_64 rng(mix(seed, static_cast<std::uint64_t>(r)));
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[pick(rng)];
  return s / static_cast<double>(values.size());
}

double percentile(std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  double h = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = static_cast<std::size_t>(std::ceil(h));
  double frac = h - std::floor(h);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

BootstrapResult from_means(std::vector<double> means, double point, double level) {
  BootstrapResult out;
  out.point = point;
  out.level = level;
  std::sort(means.begin(), means.end());
  double alpha = (1.0 - level) / 2.0;
  out.lower = percentile(means, alpha);
  out.upper = percentile(means, 1.0 - alpha);
  return out;
}

}  // namespace

BootstrapResult bootstrap_ci_serial(std::span<const double> values, double level,
                                    int resamples, std::uint64_t seed) {
  if (values.empty()) throw std::runtime_error("bootstrap needs at least one value");
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (int r = 0; r < resamples; ++r)
    means[static_cast<std::size_t>(r)] = resample_mean(values, seed, r);
  return from_means(std::move(means), mean(values), level);
}

BootstrapResult bootstrap_ci(std::span<const double> values, double level, int resamples,
                             std::uint64_t seed) {
  if (values.empty()) throw std::runtime_error("bootstrap needs at least one value");
  std::vector<double> means(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < resamples; ++r)
    means[static_cast<std::size_t>(r)] = resample_mean(values, seed, r);
  return from_means(std::move(means), mean(values), level);
}

AggregateResult aggregate_tasks(const std::vector<TaskMetrics>& tasks, double level,
                                int resamples, std::uint64_t seed) {
  if (tasks.empty()) throw std::runtime_error("aggregate needs at least one task");
  for (const TaskMetrics& t : tasks)
    if (t.per_repetition.empty())
      throw std::runtime_error("task without repetitions: " + t.task_id);

  AggregateResult out;
  for (const TaskMetrics& t : tasks) out.sum += mean(t.per_repetition);

  std::vector<double> sums(static_cast<std::size_t>(resamples));
#pragma omp parallel for schedule(static)
  for (int r = 0; r < resamples; ++r) {
    double s = 0.0;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti)
      s += resample_mean(tasks[ti].per_repetition,
                         mix(seed, 0x517CC1B727220A95ULL * (ti + 1)), r);
    sums[static_cast<std::size_t>(r)] = s;
  }
  out.ci = from_means(std::move(sums), out.sum, level);
  return out;
}

}  // namespace molopt
