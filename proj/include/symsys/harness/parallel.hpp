#pragma once

#include <exception>
#include <functional>
#include <vector>

#include <omp.h>

namespace symsys {

/// Runs independent tasks over an OpenMP team. Results land in task order, so
/// the output never depends on scheduling; the exception of the lowest-index
/// failing task is rethrown after the barrier.
template <class R>
std::vector<R> run_tasks(const std::vector<std::function<R()>>& tasks, int threads) {
  std::vector<R> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(team)
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    try {
      results[i] = tasks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace symsys
