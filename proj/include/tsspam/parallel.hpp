#pragma once

#include <Eigen/Dense>

#include <functional>

namespace tsspam {

/// Number of worker threads: the TSSPAM_THREADS environment variable when
/// set, otherwise the hardware concurrency (at least 1).
int thread_budget();

/// Run fn(0..n_tasks-1) across the thread budget. Tasks must be independent;
/// exceptions are rethrown on the calling thread.
void parallel_for(Eigen::Index n_tasks, const std::function<void(Eigen::Index)>& fn);

}  // namespace tsspam
