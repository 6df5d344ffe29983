#pragma once

#include <functional>

namespace cq {

/// Worker cap: CQ_THREADS when set to a positive integer, otherwise the
/// available hardware parallelism.
int worker_count();

/// Runs fn(0..count-1) across workers. Job indices are handed out dynamically,
/// so callers must make per-job work independent and merge results by index.
void parallel_jobs(long long count, const std::function<void(long long)>& fn);

}  // namespace cq
