#pragma once

#include <cstddef>
#include <functional>

namespace srf {

/// Number of worker threads to use: min(hardware_concurrency, SRF_THREADS).
/// SRF_THREADS is read once per call; values < 1 are treated as 1.
int worker_count();

/// Runs fn(begin, end) over [0, n) split into contiguous chunks, one per
/// worker. Deterministic decomposition: chunk boundaries depend only on n and
/// the worker count, and workers never share output ranges, so results are
/// identical at every parallelism degree for pure per-index work.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  int max_workers = 0);

}  // namespace srf
