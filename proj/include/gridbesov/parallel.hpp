#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gb {

enum class Exec { serial, parallel };

/// Worker cap: min(hardware, GRIDBESOV_THREADS). At least 1.
int worker_count();

/// Runs body(i) for i in [0,n). Partitioning is by iteration, so results
/// must not depend on execution order.
template <class Body>
void parallel_for(Exec exec, int64_t n, Body&& body) {
  if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (int64_t i = 0; i < n; ++i) body(i);
    return;
#endif
  }
  for (int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic parallel reduction: a fixed chunk grid (independent of the
// worker count) is summed in parallel, then folded in chunk order. Float
// results are bit-identical to Exec::serial with the same chunking, so the
// serial path uses the same chunk layout.
template <class T, class ChunkSum>
T chunked_reduce(Exec exec, int64_t n, T init, ChunkSum&& chunk_sum) {
  constexpr int64_t kChunks = 64;
  const int64_t chunks = n < kChunks ? (n > 0 ? n : 0) : kChunks;
  if (chunks == 0) return init;
  std::vector<T> partial(static_cast<size_t>(chunks), init);
  parallel_for(exec, chunks, [&](int64_t c) {
    const int64_t lo = n * c / chunks;
    const int64_t hi = n * (c + 1) / chunks;
    partial[static_cast<size_t>(c)] = chunk_sum(lo, hi);
  });
  T acc = init;
  for (const T& p : partial) acc = acc + p;
  return acc;
}

}  // namespace gb
