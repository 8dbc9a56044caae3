#ifndef GDID_PARALLEL_HPP_
#define GDID_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace gdid {

/// Thread count from GDID_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0: default). Work
/// is handed out by an atomic counter; callers write results into slots keyed
/// by i, so the outcome never depends on scheduling. The first exception
/// thrown by any body is rethrown after all workers join.
void parallel_for(std::int64_t n, unsigned threads, const std::function<void(std::int64_t)>& body);

/// Seed of stream `index` under master `seed` (splitmix64 finalizer of both).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace gdid

#endif  // GDID_PARALLEL_HPP_
