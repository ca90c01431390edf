#pragma once

#include <cstddef>
#include <functional>

namespace ghyp {

// Worker count: `hint` if positive, else GHYP_THREADS, else hardware concurrency.
int resolve_workers(int hint);

// Runs body(i) for i in [0, count) on up to `workers` threads. If any call
// throws, the exception from the lowest index is rethrown after all workers
// finish, so failures do not depend on scheduling.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace ghyp
