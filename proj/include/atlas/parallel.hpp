#pragma once

#include <cstddef>
#include <functional>

namespace atlas {

// Worker-pool size: explicit value, else BOUNDED_ATLAS_WORKERS, else
// hardware concurrency.
int default_workers();
int resolve_workers(int requested);

// Runs fn(i) for i in [0, n). Callers must write results into per-index
// slots so the outcome does not depend on the worker count. If any call
// throws, the exception from the lowest index is rethrown after all
// workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

} // namespace atlas
