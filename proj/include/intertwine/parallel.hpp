#pragma once

#include <functional>

namespace itw {

// Worker count: INTERTWINE_THREADS if set (>=1), otherwise the hardware
// concurrency. All parallel loops write disjoint slots indexed by the loop
// variable, so results do not depend on the thread count.
int worker_count();

void parallel_for(int n, const std::function<void(int)>& body);

} // namespace itw
