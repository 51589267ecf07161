#pragma once

#include <functional>

namespace planarmvs {

// Runs fn(row) for every row in [begin, end) using `threads` workers (<=1
// means inline execution).  Rows are distributed in fixed contiguous blocks,
// so the set of (row, worker) pairs is deterministic; fn must make each row's
// result independent of execution order.
void parallel_for_rows(int begin, int end, int threads, const std::function<void(int)> &fn);

}  // namespace planarmvs
