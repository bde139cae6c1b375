#pragma once

#include <functional>

namespace rafc {

/// Worker count used by parallel_for; 0 selects the hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, count). Each index is handled exactly once and
/// bodies must only write to index-owned storage.
void parallel_for(int count, const std::function<void(int)> &body);

} // namespace rafc
