#pragma once

#include <cstddef>
#include <functional>

namespace krossfuse {

/// Worker count used by parallel_for. Defaults to $KROSSFUSE_THREADS, or 1.
std::size_t thread_count() noexcept;
void set_thread_count(std::size_t n) noexcept;

/// Runs body(i) for i in [0, n) over contiguous static chunks. Each index is
/// handled by exactly one worker, so results never depend on the split as
/// long as body(i) only writes state owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace krossfuse
