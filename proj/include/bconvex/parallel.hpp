#pragma once

#include <cstdint>
#include <functional>

namespace bconvex {

/// Worker-count budget. Defaults to hardware_concurrency, capped by the
/// BCONVEX_THREADS environment variable; always >= 1.
int thread_budget();
void set_thread_budget(int n);

namespace detail {
void parallel_for_impl(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& chunk);
}

/// Runs f(i) for i in [0,n). Work is split into contiguous chunks, so any
/// writes to disjoint slots are identical regardless of worker count.
template <typename F>
void parallel_for(std::int64_t n, F&& f) {
    detail::parallel_for_impl(n, [&f](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) f(i);
    });
}

} // namespace bconvex
