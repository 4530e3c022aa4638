#include "bconvex/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace bconvex {

namespace {

int initial_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    int budget = std::min(hw, 8);
    if (const char* env = std::getenv("BCONVEX_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) budget = std::min(budget, cap);
    }
    return budget;
}

std::atomic<int>& budget_storage() {
    static std::atomic<int> budget{initial_budget()};
    return budget;
}

} // namespace

int thread_budget() { return budget_storage().load(std::memory_order_relaxed); }

void set_thread_budget(int n) {
    budget_storage().store(std::max(1, n), std::memory_order_relaxed);
}

namespace detail {

void parallel_for_impl(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& chunk) {
    const int workers = std::min<std::int64_t>(thread_budget(), n);
    if (workers <= 1 || n < 4096) {
        chunk(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t per = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * per;
        const std::int64_t hi = std::min<std::int64_t>(lo + per, n);
        if (lo >= hi) break;
        pool.emplace_back([&chunk, lo, hi] { chunk(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

} // namespace detail

} // namespace bconvex
