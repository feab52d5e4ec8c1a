#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace circsym {

/// Worker count: hardware concurrency, capped by CIRCSYM_THREADS.
inline int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* s = std::getenv("CIRCSYM_THREADS")) {
        int n = std::atoi(s);
        if (n > 0) return n < hw ? n : hw;
    }
    return hw;
}

/// Runs body(chunk_index, begin, end) over [0, n) split into contiguous
/// chunks. Chunk boundaries depend only on n and the worker count, so
/// per-chunk results can be reduced in a fixed order.
template <class F>
void chunked_for(long long n, F&& body) {
    int workers = worker_count();
    if (n <= 0) return;
    if (workers <= 1 || n < 4 * workers) {
        body(0, 0LL, n);
        return;
    }
    long long per = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int c = 0; c < workers; ++c) {
        long long b = c * per, e = std::min(n, b + per);
        if (b >= e) break;
        pool.emplace_back([&body, c, b, e] { body(c, b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace circsym
