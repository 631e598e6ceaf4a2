#include "qmx/util.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qmx {

int worker_threads() {
    static const int cached = [] {
        const char* env = std::getenv("QMX_THREADS");
        if (!env) return 1;
        const int v = std::atoi(env);
        return std::max(1, v);
    }();
    return cached;
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk) {
    const std::size_t n = end > begin ? end - begin : 0;
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(worker_threads()), n));
    if (workers <= 1 || n < 1024) {
        if (n) chunk(begin, end);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::size_t per = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = begin + per * static_cast<std::size_t>(w);
        const std::size_t hi = std::min(end, lo + per);
        if (lo >= hi) break;
        pool.emplace_back([&chunk, lo, hi] { chunk(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace qmx
