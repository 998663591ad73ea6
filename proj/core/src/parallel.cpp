#include "srf/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace srf {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("SRF_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  int max_workers) {
    if (n == 0) return;
    int workers = max_workers > 0 ? std::min(max_workers, worker_count()) : worker_count();
    std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    if (chunks <= 1) {
        fn(0, n);
        return;
    }
    std::size_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t b = c * per;
        std::size_t e = std::min(n, b + per);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace srf
