// parallel.hpp — static-partition parallel_for for embarrassingly parallel
// grid sweeps; results are combined in index order so runs stay deterministic.
#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace granular {

inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = std::min<std::size_t>(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = std::size_t(w); i < n; i += std::size_t(workers)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace granular
