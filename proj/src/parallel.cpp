#include "sensireach/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace sensireach {

int resolve_thread_count(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("SENSIREACH_THREADS")) {
        try {
            const int parsed = std::stoi(env);
            if (parsed > 0) {
                return parsed;
            }
        } catch (const std::exception&) {
            // fall through to hardware concurrency
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
    if (count == 0) {
        return;
    }
    const std::size_t workers = std::min<std::size_t>(
        std::max(threads, 1), count);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> error_index(workers,
                                         std::numeric_limits<std::size_t>::max());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(count, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    error_index[w] = i;
                    return;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    std::size_t first = std::numeric_limits<std::size_t>::max();
    std::exception_ptr to_throw;
    for (std::size_t w = 0; w < workers; ++w) {
        if (errors[w] && error_index[w] < first) {
            first = error_index[w];
            to_throw = errors[w];
        }
    }
    if (to_throw) {
        std::rethrow_exception(to_throw);
    }
}

}  // namespace sensireach
