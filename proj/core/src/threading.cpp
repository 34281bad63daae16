#include "survbma/threading.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace survbma {

void parallel_for(std::size_t count, int n_threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(count, n_threads > 1 ? static_cast<std::size_t>(n_threads) : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace survbma
