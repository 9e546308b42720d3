#include "seit/common.hpp"

#include <atomic>
#include <exception>
#include <mutex>

namespace seit {

namespace detail {
int& thread_count_ref() {
    static int n = 0;
    return n;
}
}  // namespace detail

void set_thread_count(int n) { detail::thread_count_ref() = n < 0 ? 0 : n; }

int thread_count() {
    int n = detail::thread_count_ref();
    if (n > 0) return n;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    int workers = thread_count();
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace seit
