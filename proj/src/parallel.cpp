#include "cqrel/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cqrel {

namespace {

std::size_t env_thread_cap() {
    const char* raw = std::getenv("CQREL_THREADS");
    if (raw == nullptr) return 0;
    char* end = nullptr;
    const long parsed = std::strtol(raw, &end, 10);
    if (end == raw || parsed < 0) return 0;
    return static_cast<std::size_t>(parsed);
}

}  // namespace

std::atomic<std::size_t> g_worker_request{0};

void set_worker_request(std::size_t n) { g_worker_request.store(n); }

std::size_t worker_count(std::size_t requested) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    const std::size_t cap = env_thread_cap();
    if (cap > 0 && cap < n) n = cap;
    const std::size_t global_request = g_worker_request.load();
    if (global_request > 0 && global_request < n) n = global_request;
    if (requested > 0 && requested < n) n = requested;
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::min(worker_count(), n);
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 8));

    auto run = [&]() {
        for (;;) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) return;
            const std::size_t end = std::min(n, begin + chunk);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cqrel
