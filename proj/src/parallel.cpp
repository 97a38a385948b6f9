#include "mqc/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mqc {

namespace {

std::atomic<int>& workers_setting() {
    static std::atomic<int> value{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
    return value;
}

}  // namespace

int worker_count() { return workers_setting().load(); }

void set_worker_count(int workers) { workers_setting().store(std::max(1, workers)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void parallel_chunks(std::size_t count, std::size_t min_chunk,
                     const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t by_size = std::max<std::size_t>(1, count / std::max<std::size_t>(1, min_chunk));
    const std::size_t chunks = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), by_size);
    if (chunks <= 1) {
        body(0, count);
        return;
    }
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t begin = count * c / chunks;
        const std::size_t end = count * (c + 1) / chunks;
        body(begin, end);
    });
}

}  // namespace mqc
