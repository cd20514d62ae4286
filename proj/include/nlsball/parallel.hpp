#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace nlsball {

/// Runs task(i) for i in [0, count) on `workers` threads pulling from a shared
/// counter. Results are returned in index order, so any reduction over them is
/// independent of scheduling. The first exception thrown by a task is rethrown.
template <typename Task>
auto parallel_map(std::size_t count, std::size_t workers, Task&& task)
    -> std::vector<decltype(task(std::size_t{}))>
{
    using Result = decltype(task(std::size_t{}));
    std::vector<std::optional<Result>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                slots[i].emplace(task(i));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);

    std::vector<Result> out;
    out.reserve(count);
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace nlsball
