#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace harnack {

/*!
 * Run fn(i) for i in [0, count) on up to `workers` threads.
 *
 * Work is split into contiguous chunks. Callers write results by index, so
 * the output never depends on the worker count. The exception thrown for
 * the smallest failing index is rethrown.
 */
template<class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn)
{
    workers = std::max(1u, workers);
    if (workers == 1 || count < 2)
    {
        for (std::size_t i = 0; i < count; ++i)
        {
            fn(i);
        }
        return;
    }

    std::size_t nthreads = std::min<std::size_t>(workers, count);
    std::size_t chunk = (count + nthreads - 1) / nthreads;
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = count;

    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t)
    {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(count, begin + chunk);
        threads.emplace_back([&, begin, end] {
            for (std::size_t i = begin; i < end; ++i)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (i < error_index)
                    {
                        error_index = i;
                        error = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : threads)
    {
        th.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

} // namespace harnack
