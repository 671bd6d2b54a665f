#pragma once

// Execution backends for the data-parallel kernels.
//
// Every kernel that fans out over independent indices takes a Backend. The
// Serial path is the reference implementation; the OpenMP path must produce
// bit-identical results (each index is computed independently and any
// reduction happens afterwards, in index order).

#include <cstddef>
#include <exception>
#include <string_view>
#include <utility>
#include <vector>

namespace bflow {

enum class Backend { Serial, OpenMP };

/// Process-wide default, initially OpenMP when compiled with it.
Backend default_backend() noexcept;
void set_default_backend(Backend backend) noexcept;

std::string_view to_string(Backend backend) noexcept;
int max_threads() noexcept;

template <class Body>
void parallel_for(std::size_t count, Body&& body, Backend backend = default_backend()) {
    if (backend == Backend::OpenMP) {
        // Exceptions may not cross the parallel region; keep the one from the
        // lowest index so the serial and parallel paths report the same error.
        const auto n = static_cast<long long>(count);
        std::exception_ptr first;
        long long first_index = n;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < n; ++i) {
            try {
                body(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(bflow_parallel_for_error)
                if (i < first_index) {
                    first_index = i;
                    first = std::current_exception();
                }
            }
        }
        if (first) std::rethrow_exception(first);
        return;
    }
    for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Evaluates body(i) for every index and returns the results in index order.
template <class T, class Body>
std::vector<T> parallel_map(std::size_t count, Body&& body, Backend backend = default_backend()) {
    std::vector<T> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = body(i); }, backend);
    return out;
}

/// Ordered sum: values are produced in parallel, accumulated serially.
template <class Body>
double parallel_sum(std::size_t count, Body&& body, Backend backend = default_backend()) {
    const auto terms = parallel_map<double>(count, std::forward<Body>(body), backend);
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
}

}  // namespace bflow
