#pragma once

#include <cstddef>
#include <exception>

namespace hadfix {

/// Serial is the reference path; Parallel distributes independent work items
/// over OpenMP threads. Both produce identical results.
enum class ExecPolicy { Serial, Parallel };

/// Calls fn(i) for i in [0, n). Work items must be independent and write only
/// to their own slot. The first exception thrown by any item is rethrown.
template <typename Fn>
void for_each_index(std::size_t n, ExecPolicy policy, Fn&& fn) {
    if (policy == ExecPolicy::Serial) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr failure;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(hadfix_for_each_index)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hadfix
