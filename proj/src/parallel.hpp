#pragma once

#include "rcmdp/operators.hpp"

#include <cstddef>

namespace rcmdp::detail {

// Below this many items the OpenMP fork/join costs more than the loop.
inline constexpr std::ptrdiff_t kMinParallelItems = 64;

template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
    const auto count = static_cast<std::ptrdiff_t>(n);
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#pragma omp parallel for schedule(static) if (count >= kMinParallelItems)
    for (std::ptrdiff_t i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

}  // namespace rcmdp::detail
