#pragma once

#include <cstddef>
#include <functional>

namespace survbma {

/// Runs fn(i) for i in [0, count) on up to n_threads workers. Work items must
/// be independent and write only to their own slots; exceptions are rethrown
/// on the caller thread (the first one by index). With n_threads <= 1 the
/// loop runs inline.
void parallel_for(std::size_t count, int n_threads, const std::function<void(std::size_t)>& fn);

}  // namespace survbma
