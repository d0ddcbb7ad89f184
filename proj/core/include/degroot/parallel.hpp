#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace degroot {

/// Worker count: `requested` when nonzero, else DEGROOT_THREADS, else the
/// hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested = 0);

namespace detail {
void run_indexed(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);
}

/// Evaluates fn(i) for i in [0, count) across worker threads and returns the
/// results in index order. Exceptions from workers are rethrown on the caller.
template <typename Fn>
auto map_replicas(std::size_t count, std::size_t threads, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> out(count);
  detail::run_indexed(count, resolve_thread_count(threads), [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace degroot
