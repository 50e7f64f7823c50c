#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace latfrac {

/// How energy reductions are executed.
///
/// With `deterministic` set, items are summed in fixed blocks that are combined by
/// a pairwise tree, so the result is bit-identical for any thread count. Otherwise
/// each thread accumulates a contiguous chunk and the chunks are added in order,
/// which depends on `threads`.
struct ExecPolicy {
  int threads = 1;
  bool deterministic = false;
};

namespace detail {

inline constexpr std::size_t kReduceBlock = 1024;

inline double pairwise_sum(std::span<const double> parts) {
  if (parts.empty()) return 0.0;
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  return pairwise_sum(parts.first(half)) + pairwise_sum(parts.subspan(half));
}

template <class F>
void parallel_for_chunks(std::size_t chunks, int threads, F&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || chunks <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t used = std::min(workers, chunks);
  for (std::size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += used) body(c);
    });
  }
}

}  // namespace detail

/// Sums term(i) for i in [0, count) according to `policy`.
template <class Term>
double reduce_sum(std::size_t count, const ExecPolicy& policy, Term&& term) {
  if (policy.deterministic) {
    const std::size_t blocks = (count + detail::kReduceBlock - 1) / detail::kReduceBlock;
    std::vector<double> partial(blocks, 0.0);
    detail::parallel_for_chunks(blocks, policy.threads, [&](std::size_t b) {
      const std::size_t lo = b * detail::kReduceBlock;
      const std::size_t hi = std::min(count, lo + detail::kReduceBlock);
      double s = 0.0;
      for (std::size_t i = lo; i < hi; ++i) s += term(i);
      partial[b] = s;
    });
    return detail::pairwise_sum(partial);
  }
  const auto workers = static_cast<std::size_t>(std::max(1, policy.threads));
  if (workers == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(workers, 0.0);
  const std::size_t chunk = (count + workers - 1) / workers;
  detail::parallel_for_chunks(workers, policy.threads, [&](std::size_t w) {
    const std::size_t lo = std::min(count, w * chunk);
    const std::size_t hi = std::min(count, lo + chunk);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[w] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace latfrac
