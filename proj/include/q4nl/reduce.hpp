#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

namespace q4nl {

/// Sum of term(i) for i in [begin, end) using a fixed pairwise tree.
///
/// The tree depends only on the range, so results are bit-reproducible no
/// matter how the caller is scheduled.
template <class Term>
double pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kLeaf = 32;
  if (end - begin <= kLeaf) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(begin, mid, term) + pairwise_sum(mid, end, term);
}

template <class Term>
double pairwise_sum(std::size_t count, const Term& term) {
  return pairwise_sum(std::size_t{0}, count, term);
}

/// Worker cap from the Q4NL_THREADS environment variable (defaults to the
/// hardware concurrency, at least 1).
unsigned worker_threads();

/// Runs body(i) for i in [0, count), distributing indices over at most
/// worker_threads() threads. Bodies must write disjoint data.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace q4nl
