#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace harmcalc {

/// Worker cap from HARMCALC_THREADS (>=1). Defaults to 1.
int worker_cap();

/// Deterministic chunked reduction over the index range [0, n).
///
/// The range is split into fixed-size chunks independent of the worker count.
/// Each chunk is reduced in ascending index order by `per_chunk(begin, end)`,
/// and chunk results are merged in ascending chunk order, so the result is
/// bit-identical for any number of workers.
template <class Acc, class PerChunk, class Merge>
Acc chunked_reduce(std::uint64_t n, Acc init, PerChunk per_chunk, Merge merge,
                   std::uint64_t chunk_size = (1u << 16)) {
    if (n == 0) return init;
    const std::uint64_t n_chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<Acc> partial(static_cast<std::size_t>(n_chunks));

    const int workers = worker_cap();
    if (workers <= 1 || n_chunks == 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t b = c * chunk_size;
            partial[static_cast<std::size_t>(c)] = per_chunk(b, std::min(n, b + chunk_size));
        }
    } else {
        std::atomic<std::uint64_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::uint64_t c = next.fetch_add(1);
                if (c >= n_chunks) break;
                const std::uint64_t b = c * chunk_size;
                partial[static_cast<std::size_t>(c)] = per_chunk(b, std::min(n, b + chunk_size));
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = static_cast<int>(std::min<std::uint64_t>(n_chunks, workers));
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    Acc acc = std::move(init);
    for (auto& p : partial) merge(acc, p);
    return acc;
}

}  // namespace harmcalc
