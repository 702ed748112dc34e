/**
 * random.hpp — seeded generators and deterministic sharding.
 *
 * Work is cut into fixed-size shards; shard k draws from a generator seeded
 * with derive_seed(master, k). The shard layout does not depend on the
 * number of worker threads, so results are bit-identical for any --threads.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

namespace bellreal {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for sub-task `index` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// mt19937_64 with a portable [0,1) conversion (53 high bits).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(shard_index, begin, end) over [0, count) in shards of
/// `shard_size` items on up to `threads` workers. Results come back in shard
/// order. If shards throw, the exception of the lowest-index failing shard is
/// rethrown after all workers finish.
template <typename Fn>
auto run_sharded(std::uint64_t count, std::uint64_t shard_size, unsigned threads, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::uint64_t, std::uint64_t, std::uint64_t>> {
  using Result = std::invoke_result_t<Fn&, std::uint64_t, std::uint64_t, std::uint64_t>;
  shard_size = std::max<std::uint64_t>(shard_size, 1);
  const std::uint64_t shards = (count + shard_size - 1) / shard_size;

  std::vector<std::optional<Result>> slots(shards);
  std::vector<std::exception_ptr> errors(shards);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t k = next.fetch_add(1); k < shards; k = next.fetch_add(1)) {
      const std::uint64_t begin = k * shard_size;
      const std::uint64_t end = std::min(count, begin + shard_size);
      try {
        slots[k].emplace(fn(k, begin, end));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(threads, 1u), shards));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(shards);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace bellreal
