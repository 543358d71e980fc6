// Memoizing front end over attainable_distribution, shared across threads.
#pragma once

#include <cstdint>
#include <future>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "exactpv/exact_pvalue.hpp"

namespace exactpv {

struct EngineOptions {
  TieRule ties;
  // Maximum number of memoized distributions; 0 disables memoization.
  std::size_t cache_capacity = 4096;
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::size_t entries = 0;
};

// Distributions are memoized per (margins, statistic name) in an LRU cache.
// Concurrent requests for a key that is still being computed wait for that
// computation and count as hits, so each key is computed once while resident.
class PValueEngine {
 public:
  explicit PValueEngine(Count max_n, EngineOptions options = {});

  PValueEngine(const PValueEngine&) = delete;
  PValueEngine& operator=(const PValueEngine&) = delete;

  std::shared_ptr<const AttainableDistribution> distribution(const Margins& margins,
                                                             const RankingStatistic& stat);

  // Throws std::out_of_range if observed.n() exceeds max_n().
  PValueResult pvalue(const Table2x3& observed, const RankingStatistic& stat);

  Count max_n() const noexcept { return log_factorials_->max_n(); }
  const LogFactorialCache& log_factorials() const noexcept { return *log_factorials_; }
  const TieRule& ties() const noexcept { return options_.ties; }
  CacheStats cache_stats() const;

 private:
  using Value = std::shared_future<std::shared_ptr<const AttainableDistribution>>;
  struct Key {
    Count m1, m2, m3, n1;
    std::string statistic;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Entry {
    Value value;
    std::list<Key>::iterator position;
  };

  std::shared_ptr<const LogFactorialCache> log_factorials_;
  EngineOptions options_;

  mutable std::mutex mutex_;
  std::list<Key> recency_;  // front = most recently used
  std::unordered_map<Key, Entry, KeyHash> entries_;
  CacheStats stats_;
};

}  // namespace exactpv
