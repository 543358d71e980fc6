#include "exactpv/engine.hpp"

#include <functional>
#include <stdexcept>

namespace exactpv {

PValueEngine::PValueEngine(Count max_n, EngineOptions options)
    : log_factorials_(std::make_shared<const LogFactorialCache>(max_n)),
      options_(std::move(options)) {}

std::size_t PValueEngine::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = std::hash<std::string>{}(k.statistic);
  for (Count v : {k.m1, k.m2, k.m3, k.n1})
    h ^= std::hash<Count>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::shared_ptr<const AttainableDistribution> PValueEngine::distribution(
    const Margins& margins, const RankingStatistic& stat) {
  if (options_.cache_capacity == 0) {
    {
      std::lock_guard lock(mutex_);
      ++stats_.misses;
    }
    return std::make_shared<const AttainableDistribution>(
        attainable_distribution(margins, stat, *log_factorials_, options_.ties));
  }

  Key key{margins.m1(), margins.m2(), margins.m3(), margins.n1(), stat.name()};
  std::promise<std::shared_ptr<const AttainableDistribution>> promise;
  Value value;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++stats_.hits;
      recency_.splice(recency_.begin(), recency_, it->second.position);
      value = it->second.value;
    } else {
      ++stats_.misses;
      owner = true;
      value = promise.get_future().share();
      recency_.push_front(key);
      entries_.emplace(key, Entry{value, recency_.begin()});
      while (entries_.size() > options_.cache_capacity) {
        entries_.erase(recency_.back());
        recency_.pop_back();
        ++stats_.evictions;
      }
    }
  }

  if (owner) {
    try {
      promise.set_value(std::make_shared<const AttainableDistribution>(
          attainable_distribution(margins, stat, *log_factorials_, options_.ties)));
    } catch (...) {
      promise.set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) {
        recency_.erase(it->second.position);
        entries_.erase(it);
      }
    }
  }
  return value.get();
}

PValueResult PValueEngine::pvalue(const Table2x3& observed, const RankingStatistic& stat) {
  if (!log_factorials_->covers(observed.n()))
    throw std::out_of_range("table has n = " + std::to_string(observed.n()) +
                            ", engine was sized for n <= " + std::to_string(max_n()));
  const auto dist = distribution(margins_of(observed), stat);
  return lookup_pvalue(*dist, stat(observed));
}

CacheStats PValueEngine::cache_stats() const {
  std::lock_guard lock(mutex_);
  CacheStats s = stats_;
  s.entries = entries_.size();
  return s;
}

}  // namespace exactpv
