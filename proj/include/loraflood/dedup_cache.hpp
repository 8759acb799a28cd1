#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <unordered_map>

namespace loraflood {

/// Bounded set of (source, message id) pairs with least-recently-inserted
/// eviction. Lookups never change recency.
class DedupCache {
 public:
  explicit DedupCache(std::size_t capacity);

  bool contains(std::uint32_t source, std::uint32_t message_id) const;

  /// Inserts or refreshes the pair. Returns false if it was already present.
  bool insert(std::uint32_t source, std::uint32_t message_id);

  void clear();
  std::size_t size() const noexcept { return index_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  using Key = std::uint64_t;
  static Key key(std::uint32_t source, std::uint32_t message_id) noexcept {
    return (static_cast<Key>(source) << 32) | message_id;
  }

  std::size_t capacity_;
  std::list<Key> order_;  // front = most recent
  std::unordered_map<Key, std::list<Key>::iterator> index_;
};

}  // namespace loraflood
