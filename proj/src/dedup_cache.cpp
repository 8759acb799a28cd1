#include "loraflood/dedup_cache.hpp"

#include "loraflood/error.hpp"

namespace loraflood {

DedupCache::DedupCache(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(Errc::InvalidArgument, "dedup cache capacity must be positive");
}

bool DedupCache::contains(std::uint32_t source, std::uint32_t message_id) const {
  return index_.contains(key(source, message_id));
}

bool DedupCache::insert(std::uint32_t source, std::uint32_t message_id) {
  const Key k = key(source, message_id);
  if (auto it = index_.find(k); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return false;
  }
  if (index_.size() == capacity_) {
    index_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(k);
  index_.emplace(k, order_.begin());
  return true;
}

void DedupCache::clear() {
  order_.clear();
  index_.clear();
}

}  // namespace loraflood
