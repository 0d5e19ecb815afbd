#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace partpq::detail {

// Minimal open-addressing u64 -> u32 table for the per-pixel hot loops
// (uid -> segment index, joint overlap counting). Keys must not be the
// reserved empty marker. Grows by rehashing at 70% load.
class FlatTable {
 public:
  static constexpr uint64_t kEmpty = ~uint64_t{0};

  explicit FlatTable(size_t expected = 64) { rehash(round_up(expected * 2)); }

  // Returns a reference to the value slot, default-initializing to 0.
  uint32_t& slot(uint64_t key) {
    if ((size_ + 1) * 10 >= capacity_ * 7) rehash(capacity_ * 2);
    size_t i = probe(key);
    if (keys_[i] == kEmpty) {
      keys_[i] = key;
      values_[i] = 0;
      ++size_;
    }
    return values_[i];
  }

  const uint32_t* find(uint64_t key) const {
    const size_t i = probe(key);
    return keys_[i] == kEmpty ? nullptr : &values_[i];
  }

  size_t size() const { return size_; }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (size_t i = 0; i < capacity_; ++i)
      if (keys_[i] != kEmpty) fn(keys_[i], values_[i]);
  }

  void clear() {
    keys_.assign(capacity_, kEmpty);
    size_ = 0;
  }

 private:
  static size_t round_up(size_t n) {
    size_t c = 64;
    while (c < n) c <<= 1;
    return c;
  }

  static uint64_t mix(uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDull;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ull;
    return z ^ (z >> 33);
  }

  size_t probe(uint64_t key) const {
    size_t i = mix(key) & (capacity_ - 1);
    while (keys_[i] != kEmpty && keys_[i] != key) i = (i + 1) & (capacity_ - 1);
    return i;
  }

  void rehash(size_t new_capacity) {
    std::vector<uint64_t> old_keys = std::move(keys_);
    std::vector<uint32_t> old_values = std::move(values_);
    capacity_ = new_capacity;
    keys_.assign(capacity_, kEmpty);
    values_.assign(capacity_, 0);
    for (size_t i = 0; i < old_keys.size(); ++i) {
      if (old_keys[i] != kEmpty) {
        size_t j = probe(old_keys[i]);
        keys_[j] = old_keys[i];
        values_[j] = old_values[i];
      }
    }
  }

  size_t capacity_ = 0;
  size_t size_ = 0;
  std::vector<uint64_t> keys_;
  std::vector<uint32_t> values_;
};

}  // namespace partpq::detail
