#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace mvk {

// Set over a fixed universe [0, size). Binary operations require both sides
// to share the universe size.
class WorldSet {
 public:
  WorldSet() = default;
  explicit WorldSet(uint32_t size) : size_(size), words_(word_count(size), 0) {}

  static WorldSet all(uint32_t size) {
    WorldSet s(size);
    for (auto& w : s.words_) w = ~uint64_t{0};
    s.trim();
    return s;
  }

  uint32_t size() const { return size_; }

  bool test(uint32_t i) const {
    assert(i < size_);
    return (words_[i >> 6] >> (i & 63)) & 1;
  }
  void set(uint32_t i) {
    assert(i < size_);
    words_[i >> 6] |= uint64_t{1} << (i & 63);
  }
  void reset(uint32_t i) {
    assert(i < size_);
    words_[i >> 6] &= ~(uint64_t{1} << (i & 63));
  }
  void assign(uint32_t i, bool value) { value ? set(i) : reset(i); }

  WorldSet& operator&=(const WorldSet& o) {
    assert(size_ == o.size_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= o.words_[k];
    return *this;
  }
  WorldSet& operator|=(const WorldSet& o) {
    assert(size_ == o.size_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    return *this;
  }
  WorldSet& operator^=(const WorldSet& o) {
    assert(size_ == o.size_);
    for (std::size_t k = 0; k < words_.size(); ++k) words_[k] ^= o.words_[k];
    return *this;
  }

  friend WorldSet operator&(WorldSet a, const WorldSet& b) { return a &= b; }
  friend WorldSet operator|(WorldSet a, const WorldSet& b) { return a |= b; }
  friend WorldSet operator^(WorldSet a, const WorldSet& b) { return a ^= b; }

  WorldSet complement() const {
    WorldSet r(size_);
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] = ~words_[k];
    r.trim();
    return r;
  }

  bool subset_of(const WorldSet& o) const {
    assert(size_ == o.size_);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~o.words_[k]) return false;
    return true;
  }
  bool intersects(const WorldSet& o) const {
    assert(size_ == o.size_);
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  uint32_t count() const {
    uint32_t c = 0;
    for (auto w : words_) c += static_cast<uint32_t>(std::popcount(w));
    return c;
  }

  // Members in ascending order.
  std::vector<uint32_t> members() const {
    std::vector<uint32_t> out;
    out.reserve(count());
    for (uint32_t i = 0; i < size_; ++i)
      if (test(i)) out.push_back(i);
    return out;
  }

  bool operator==(const WorldSet&) const = default;

  // Tie-break order: by content as an unsigned little-endian integer.
  bool lex_less(const WorldSet& o) const {
    assert(size_ == o.size_);
    for (std::size_t k = words_.size(); k-- > 0;)
      if (words_[k] != o.words_[k]) return words_[k] < o.words_[k];
    return false;
  }

 private:
  static std::size_t word_count(uint32_t size) { return (size + 63) / 64; }
  void trim() {
    if (size_ & 63) words_.back() &= (uint64_t{1} << (size_ & 63)) - 1;
  }

  uint32_t size_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace mvk
