#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace gavel::engine {

inline constexpr int kMaxSites = 384;

/// Fixed-capacity bitset over board sites with fast iteration.
class SiteSet {
 public:
  static constexpr int kWords = kMaxSites / 64;

  constexpr void set(int i) noexcept { words_[i >> 6] |= bit(i); }
  constexpr void reset(int i) noexcept { words_[i >> 6] &= ~bit(i); }
  constexpr bool test(int i) const noexcept { return (words_[i >> 6] & bit(i)) != 0; }
  constexpr void clear() noexcept { words_ = {}; }

  constexpr bool any() const noexcept {
    for (auto w : words_)
      if (w) return true;
    return false;
  }
  constexpr bool none() const noexcept { return !any(); }
  constexpr int count() const noexcept {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  constexpr bool intersects(const SiteSet& o) const noexcept {
    for (int k = 0; k < kWords; ++k)
      if (words_[k] & o.words_[k]) return true;
    return false;
  }

  constexpr SiteSet& operator|=(const SiteSet& o) noexcept {
    for (int k = 0; k < kWords; ++k) words_[k] |= o.words_[k];
    return *this;
  }
  constexpr SiteSet& operator&=(const SiteSet& o) noexcept {
    for (int k = 0; k < kWords; ++k) words_[k] &= o.words_[k];
    return *this;
  }
  /// this \ o
  constexpr SiteSet& subtract(const SiteSet& o) noexcept {
    for (int k = 0; k < kWords; ++k) words_[k] &= ~o.words_[k];
    return *this;
  }
  friend constexpr SiteSet operator|(SiteSet a, const SiteSet& b) noexcept { return a |= b; }
  friend constexpr SiteSet operator&(SiteSet a, const SiteSet& b) noexcept { return a &= b; }
  friend constexpr bool operator==(const SiteSet&, const SiteSet&) = default;

  /// Calls f(site) for each member in increasing order.
  template <typename F>
  constexpr void for_each(F&& f) const {
    for (int k = 0; k < kWords; ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        const int b = std::countr_zero(w);
        f(k * 64 + b);
        w &= w - 1;
      }
    }
  }

  constexpr int first() const noexcept {
    for (int k = 0; k < kWords; ++k)
      if (words_[k]) return k * 64 + std::countr_zero(words_[k]);
    return -1;
  }

 private:
  static constexpr std::uint64_t bit(int i) noexcept { return std::uint64_t{1} << (i & 63); }
  std::array<std::uint64_t, kWords> words_{};
};

}  // namespace gavel::engine
