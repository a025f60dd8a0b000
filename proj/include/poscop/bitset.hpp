#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "poscop/error.hpp"

namespace poscop::detail {

// Fixed-size dynamic bitset, sized once at construction. Keeps world sets
// compact for frames up to the enumeration cap (2^24 bits = 2 MiB).
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::uint32_t size, bool fill = false)
      : size_(size), words_((size + 63) / 64, fill ? ~0ull : 0ull) {
    trim();
  }

  std::uint32_t size() const { return size_; }

  bool test(std::uint32_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::uint32_t i, bool value = true) {
    const std::uint64_t bit = 1ull << (i & 63);
    if (value)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }

  std::uint32_t count() const {
    std::uint32_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::uint32_t>(std::popcount(w));
    return total;
  }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  Bitset operator~() const {
    Bitset out = *this;
    for (std::uint64_t& w : out.words_) w = ~w;
    out.trim();
    return out;
  }

  friend Bitset operator&(const Bitset& a, const Bitset& b) {
    Bitset out = a;
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] &= b.words_[i];
    return out;
  }

  friend Bitset operator|(const Bitset& a, const Bitset& b) {
    Bitset out = a;
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] |= b.words_[i];
    return out;
  }

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.size_ == b.size_ && a.words_ == b.words_;
  }

  template <class Fn>
  void for_each_set(Fn&& fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        const int bit = std::countr_zero(w);
        fn(static_cast<std::uint32_t>(wi * 64 + bit));
        w &= w - 1;
      }
    }
  }

  // Hex rendering of the whole mask (bit i = element i), e.g. "0x2c".
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    bool leading = true;
    for (std::size_t wi = words_.size(); wi-- > 0;) {
      for (int nib = 15; nib >= 0; --nib) {
        const unsigned v = (words_[wi] >> (nib * 4)) & 0xf;
        if (leading && v == 0) continue;
        leading = false;
        out.push_back(digits[v]);
      }
    }
    if (out.empty()) out = "0";
    return "0x" + out;
  }

  static Bitset from_hex(std::uint32_t size, std::string_view text) {
    std::string_view digits = text;
    if (digits.size() >= 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X'))
      digits.remove_prefix(2);
    if (digits.empty()) throw ParseError("empty hex bitmask", 0);
    Bitset out(size);
    std::uint32_t bit = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
      const char c = digits[i];
      unsigned v = 0;
      if (c >= '0' && c <= '9')
        v = c - '0';
      else if (c >= 'a' && c <= 'f')
        v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F')
        v = c - 'A' + 10;
      else
        throw ParseError(std::string("bad hex digit '") + c + "' in bitmask", i);
      for (unsigned b = 0; b < 4; ++b, ++bit) {
        if (!((v >> b) & 1)) continue;
        if (bit >= size) throw ParseError("bitmask wider than the world count", i);
        out.set(bit);
      }
    }
    return out;
  }

 private:
  void trim() {
    if (size_ % 64 && !words_.empty()) words_.back() &= (1ull << (size_ % 64)) - 1;
  }

  std::uint32_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace poscop::detail
