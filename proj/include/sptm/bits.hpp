#pragma once

#include <string>
#include <vector>

namespace sptm {

// Bit strings are plain std::strings over {'0','1'}; the empty string is a
// valid input.
using Bits = std::string;

inline bool is_bits(const Bits& s) {
  for (char c : s)
    if (c != '0' && c != '1') return false;
  return true;
}

// x is a proper prefix of y.
inline bool is_proper_prefix(const Bits& x, const Bits& y) {
  return x.size() < y.size() && y.compare(0, x.size(), x) == 0;
}

// Shortlex: by length, then lexicographically. Used for every user-visible
// enumeration so reports are order-stable.
struct ShortLex {
  bool operator()(const Bits& a, const Bits& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

inline std::vector<Bits> strings_of_length(int n) {
  std::vector<Bits> out;
  out.reserve(std::size_t(1) << n);
  for (std::uint64_t v = 0; v < (std::uint64_t(1) << n); ++v) {
    Bits s(n, '0');
    for (int i = 0; i < n; ++i)
      if (v >> (n - 1 - i) & 1) s[i] = '1';
    out.push_back(s);
  }
  return out;
}

// All strings of length <= max_len in shortlex order, starting with "".
inline std::vector<Bits> strings_up_to(int max_len) {
  std::vector<Bits> out;
  for (int n = 0; n <= max_len; ++n)
    for (auto& s : strings_of_length(n)) out.push_back(std::move(s));
  return out;
}

}  // namespace sptm
