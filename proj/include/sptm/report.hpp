#pragma once

#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>

#include "sptm/rational.hpp"

namespace sptm {

// Reports keep insertion order so output is byte-stable across runs.
using Json = nlohmann::ordered_json;

// Advisory float rendering; the "p/q" strings are the lossless values.
inline std::string fmt_bits(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline Json rat_json(const Rational& r) { return rat_str(r); }

inline Json rat_with_float(const Rational& r) {
  return Json{{"exact", rat_str(r)}, {"approx", fmt_bits(to_double(r))}};
}

}  // namespace sptm
