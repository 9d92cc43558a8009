#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/engine.hpp"
#include "sptm/error.hpp"
#include "sptm/machine.hpp"
#include "sptm/rational.hpp"
#include "sptm/step.hpp"

namespace sptm {

enum class PriorKind { faircoin, uniform_n, explicit_table };

inline const char* to_string(PriorKind k) {
  switch (k) {
    case PriorKind::faircoin: return "faircoin";
    case PriorKind::uniform_n: return "uniform_n";
    case PriorKind::explicit_table: return "explicit";
  }
  return "?";
}

// A semi-distribution over input strings. faircoin assigns 2^-|x| on a
// prefix-free support (the Cantor / fair-coin measure, so weight ratios are
// exactly 2^(|s'|-|s|)); uniform_n puts 2^-n on every string of length
// exactly n; explicit tables carry arbitrary nonnegative rational weights.
struct Prior {
  PriorKind kind = PriorKind::explicit_table;
  std::vector<std::pair<Bits, Rational>> table;  // shortlex order, unique keys
  bool normalized = false;                       // total == 1
  std::string descriptor;                        // human-readable origin

  Rational total() const {
    Rational s = 0;
    for (const auto& [x, w] : table) s += w;
    return s;
  }

  bool contains(const Bits& x) const {
    for (const auto& [s, w] : table)
      if (s == x) return true;
    return false;
  }

  Rational weight(const Bits& x) const {
    for (const auto& [s, w] : table)
      if (s == x) return w;
    return 0;
  }

  bool support_prefix_free() const {
    for (std::size_t i = 0; i < table.size(); ++i)
      for (std::size_t j = 0; j < table.size(); ++j)
        if (i != j && is_proper_prefix(table[i].first, table[j].first)) return false;
    return true;
  }

  Prior scaled(const Rational& factor, std::string new_descriptor = "") const {
    if (factor <= 0) throw Error("prior scale factor must be positive");
    Prior p = *this;
    p.kind = PriorKind::explicit_table;
    for (auto& [x, w] : p.table) w *= factor;
    p.normalized = (p.total() == 1);
    p.descriptor = new_descriptor.empty() ? descriptor + "*" + rat_str(factor) : std::move(new_descriptor);
    return p;
  }
};

namespace detail {

inline void sort_table(std::vector<std::pair<Bits, Rational>>& table) {
  std::sort(table.begin(), table.end(),
            [](const auto& a, const auto& b) { return ShortLex{}(a.first, b.first); });
  for (std::size_t i = 1; i < table.size(); ++i)
    if (table[i].first == table[i - 1].first)
      throw Error("duplicate prior entry '" + table[i].first + "'");
}

}  // namespace detail

// Fair-coin measure on an explicit prefix-free set.
inline Prior make_faircoin_prior(std::vector<Bits> support, std::string descriptor = "") {
  for (std::size_t i = 0; i < support.size(); ++i)
    for (std::size_t j = 0; j < support.size(); ++j)
      if (i != j && is_proper_prefix(support[i], support[j]))
        throw Error("faircoin support is not prefix-free: '" + support[i] +
                    "' is a proper prefix of '" + support[j] + "'");
  Prior p;
  p.kind = PriorKind::faircoin;
  for (auto& x : support) {
    if (!is_bits(x)) throw Error("prior support entry '" + x + "' is not a bit string");
    Rational w = pow2(-int(x.size()));
    p.table.emplace_back(std::move(x), std::move(w));
  }
  detail::sort_table(p.table);
  p.normalized = (p.total() == 1);
  if (descriptor.empty()) {
    descriptor = "faircoin{";
    for (std::size_t i = 0; i < p.table.size(); ++i)
      descriptor += (i ? "," : "") + p.table[i].first;
    descriptor += "}";
  }
  p.descriptor = std::move(descriptor);
  return p;
}

// Uniform weight 2^-n over all strings of length exactly n. This is the
// prefix-free stand-in for "uniform over inputs of size up to n"; see
// README.
inline Prior make_uniform_prior(int n) {
  if (n < 0) throw Error("uniform prior length must be >= 0");
  if (n > 20) throw Error("uniform prior length too large (max 20)");
  Prior p;
  p.kind = PriorKind::uniform_n;
  for (auto& x : strings_of_length(n)) p.table.emplace_back(std::move(x), pow2(-n));
  p.normalized = true;
  p.descriptor = "uniform:" + std::to_string(n);
  return p;
}

inline Prior make_explicit_prior(std::vector<std::pair<Bits, Rational>> table,
                                 std::string descriptor = "explicit") {
  Prior p;
  p.kind = PriorKind::explicit_table;
  for (auto& [x, w] : table) {
    if (!is_bits(x)) throw Error("prior entry '" + x + "' is not a bit string");
    if (w < 0) throw Error("negative prior weight for '" + x + "'");
  }
  p.table = std::move(table);
  detail::sort_table(p.table);
  p.normalized = (p.total() == 1);
  p.descriptor = std::move(descriptor);
  return p;
}

// Kraft total: the exact sum of the prior weights. For the faircoin and
// uniform kinds the support is prefix-free and the total is the Kraft sum,
// which cannot exceed 1 (equality exactly for complete codes).
inline Rational kraft_check(const Prior& p) {
  Rational total = p.total();
  if (p.kind != PriorKind::explicit_table && total > 1)
    throw Error("Kraft inequality violated on a prefix-free support (bug)");
  return total;
}

// n(x) = -log2 pi(x), in bits; the only floating-point surface of priors.
inline double surprisal(const Prior& p, const Bits& x) {
  Rational w = p.weight(x);
  if (w <= 0)
    throw AnalysisError("surprisal: '" + x + "' is not in the support of " + p.descriptor);
  return -log2_rational(w);
}

// Bounded approximation of the prefix-free halting set H_delta_fn: members
// are the strings (shortlex, length <= L_max) on which the pure-delta run
// halts properly within `horizon` steps and no proper prefix is already a
// member. The bounds travel with the result so reports are reproducible.
struct HaltingSetApproximation {
  std::string machine;
  int fn = 1;
  int L_max = 0;
  int horizon = 0;
  std::vector<Bits> members;   // shortlex, certified prefix-free
  std::vector<Bits> excluded;  // candidates shadowed by a member prefix
};

inline HaltingSetApproximation enumerate_halting_set(const MachineSpec& m, int fn, int L_max,
                                                     int horizon) {
  if (fn < 1 || fn > m.num_updates) throw Error("update function index out of range");
  if (L_max < 0 || horizon < 1) throw Error("enumerate_halting_set: L_max >= 0, horizon >= 1");
  HaltingSetApproximation h;
  h.machine = m.name;
  h.fn = fn;
  h.L_max = L_max;
  h.horizon = horizon;
  for (const Bits& x : strings_up_to(L_max)) {
    bool shadowed = false;
    for (const Bits& mem : h.members)
      if (is_proper_prefix(mem, x)) {
        shadowed = true;
        break;
      }
    if (shadowed) {
      h.excluded.push_back(x);
      continue;
    }
    if (run_pure(m, fn, x, horizon).status == HaltStatus::halted_proper) h.members.push_back(x);
  }
  return h;
}

inline Prior make_halting_set_prior(const MachineSpec& m, int fn, int L_max, int horizon) {
  HaltingSetApproximation h = enumerate_halting_set(m, fn, L_max, horizon);
  Prior p = make_faircoin_prior(h.members,
                                "faircoin:fn=" + std::to_string(fn) + ",maxlen=" + std::to_string(L_max));
  return p;
}

// Explicit prior file: one entry per line, `bitstring<TAB>num/den`,
// '#' comments, blank lines ignored.
inline Prior parse_prior_file(const std::string& text, std::string descriptor = "file") {
  std::vector<std::pair<Bits, Rational>> table;
  std::string line;
  std::istringstream in(text);
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(lineno, 1, "prior entry must be 'bits<TAB>num/den'");
    Bits x = line.substr(0, tab);
    std::string w = line.substr(tab + 1);
    while (!w.empty() && (w.front() == ' ' || w.front() == '\t')) w.erase(w.begin());
    if (!is_bits(x)) throw ParseError(lineno, 1, "'" + x + "' is not a bit string");
    try {
      table.emplace_back(std::move(x), parse_rational(w));
    } catch (const Error& e) {
      throw ParseError(lineno, int(tab) + 2, e.what());
    }
  }
  return make_explicit_prior(std::move(table), std::move(descriptor));
}

}  // namespace sptm
