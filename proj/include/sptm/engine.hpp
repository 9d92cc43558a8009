#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <utility>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/machine.hpp"
#include "sptm/rational.hpp"
#include "sptm/step.hpp"

namespace sptm {

// Orders halting records by (halt time, shortlex output) so every report and
// iteration is stable.
struct HaltRecordLess {
  bool operator()(const std::pair<Bits, int>& a, const std::pair<Bits, int>& b) const {
    if (a.second != b.second) return a.second < b.second;
    return ShortLex{}(a.first, b.first);
  }
};

template <class T>
using BitsMap = std::map<Bits, T, ShortLex>;

// Exact distribution over (output, halting time) for one input, together
// with the residual masses. All probabilities have power-of-N denominators
// and the four mass buckets sum to exactly 1.
struct ForwardAnalysis {
  Bits input;
  int horizon = 0;
  int num_updates = 2;

  std::map<std::pair<Bits, int>, Rational, HaltRecordLess> halting;  // (y, tau) -> prob
  Rational halted_proper = 0;
  Rational halted_on_proper_prefix = 0;
  Rational input_overrun = 0;
  Rational running = 0;

  BitsMap<Rational> out_given_in;  // pi(out = y | in), proper halts only

  // Audit trail: total frozen+live mass and live mass after m steps,
  // m = 0..horizon.
  std::vector<Rational> depth_total;
  std::vector<Rational> depth_running;

  Rational tau_mass(int t) const {
    Rational s = 0;
    for (const auto& [key, p] : halting)
      if (key.second == t) s += p;
    return s;
  }
};

namespace detail {

using Level = std::map<Configuration, Rational>;

struct ExpandResult {
  Level next;
  std::map<std::pair<Bits, int>, Rational, HaltRecordLess> halting;
  Rational halted_proper = 0;
  Rational halted_on_proper_prefix = 0;
  Rational input_overrun = 0;
};

inline ExpandResult expand_range(const MachineSpec& m, const Bits& input,
                                 const std::vector<std::pair<Configuration, Rational>>& items,
                                 std::size_t begin, std::size_t end) {
  ExpandResult out;
  const Rational inv_n(1, m.num_updates);
  for (std::size_t i = begin; i < end; ++i) {
    const auto& [cfg, prob] = items[i];
    for (int fn = 1; fn <= m.num_updates; ++fn) {
      StepOutcome so = step(m, cfg, input, fn);
      Rational child = prob * inv_n;
      switch (so.status) {
        case HaltStatus::running:
          out.next[so.config] += child;
          break;
        case HaltStatus::halted_proper:
          out.halting[{so.config.output, so.config.step_count}] += child;
          out.halted_proper += child;
          break;
        case HaltStatus::halted_on_proper_prefix:
          out.halted_on_proper_prefix += child;
          break;
        case HaltStatus::input_overrun:
          out.input_overrun += child;
          break;
      }
    }
  }
  return out;
}

}  // namespace detail

// Breadth-first expansion of the coin-flip computation tree with exact
// probabilities. Equal configurations at the same depth are merged by
// summing their probabilities (dynamic programming over IDs), which is what
// makes horizon-20 machines tractable; the naive N^T path oracle in the test
// suite certifies the merge. Halting, prefix-halting and overrun branches
// freeze into their mass buckets.
//
// `threads` > 1 partitions each level across workers; exact rational sums
// are associative and commutative, so results are identical for any
// partition.
inline ForwardAnalysis explore(const MachineSpec& m, const Bits& input, int horizon,
                               int threads = 1) {
  if (horizon < 0) throw Error("horizon must be >= 0");
  if (!is_bits(input)) throw Error("input '" + input + "' is not a bit string");
  ForwardAnalysis fa;
  fa.input = input;
  fa.horizon = horizon;
  fa.num_updates = m.num_updates;

  detail::Level live;
  live[initial_configuration(m)] = 1;

  auto live_mass = [&]() {
    Rational s = 0;
    for (const auto& [c, p] : live) s += p;
    return s;
  };
  auto frozen_mass = [&]() {
    return fa.halted_proper + fa.halted_on_proper_prefix + fa.input_overrun;
  };

  fa.depth_total.push_back(1);
  fa.depth_running.push_back(1);

  for (int t = 0; t < horizon; ++t) {
    if (!live.empty()) {
      std::vector<std::pair<Configuration, Rational>> items(live.begin(), live.end());
      const std::size_t n = items.size();
      const int workers = (threads > 1 && n >= 4) ? std::min<int>(threads, int(n)) : 1;

      std::vector<detail::ExpandResult> parts;
      if (workers == 1) {
        parts.push_back(detail::expand_range(m, input, items, 0, n));
      } else {
        std::vector<std::future<detail::ExpandResult>> futs;
        for (int w = 0; w < workers; ++w) {
          std::size_t b = n * std::size_t(w) / std::size_t(workers);
          std::size_t e = n * std::size_t(w + 1) / std::size_t(workers);
          futs.push_back(std::async(std::launch::async, [&, b, e] {
            return detail::expand_range(m, input, items, b, e);
          }));
        }
        for (auto& f : futs) parts.push_back(f.get());
      }

      detail::Level next;
      for (auto& part : parts) {
        for (auto& [cfg, p] : part.next) next[cfg] += p;
        for (auto& [key, p] : part.halting) fa.halting[key] += p;
        fa.halted_proper += part.halted_proper;
        fa.halted_on_proper_prefix += part.halted_on_proper_prefix;
        fa.input_overrun += part.input_overrun;
      }
      live = std::move(next);
    }
    fa.depth_running.push_back(live_mass());
    fa.depth_total.push_back(fa.depth_running.back() + frozen_mass());
  }

  fa.running = live_mass();
  for (const auto& [key, p] : fa.halting) fa.out_given_in[key.first] += p;
  return fa;
}

// Lower bound on non-halting mass for 2-function machines: if neither
// pure-delta run has halted by step m, the two pure coin sequences of length
// m are still live, so running mass >= 2 * 2^-m. Meaningful for m >= 1 (the
// two length-0 sequences coincide).
struct NonhaltBoundRow {
  int m = 0;
  HaltStatus pure1 = HaltStatus::running;
  HaltStatus pure2 = HaltStatus::running;
  bool applicable = false;  // both pure runs still running at step m
  Rational running_mass = 0;
  Rational bound = 0;  // 2 * 2^-m
  bool holds = false;
  Rational slack = 0;  // running_mass - bound
};

struct NonhaltBoundReport {
  Bits input;
  int max_m = 0;
  std::vector<NonhaltBoundRow> rows;  // m = 1..max_m
  bool all_hold = true;               // over applicable rows
};

inline NonhaltBoundReport nonhalt_bound_check(const MachineSpec& m, const Bits& input, int max_m,
                                              int threads = 1) {
  if (m.num_updates != 2)
    throw AnalysisError("nonhalt_bound_check requires a 2-function machine, got N=" +
                        std::to_string(m.num_updates));
  if (max_m < 1) throw Error("max_m must be >= 1");
  NonhaltBoundReport rep;
  rep.input = input;
  rep.max_m = max_m;
  ForwardAnalysis fa = explore(m, input, max_m, threads);
  for (int mm = 1; mm <= max_m; ++mm) {
    NonhaltBoundRow row;
    row.m = mm;
    row.pure1 = run_pure(m, 1, input, mm).status;
    row.pure2 = run_pure(m, 2, input, mm).status;
    row.applicable =
        row.pure1 == HaltStatus::running && row.pure2 == HaltStatus::running;
    row.running_mass = fa.depth_running[std::size_t(mm)];
    row.bound = Rational(2) * pow2(-mm);
    if (row.applicable) {
      row.holds = row.running_mass >= row.bound;
      row.slack = row.running_mass - row.bound;
      if (!row.holds) rep.all_hold = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace sptm
