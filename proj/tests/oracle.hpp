#pragma once

// Test-local verification oracles, kept independent of the engine's merged
// exploration and of include/sptm/oracle.hpp: coin strings are enumerated by
// recursion and bucket weights are integer leaf counts times N^-T.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sptm/engine.hpp"
#include "sptm/machine.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"
#include "sptm/step.hpp"
#include "sptm/trajectory.hpp"

namespace testoracle {

using sptm::Bits;
using sptm::Configuration;
using sptm::HaltStatus;
using sptm::MachineSpec;
using sptm::Rational;

struct Buckets {
  std::map<std::pair<Bits, int>, std::uint64_t> halting;  // (y, tau) -> leaf count
  std::uint64_t proper = 0, prefix = 0, overrun = 0, running = 0;
  std::vector<std::uint64_t> live_at_depth;  // index m: leaves still live after m steps
  std::uint64_t leaves = 0;
};

namespace detail {

// Walks every coin string of length `horizon`. frozen: 0 = live, else the
// step at which the path froze (halt or overrun). Frozen paths still fan out
// so that each leaf counts exactly once.
inline void walk(const MachineSpec& m, const Bits& input, int horizon, const Configuration& c,
                 int depth, int frozen, HaltStatus frozen_status, Buckets& b) {
  if (depth == horizon) {
    ++b.leaves;
    HaltStatus status = frozen ? frozen_status : sptm::classify_halt(m, c, input);
    switch (status) {
      case HaltStatus::running: ++b.running; break;
      case HaltStatus::halted_proper:
        ++b.halting[{c.output, c.step_count}];
        ++b.proper;
        break;
      case HaltStatus::halted_on_proper_prefix: ++b.prefix; break;
      case HaltStatus::input_overrun: ++b.overrun; break;
    }
    const int last_live = frozen ? frozen - 1 : horizon;
    for (int mm = 0; mm <= last_live; ++mm) ++b.live_at_depth[std::size_t(mm)];
    return;
  }
  for (int fn = 1; fn <= m.num_updates; ++fn) {
    if (frozen) {
      walk(m, input, horizon, c, depth + 1, frozen, frozen_status, b);
      continue;
    }
    sptm::StepOutcome so = sptm::step(m, c, input, fn);
    if (so.status == HaltStatus::input_overrun) {
      walk(m, input, horizon, c, depth + 1, depth + 1, HaltStatus::input_overrun, b);
    } else if (so.config.state == m.halt_index) {
      walk(m, input, horizon, so.config, depth + 1, depth + 1,
           sptm::classify_halt(m, so.config, input), b);
    } else {
      walk(m, input, horizon, so.config, depth + 1, 0, HaltStatus::running, b);
    }
  }
}

}  // namespace detail

inline Buckets enumerate(const MachineSpec& m, const Bits& input, int horizon) {
  Buckets b;
  b.live_at_depth.assign(std::size_t(horizon) + 1, 0);
  detail::walk(m, input, horizon, sptm::initial_configuration(m), 0, 0, HaltStatus::running, b);
  return b;
}

// Bucket-for-bucket exact comparison with a merged ForwardAnalysis.
inline bool matches(const Buckets& b, const sptm::ForwardAnalysis& fa) {
  const Rational leaf(1, sptm::Int(b.leaves));
  if (fa.halting.size() != b.halting.size()) return false;
  for (const auto& [key, count] : b.halting) {
    auto it = fa.halting.find(key);
    if (it == fa.halting.end() || it->second != Rational(count) * leaf) return false;
  }
  if (fa.halted_proper != Rational(b.proper) * leaf) return false;
  if (fa.halted_on_proper_prefix != Rational(b.prefix) * leaf) return false;
  if (fa.input_overrun != Rational(b.overrun) * leaf) return false;
  if (fa.running != Rational(b.running) * leaf) return false;
  for (std::size_t mm = 0; mm < b.live_at_depth.size(); ++mm)
    if (fa.depth_running[mm] != Rational(b.live_at_depth[mm]) * leaf) return false;
  return true;
}

// Flat sequence joint: (k, abstracted sequence) -> weight, prior * N^-T per
// coin string, proper halts only.
using SeqJoint = std::map<int, std::map<std::vector<std::string>, Rational>>;

inline SeqJoint flat_sequences(const MachineSpec& m, const sptm::Prior& prior, int horizon,
                               sptm::Abstraction a) {
  SeqJoint out;
  std::uint64_t total = 1;
  for (int i = 0; i < horizon; ++i) total *= std::uint64_t(m.num_updates);
  for (const auto& [input, w] : prior.table) {
    const Rational path_w = w / Rational(sptm::Int(total));
    std::vector<int> coins(std::size_t(horizon), 1);
    while (true) {
      Configuration c = sptm::initial_configuration(m);
      std::vector<std::string> seq{sptm::detail::render_id(m, c, input, a, false)};
      for (int t = 0; t < horizon; ++t) {
        sptm::StepOutcome so = sptm::step(m, c, input, coins[std::size_t(t)]);
        if (so.status == HaltStatus::input_overrun) break;
        c = so.config;
        if (c.state == m.halt_index) {
          if (sptm::classify_halt(m, c, input) == HaltStatus::halted_proper) {
            seq.push_back(sptm::detail::render_id(m, c, input, a, true));
            out[t + 1][seq] += path_w;
          }
          break;
        }
        seq.push_back(sptm::detail::render_id(m, c, input, a, false));
      }
      int pos = horizon - 1;
      while (pos >= 0 && coins[std::size_t(pos)] == m.num_updates) {
        coins[std::size_t(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++coins[std::size_t(pos)];
    }
  }
  return out;
}

// Independent conditional entropy: plain double arithmetic over the flat
// joint.
inline double flat_cond_entropy(const std::map<std::pair<std::string, std::string>, Rational>& joint) {
  std::map<std::string, double> bmass;
  double total = 0;
  for (const auto& [ab, p] : joint) {
    bmass[ab.second] += sptm::to_double(p);
    total += sptm::to_double(p);
  }
  double h = 0;
  for (const auto& [ab, p] : joint) {
    double pd = sptm::to_double(p);
    if (pd <= 0) continue;
    h -= pd / total * std::log2(pd / bmass[ab.second]);
  }
  return h;
}

}  // namespace testoracle
