#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/error.hpp"
#include "sptm/machine.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"
#include "sptm/step.hpp"

namespace sptm {

// What counts as "the state" X_t of the walk:
//   retain  - the full ID; the read-only input stays visible, so consumed
//             bits are never lost to the trajectory.
//   consume - the ID with already-read input bits dropped (the read head
//             physically eats the tape); this is where erasure effects show.
//   io      - endpoints only are coarsened: X_0 is the input string, X_tau
//             the output string, interior states are full IDs.
enum class Abstraction { retain, consume, io };

inline const char* to_string(Abstraction a) {
  switch (a) {
    case Abstraction::retain: return "retain";
    case Abstraction::consume: return "consume";
    case Abstraction::io: return "io";
  }
  return "?";
}

namespace detail {

inline std::string render_tapes(const Configuration& c) {
  std::ostringstream os;
  for (std::size_t t = 0; t < c.tapes.size(); ++t) {
    if (t) os << ";";
    os << "h" << c.tapes[t].head << ":{";
    bool first = true;
    for (const auto& [pos, bit] : c.tapes[t].ones) {
      (void)bit;
      os << (first ? "" : ",") << pos;
      first = false;
    }
    os << "}";
  }
  return os.str();
}

inline std::string render_id(const MachineSpec& m, const Configuration& c, const Bits& input,
                             Abstraction a, bool terminal) {
  std::ostringstream os;
  switch (a) {
    case Abstraction::retain:
      os << "q=" << m.state_name(c.state) << "|in=" << input << "|cur=" << c.cursor;
      break;
    case Abstraction::consume:
      os << "q=" << m.state_name(c.state) << "|rem=" << input.substr(std::size_t(c.cursor));
      break;
    case Abstraction::io:
      if (c.step_count == 0) return "in=" + input;
      if (terminal) return "out=" + c.output;
      os << "q=" << m.state_name(c.state) << "|in=" << input << "|cur=" << c.cursor;
      break;
  }
  os << "|w=" << render_tapes(c) << "|out=" << c.output;
  return os.str();
}

}  // namespace detail

// Exact law of the abstracted ID-sequence (X_0, ..., X_k), conditioned on
// proper halting at time k, for each k <= horizon, plus the conditioned
// halting-time weights pi(tau = k) / pi(tau <= horizon). Sequences cover the
// whole walk from the initial ID to the first halt; the absorbing halt
// self-loop is excluded.
struct TrajectoryLaw {
  std::string machine_name;
  std::string machine_hash;
  std::string prior_descriptor;
  int horizon = 0;
  Abstraction abstraction = Abstraction::retain;

  struct PerK {
    Rational raw_mass = 0;  // pi(tau = k, proper halt) under the prior
    Rational weight = 0;    // raw_mass / total_halt_mass
    std::map<std::vector<std::string>, Rational> seqs;  // conditioned on tau = k; sums to 1
  };
  std::map<int, PerK> by_k;
  Rational total_halt_mass = 0;

  const PerK& at(int k) const {
    auto it = by_k.find(k);
    if (it == by_k.end())
      throw AnalysisError("no halting mass at tau = " + std::to_string(k));
    return it->second;
  }
};

// Enumerates (input, coin choice) histories level by level, keying live
// nodes by (abstracted prefix, full configuration): nodes with the same
// abstract history and the same ID have identically distributed futures, so
// they merge exactly. Non-proper branches (running at the horizon, prefix
// halts, overruns) carry no trajectory mass; they are the law's residual.
inline TrajectoryLaw trajectory_law(const MachineSpec& m, const Prior& prior, int horizon,
                                    Abstraction abstraction) {
  if (horizon < 1) throw Error("trajectory_law: horizon must be >= 1");
  TrajectoryLaw tl;
  tl.machine_name = m.name;
  tl.machine_hash = machine_hash_hex(m);
  tl.prior_descriptor = prior.descriptor;
  tl.horizon = horizon;
  tl.abstraction = abstraction;

  const Rational inv_n(1, m.num_updates);

  for (const auto& [input, prior_w] : prior.table) {
    if (prior_w == 0) continue;
    using Node = std::pair<std::vector<std::string>, Configuration>;
    std::map<Node, Rational> live;
    Configuration init = initial_configuration(m);
    live[{{detail::render_id(m, init, input, abstraction, false)}, init}] = prior_w;

    for (int t = 0; t < horizon && !live.empty(); ++t) {
      std::map<Node, Rational> next;
      for (const auto& [node, p] : live) {
        const auto& [seq, cfg] = node;
        for (int fn = 1; fn <= m.num_updates; ++fn) {
          StepOutcome so = step(m, cfg, input, fn);
          Rational child_p = p * inv_n;
          if (so.status == HaltStatus::running) {
            std::vector<std::string> child_seq = seq;
            child_seq.push_back(detail::render_id(m, so.config, input, abstraction, false));
            next[{std::move(child_seq), so.config}] += child_p;
          } else if (so.status == HaltStatus::halted_proper) {
            std::vector<std::string> child_seq = seq;
            child_seq.push_back(detail::render_id(m, so.config, input, abstraction, true));
            auto& per_k = tl.by_k[t + 1];
            per_k.seqs[std::move(child_seq)] += child_p;
            per_k.raw_mass += child_p;
          }
          // prefix halts and overruns drop out of the trajectory law
        }
      }
      live = std::move(next);
    }
  }

  for (auto& [k, per_k] : tl.by_k) tl.total_halt_mass += per_k.raw_mass;
  if (tl.total_halt_mass == 0)
    throw AnalysisError("no-halting-mass: machine '" + m.name + "' has no proper halt within horizon " +
                        std::to_string(horizon) + " on the prior support");
  for (auto& [k, per_k] : tl.by_k) {
    per_k.weight = per_k.raw_mass / tl.total_halt_mass;
    for (auto& [seq, p] : per_k.seqs) p /= per_k.raw_mass;
  }
  return tl;
}

}  // namespace sptm
