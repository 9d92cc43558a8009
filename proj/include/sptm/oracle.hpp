#pragma once

#include <string>
#include <vector>

#include "sptm/engine.hpp"
#include "sptm/machine.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"
#include "sptm/step.hpp"
#include "sptm/trajectory.hpp"

namespace sptm {

// Naive reference implementations that enumerate every one of the N^T coin
// strings individually, with no configuration merging. They certify the
// merged engine: results must match bucket for bucket in exact rational
// arithmetic. Exponential on purpose; keep horizons small.

inline ForwardAnalysis naive_forward(const MachineSpec& m, const Bits& input, int horizon) {
  ForwardAnalysis fa;
  fa.input = input;
  fa.horizon = horizon;
  fa.num_updates = m.num_updates;
  fa.depth_running.assign(std::size_t(horizon) + 1, 0);
  fa.depth_total.assign(std::size_t(horizon) + 1, 1);

  const int n = m.num_updates;
  Int total_paths = 1;
  for (int i = 0; i < horizon; ++i) total_paths *= n;
  const Rational path_prob = Rational(1, total_paths);

  std::vector<int> coins(std::size_t(horizon), 1);
  for (Int path = 0; path < total_paths; ++path) {
    Int rem = path;
    for (int i = 0; i < horizon; ++i) {
      coins[std::size_t(i)] = int(rem % n) + 1;
      rem /= n;
    }

    Configuration c = initial_configuration(m);
    int frozen_at = horizon + 1;  // first step index after which this path is dead
    HaltStatus final_status = HaltStatus::running;
    for (int t = 0; t < horizon; ++t) {
      if (c.state == m.halt_index) break;
      StepOutcome so = step(m, c, input, coins[std::size_t(t)]);
      if (so.status == HaltStatus::input_overrun) {
        final_status = HaltStatus::input_overrun;
        frozen_at = t + 1;
        break;
      }
      c = std::move(so.config);
      if (c.state == m.halt_index) {
        final_status = classify_halt(m, c, input);
        frozen_at = t + 1;
        break;
      }
    }

    switch (final_status) {
      case HaltStatus::running:
        fa.running += path_prob;
        break;
      case HaltStatus::halted_proper:
        fa.halting[{c.output, c.step_count}] += path_prob;
        fa.halted_proper += path_prob;
        break;
      case HaltStatus::halted_on_proper_prefix:
        fa.halted_on_proper_prefix += path_prob;
        break;
      case HaltStatus::input_overrun:
        fa.input_overrun += path_prob;
        break;
    }
    for (int mm = 0; mm <= horizon; ++mm)
      if (mm < frozen_at) fa.depth_running[std::size_t(mm)] += path_prob;
  }

  for (const auto& [key, p] : fa.halting) fa.out_given_in[key.first] += p;
  return fa;
}

inline bool forward_equal(const ForwardAnalysis& a, const ForwardAnalysis& b) {
  auto maps_equal = [](const auto& x, const auto& y) {
    if (x.size() != y.size()) return false;
    auto it = y.begin();
    for (const auto& [k, v] : x) {
      if (it->first != k || it->second != v) return false;
      ++it;
    }
    return true;
  };
  return maps_equal(a.halting, b.halting) && maps_equal(a.out_given_in, b.out_given_in) &&
         a.halted_proper == b.halted_proper &&
         a.halted_on_proper_prefix == b.halted_on_proper_prefix &&
         a.input_overrun == b.input_overrun && a.running == b.running &&
         a.depth_running == b.depth_running;
}

// Flat-path construction of the trajectory law: every (input, coin string)
// pair contributes its abstracted ID-sequence with weight prior * N^-T.
inline TrajectoryLaw naive_trajectory_law(const MachineSpec& m, const Prior& prior, int horizon,
                                          Abstraction abstraction) {
  TrajectoryLaw tl;
  tl.machine_name = m.name;
  tl.machine_hash = machine_hash_hex(m);
  tl.prior_descriptor = prior.descriptor;
  tl.horizon = horizon;
  tl.abstraction = abstraction;

  const int n = m.num_updates;
  Int total_paths = 1;
  for (int i = 0; i < horizon; ++i) total_paths *= n;

  for (const auto& [input, prior_w] : prior.table) {
    if (prior_w == 0) continue;
    const Rational path_prob = prior_w / Rational(total_paths);
    std::vector<int> coins(std::size_t(horizon), 1);
    for (Int path = 0; path < total_paths; ++path) {
      Int rem = path;
      for (int i = 0; i < horizon; ++i) {
        coins[std::size_t(i)] = int(rem % n) + 1;
        rem /= n;
      }
      Configuration c = initial_configuration(m);
      std::vector<std::string> seq{detail::render_id(m, c, input, abstraction, false)};
      for (int t = 0; t < horizon; ++t) {
        StepOutcome so = step(m, c, input, coins[std::size_t(t)]);
        if (so.status == HaltStatus::input_overrun) break;
        c = std::move(so.config);
        if (c.state == m.halt_index) {
          if (classify_halt(m, c, input) == HaltStatus::halted_proper) {
            seq.push_back(detail::render_id(m, c, input, abstraction, true));
            auto& pk = tl.by_k[t + 1];
            pk.seqs[seq] += path_prob;
            pk.raw_mass += path_prob;
          }
          break;
        }
        seq.push_back(detail::render_id(m, c, input, abstraction, false));
      }
    }
  }

  for (auto& [k, pk] : tl.by_k) tl.total_halt_mass += pk.raw_mass;
  if (tl.total_halt_mass == 0)
    throw AnalysisError("no-halting-mass: naive trajectory law is empty");
  for (auto& [k, pk] : tl.by_k) {
    pk.weight = pk.raw_mass / tl.total_halt_mass;
    for (auto& [seq, p] : pk.seqs) p /= pk.raw_mass;
  }
  return tl;
}

inline bool trajectory_equal(const TrajectoryLaw& a, const TrajectoryLaw& b) {
  if (a.by_k.size() != b.by_k.size() || a.total_halt_mass != b.total_halt_mass) return false;
  auto it = b.by_k.begin();
  for (const auto& [k, pk] : a.by_k) {
    if (it->first != k || it->second.raw_mass != pk.raw_mass || it->second.weight != pk.weight)
      return false;
    if (it->second.seqs != pk.seqs) return false;
    ++it;
  }
  return true;
}

}  // namespace sptm
