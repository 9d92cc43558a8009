#pragma once

#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/error.hpp"
#include "sptm/machine.hpp"

namespace sptm {

enum class HaltStatus { running, halted_proper, halted_on_proper_prefix, input_overrun };

inline const char* to_string(HaltStatus s) {
  switch (s) {
    case HaltStatus::running: return "running";
    case HaltStatus::halted_proper: return "halted_proper";
    case HaltStatus::halted_on_proper_prefix: return "halted_on_proper_prefix";
    case HaltStatus::input_overrun: return "input_overrun";
  }
  return "?";
}

// Sparse two-way binary tape: only 1-cells are stored, everything else reads
// as 0. The head starts at position 0.
struct WorkTape {
  std::map<int, int> ones;
  int head = 0;

  int read() const { return ones.count(head) ? 1 : 0; }

  void write(int bit) {
    if (bit == 1) ones[head] = 1;
    else if (bit == 0) ones.erase(head);
  }

  void move(char dir) {
    if (dir == 'L') --head;
    else if (dir == 'R') ++head;
  }

  friend bool operator==(const WorkTape& a, const WorkTape& b) {
    return a.head == b.head && a.ones == b.ones;
  }
  friend bool operator<(const WorkTape& a, const WorkTape& b) {
    if (a.head != b.head) return a.head < b.head;
    return a.ones < b.ones;
  }
};

// One instantaneous description: control state, consumed-input count, work
// tapes, output written so far. step_count is bookkeeping only and is
// excluded from identity, so equal IDs reached along different paths merge.
struct Configuration {
  int state = -1;
  int cursor = 0;
  std::vector<WorkTape> tapes;
  Bits output;
  int step_count = 0;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.state == b.state && a.cursor == b.cursor && a.output == b.output &&
           a.tapes == b.tapes;
  }
  friend bool operator<(const Configuration& a, const Configuration& b) {
    return std::tie(a.state, a.cursor, a.output, a.tapes) <
           std::tie(b.state, b.cursor, b.output, b.tapes);
  }
};

inline Configuration initial_configuration(const MachineSpec& m) {
  Configuration c;
  c.state = m.start_index;
  c.tapes.resize(std::size_t(m.work_tapes));
  return c;
}

// Pure classification: in the halt state the run counts as proper only when
// the whole provided input has been consumed ("x is to the left of the input
// head"); halting early leaves the input outside the machine's prefix-free
// halting set.
inline HaltStatus classify_halt(const MachineSpec& m, const Configuration& c, const Bits& input) {
  if (c.state != m.halt_index) return HaltStatus::running;
  return c.cursor == int(input.size()) ? HaltStatus::halted_proper
                                       : HaltStatus::halted_on_proper_prefix;
}

struct StepOutcome {
  Configuration config;
  HaltStatus status = HaltStatus::running;
};

namespace detail {

inline bool work_matches(const TransitionRule& r, const Configuration& c) {
  for (std::size_t t = 0; t < r.wread.size(); ++t) {
    if (r.wread[t] == -1) continue;
    if (c.tapes[t].read() != r.wread[t]) return false;
  }
  return true;
}

inline std::string domain_point_str(const MachineSpec& m, const Configuration& c) {
  std::ostringstream os;
  os << "state '" << m.state_name(c.state) << "', work symbols";
  for (const auto& t : c.tapes) os << " " << t.read();
  return os.str();
}

}  // namespace detail

// Applies the unique rule of update function fn at c. Halt is absorbing; a
// read attempt past the provided input returns the configuration unchanged
// with status input_overrun (that probability branch belongs to extensions
// of the input). A reached point with no rule is a hard error.
inline StepOutcome step(const MachineSpec& m, const Configuration& c, const Bits& input, int fn) {
  if (fn < 1 || fn > m.num_updates)
    throw Error("update function index " + std::to_string(fn) + " out of range");
  if (c.state == m.halt_index) return {c, classify_halt(m, c, input)};

  const TransitionRule* no_read = nullptr;
  const TransitionRule* consume[2] = {nullptr, nullptr};
  for (int ri : m.candidates(c.state, fn)) {
    const TransitionRule& r = m.rules[std::size_t(ri)];
    if (!detail::work_matches(r, c)) continue;
    if (r.consumes) consume[r.in_bit] = &r;
    else no_read = &r;
  }

  const TransitionRule* chosen = nullptr;
  if (no_read) {
    chosen = no_read;
  } else if (consume[0] || consume[1]) {
    if (c.cursor == int(input.size())) return {c, HaltStatus::input_overrun};
    const int bit = input[std::size_t(c.cursor)] - '0';
    chosen = consume[bit];
    if (!chosen)
      throw IncompleteMachineError("machine '" + m.name + "': no rule of update function " +
                                   std::to_string(fn) + " for input symbol " + std::to_string(bit) +
                                   " at " + detail::domain_point_str(m, c));
  } else {
    throw IncompleteMachineError("machine '" + m.name + "': no rule of update function " +
                                 std::to_string(fn) + " at " + detail::domain_point_str(m, c));
  }

  Configuration next = c;
  if (chosen->consumes) ++next.cursor;
  for (std::size_t t = 0; t < next.tapes.size(); ++t) {
    next.tapes[t].write(chosen->wwrite[t]);
    next.tapes[t].move(chosen->wmove[t]);
  }
  if (chosen->out >= 0) next.output.push_back(char('0' + chosen->out));
  next.state = chosen->dst;
  ++next.step_count;
  return {std::move(next), classify_halt(m, next, input)};
}

struct RunOutcome {
  HaltStatus status = HaltStatus::running;
  Bits output;
  int steps = 0;
};

// Runs a single update function for up to `horizon` steps (the deterministic
// TM delta_fn). Used for halting-set enumeration and the non-halting bound.
inline RunOutcome run_pure(const MachineSpec& m, int fn, const Bits& input, int horizon) {
  Configuration c = initial_configuration(m);
  for (int t = 0; t < horizon; ++t) {
    if (c.state == m.halt_index) break;
    StepOutcome so = step(m, c, input, fn);
    if (so.status == HaltStatus::input_overrun)
      return {HaltStatus::input_overrun, c.output, c.step_count};
    c = std::move(so.config);
  }
  return {classify_halt(m, c, input), c.output, c.step_count};
}

}  // namespace sptm
