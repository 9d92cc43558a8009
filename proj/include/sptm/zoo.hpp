#pragma once

#include <string>
#include <vector>

#include "sptm/error.hpp"
#include "sptm/machine.hpp"

namespace sptm {

// Built-in machines used throughout the tests and available on the command
// line as zoo:<name>. They are small on purpose: every one of them can be
// checked against the naive path oracle in well under a second.
struct ZooEntry {
  std::string name;
  std::string description;
  std::string source;
};

inline const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = {
      {"copy1", "reads one bit and writes it to the output (deterministic bijection)",
       "name copy1\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states s halt\n"
       "start s\n"
       "rule * s 0 * -> halt - S 0\n"
       "rule * s 1 * -> halt - S 1\n"},

      {"erase1", "reads one bit and writes 0 regardless (deterministic 2-to-1 merge)",
       "name erase1\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states s halt\n"
       "start s\n"
       "rule * s 0 * -> halt - S 0\n"
       "rule * s 1 * -> halt - S 0\n"},

      {"coin1", "consumes one bit, ignores it, and outputs the coin flip",
       "name coin1\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states s halt\n"
       "start s\n"
       "rule 1 s 0 * -> halt - S 0\n"
       "rule 1 s 1 * -> halt - S 0\n"
       "rule 2 s 0 * -> halt - S 1\n"
       "rule 2 s 1 * -> halt - S 1\n"},

      {"loop", "reads nothing and never halts",
       "name loop\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states s halt\n"
       "start s\n"
       "rule * s - * -> s - S -\n"},

      {"geom", "echoes the input bit after a geometrically distributed delay",
       "name geom\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states a b0 b1 halt\n"
       "start a\n"
       "rule * a 0 * -> b0 - S -\n"
       "rule * a 1 * -> b1 - S -\n"
       "rule 1 b0 - * -> halt - S 0\n"
       "rule 2 b0 - * -> b0 - S -\n"
       "rule 1 b1 - * -> halt - S 1\n"
       "rule 2 b1 - * -> b1 - S -\n"},

      {"alt", "halts almost surely although neither pure update function ever halts",
       "name alt\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states a b halt\n"
       "start a\n"
       "rule 1 a 0 * -> b - S -\n"
       "rule 1 a 1 * -> b - S -\n"
       "rule 2 a - * -> a - S -\n"
       "rule 1 b - * -> b - S -\n"
       "rule 2 b - * -> halt - S -\n"},

      {"mix2", "reads two bits and outputs their AND (deterministic 3-to-1 on output 0)",
       "name mix2\n"
       "updates 2\n"
       "work_tapes 1\n"
       "states a b0 b1 halt\n"
       "start a\n"
       "rule * a 0 * -> b0 - S -\n"
       "rule * a 1 * -> b1 - S -\n"
       "rule * b0 0 * -> halt - S 0\n"
       "rule * b0 1 * -> halt - S 0\n"
       "rule * b1 0 * -> halt - S 0\n"
       "rule * b1 1 * -> halt - S 1\n"},
  };
  return entries;
}

inline const ZooEntry* find_zoo_entry(const std::string& name) {
  for (const auto& e : zoo_entries())
    if (e.name == name) return &e;
  return nullptr;
}

inline MachineSpec zoo_machine(const std::string& name) {
  const ZooEntry* e = find_zoo_entry(name);
  if (!e) throw Error("no zoo machine named '" + name + "'");
  return parse_machine(e->source);
}

}  // namespace sptm
