#include <catch2/catch_amalgamated.hpp>

#include "sptm/machine.hpp"
#include "sptm/step.hpp"
#include "sptm/zoo.hpp"

using namespace sptm;

namespace {

// Tiny deterministic generator for property-style runs.
struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() { return s = s * 6364136223846793005ull + 1442695040888963407ull; }
  int pick(int n) { return int(next() >> 33) % n; }
};

}  // namespace

TEST_CASE("all zoo machines parse and validate") {
  for (const auto& e : zoo_entries()) {
    MachineSpec m = zoo_machine(e.name);
    CHECK(m.name == e.name);
    CHECK(m.num_updates == 2);
    CHECK(m.halt_index >= 0);
    CHECK(m.start_index != m.halt_index);
  }
}

TEST_CASE("copy1 shape") {
  MachineSpec m = zoo_machine("copy1");
  CHECK(m.states.size() == 2);  // s + halt
  // Copying a bit needs one rule per input symbol; both belong to every
  // update function.
  CHECK(m.rules.size() == 2);
  for (const auto& r : m.rules) CHECK(r.fn == 0);
  CHECK(m.is_deterministic());
}

TEST_CASE("mix2 shape") {
  MachineSpec m = zoo_machine("mix2");
  int non_halt = 0;
  for (std::size_t i = 0; i < m.states.size(); ++i)
    if (int(i) != m.halt_index) ++non_halt;
  CHECK(non_halt == 3);
  CHECK(m.rules.size() == 6);
  CHECK(m.num_updates == 2);
  CHECK(m.is_deterministic());  // delta1 == delta2
}

TEST_CASE("geom is genuinely stochastic") {
  CHECK_FALSE(zoo_machine("geom").is_deterministic());
  CHECK_FALSE(zoo_machine("alt").is_deterministic());
  CHECK_FALSE(zoo_machine("coin1").is_deterministic());
}

TEST_CASE("parser reports syntax errors with position") {
  try {
    parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\nrule * s 2 * -> halt - S -\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 6);
    CHECK(e.col == 10);
    CHECK(std::string(e.what()).find("input read") != std::string::npos);
  }
}

TEST_CASE("parser rejects conflicting rules in the same update function") {
  const std::string text =
      "name bad\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
      "rule 1 s 0 * -> halt - S 0\n"
      "rule 1 s 0 * -> s - S -\n";
  CHECK_THROWS_AS(parse_machine(text), ParseError);
  // A no-read rule overlaps every consume rule on the same state.
  const std::string text2 =
      "name bad\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
      "rule 1 s 0 * -> halt - S 0\n"
      "rule 1 s - * -> s - S -\n";
  CHECK_THROWS_AS(parse_machine(text2), ParseError);
  // Same two rules on different update functions do not conflict.
  const std::string ok =
      "name ok\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
      "rule 1 s 0 * -> halt - S 0\n"
      "rule 2 s - * -> s - S -\n";
  CHECK_NOTHROW(parse_machine(ok));
}

TEST_CASE("parser rejects structural mistakes") {
  CHECK_THROWS_AS(parse_machine("updates 2\nwork_tapes 1\nstates s halt\nstart s\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s t\nstart s\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s halt\nstart nosuch\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_machine("name x\nupdates 2\nwork_tapes 1\nstates halt\nstart halt\n"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s s halt\nstart s\n"), ParseError);
  CHECK_THROWS_AS(
      parse_machine("name x\nupdates 1\nwork_tapes 1\nstates s halt\nstart s\n"), ParseError);
  // unknown destination state
  CHECK_THROWS_AS(parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
                                "rule * s 0 * -> nosuch - S -\n"),
                  ParseError);
  // rule out of halt
  CHECK_THROWS_AS(parse_machine("name x\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
                                "rule * halt 0 * -> s - S -\n"),
                  ParseError);
}

TEST_CASE("serialize round-trips") {
  for (const auto& e : zoo_entries()) {
    MachineSpec m = zoo_machine(e.name);
    MachineSpec again = parse_machine(serialize_machine(m));
    CHECK(m == again);
    CHECK(machine_hash(m) == machine_hash(again));
  }
}

TEST_CASE("comments and blank lines are ignored") {
  MachineSpec m = parse_machine(
      "# a machine\n\nname c  # trailing\nupdates 2\n\nwork_tapes 1\nstates s halt\nstart s\n"
      "rule * s - * -> halt - S 1  # emit\n");
  CHECK(m.name == "c");
  CHECK(m.rules.size() == 1);
}

TEST_CASE("step: copy1 single step hand trace") {
  MachineSpec m = zoo_machine("copy1");
  Configuration c = initial_configuration(m);
  StepOutcome so = step(m, c, "1", 1);
  CHECK(so.status == HaltStatus::halted_proper);
  CHECK(so.config.state == m.halt_index);
  CHECK(so.config.output == "1");
  CHECK(so.config.cursor == 1);
  CHECK(so.config.step_count == 1);
}

TEST_CASE("step: halt is absorbing") {
  MachineSpec m = zoo_machine("copy1");
  Configuration c = initial_configuration(m);
  c = step(m, c, "1", 1).config;
  for (int fn = 1; fn <= 2; ++fn) {
    StepOutcome so = step(m, c, "1", fn);
    CHECK(so.config == c);
    CHECK(so.config.step_count == c.step_count);
    CHECK(so.status == HaltStatus::halted_proper);
  }
}

TEST_CASE("step: reading past the provided input is an overrun, not an error") {
  MachineSpec m = zoo_machine("copy1");
  Configuration c = initial_configuration(m);
  StepOutcome so = step(m, c, "", 1);
  CHECK(so.status == HaltStatus::input_overrun);
  CHECK(so.config == c);
}

TEST_CASE("step: missing rule is a hard error") {
  // only the 0-branch is covered
  MachineSpec m = parse_machine(
      "name partial\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\n"
      "rule * s 0 * -> halt - S 0\n");
  Configuration c = initial_configuration(m);
  CHECK_THROWS_AS(step(m, c, "1", 1), IncompleteMachineError);
  CHECK(step(m, c, "0", 1).status == HaltStatus::halted_proper);
  // with no input left, the attempted read is an overrun even though the
  // rule table is partial
  CHECK(step(m, c, "", 1).status == HaltStatus::input_overrun);
}

TEST_CASE("classify_halt") {
  MachineSpec m = zoo_machine("copy1");
  Configuration c = initial_configuration(m);
  CHECK(classify_halt(m, c, "10") == HaltStatus::running);
  c.state = m.halt_index;
  c.cursor = 1;
  CHECK(classify_halt(m, c, "10") == HaltStatus::halted_on_proper_prefix);
  c.cursor = 2;
  CHECK(classify_halt(m, c, "10") == HaltStatus::halted_proper);
}

TEST_CASE("run_pure examples") {
  RunOutcome r = run_pure(zoo_machine("copy1"), 1, "0", 10);
  CHECK(r.status == HaltStatus::halted_proper);
  CHECK(r.output == "0");
  CHECK(r.steps == 1);

  // pure delta-1 of alt loops a -> b -> b -> ...
  r = run_pure(zoo_machine("alt"), 1, "0", 50);
  CHECK(r.status == HaltStatus::running);
  CHECK(r.steps == 50);
  r = run_pure(zoo_machine("alt"), 2, "0", 50);
  CHECK(r.status == HaltStatus::running);

  r = run_pure(zoo_machine("geom"), 1, "1", 10);
  CHECK(r.status == HaltStatus::halted_proper);
  CHECK(r.output == "1");
  CHECK(r.steps == 2);
}

TEST_CASE("work tape write/move mechanics") {
  // writes 1, walks right, then reads the zero cell and halts echoing what
  // it saw at the start position on the way back
  MachineSpec m = parse_machine(
      "name tape\nupdates 2\nwork_tapes 1\nstates s t u halt\nstart s\n"
      "rule * s - * -> t 1 R -\n"    // write 1, move right
      "rule * t - 0 -> u - L -\n"    // fresh cell still 0
      "rule * u - 1 -> halt - S 1\n" // back on the written 1
      "rule * u - 0 -> halt - S 0\n");
  Configuration c = initial_configuration(m);
  c = step(m, c, "", 1).config;
  CHECK(c.tapes[0].ones.count(0) == 1);
  CHECK(c.tapes[0].head == 1);
  c = step(m, c, "", 1).config;
  CHECK(c.tapes[0].head == 0);
  StepOutcome so = step(m, c, "", 1);
  CHECK(so.config.output == "1");
  CHECK(so.status == HaltStatus::halted_proper);
}

TEST_CASE("configuration identity ignores step_count") {
  MachineSpec m = zoo_machine("loop");
  Configuration a = initial_configuration(m);
  Configuration b = step(m, a, "", 1).config;  // same ID, one step later
  CHECK(b.step_count == 1);
  CHECK(a == b);
  CHECK_FALSE(a < b);
  CHECK_FALSE(b < a);
}

TEST_CASE("property: step is pure and the prefix architecture holds") {
  Lcg rng(0xC0FFEE);
  for (const auto& e : zoo_entries()) {
    MachineSpec m = zoo_machine(e.name);
    for (int trial = 0; trial < 25; ++trial) {
      Bits input;
      for (int i = rng.pick(4); i > 0; --i) input.push_back(char('0' + rng.pick(2)));
      Configuration c = initial_configuration(m);
      for (int t = 0; t < 12; ++t) {
        int fn = 1 + rng.pick(m.num_updates);
        StepOutcome once = step(m, c, input, fn);
        StepOutcome twice = step(m, c, input, fn);
        REQUIRE(once.config == twice.config);
        REQUIRE(once.status == twice.status);
        if (once.status == HaltStatus::input_overrun) break;
        // cursor never moves left, output is append-only
        REQUIRE(once.config.cursor >= c.cursor);
        REQUIRE(once.config.output.substr(0, c.output.size()) == c.output);
        c = once.config;
        if (c.state == m.halt_index) {
          Configuration after = step(m, c, input, 1 + rng.pick(m.num_updates)).config;
          REQUIRE(after == c);
          break;
        }
      }
    }
  }
}
