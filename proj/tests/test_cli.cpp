#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sptm/cli.hpp"

using namespace sptm;

namespace {

struct CliRun {
  int exit_code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_command(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) {
    path = std::string("cli_test_") + name;
    std::ofstream f(path);
    f << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("cli: forward json report matches the documented schema") {
  CliRun r = run({"forward", "zoo:geom", "--input", "1", "--horizon", "4", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  CHECK(rep["machine"]["name"] == "geom");
  CHECK(rep["horizon"] == 4);
  REQUIRE(rep["result"]["halting"].size() == 3);
  CHECK(rep["result"]["halting"][0]["output"] == "1");
  CHECK(rep["result"]["halting"][0]["tau"] == 2);
  CHECK(rep["result"]["halting"][0]["prob"] == "1/2");
  CHECK(rep["mass"]["running"] == "1/8");
  CHECK(rep["result"]["out_given_in"]["1"] == "7/8");
  // fixed top-level key set
  std::vector<std::string> keys;
  for (auto it = rep.begin(); it != rep.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"command", "machine", "prior", "horizon", "result",
                                         "mass", "certificates"});
}

TEST_CASE("cli: depth text output") {
  CliRun r = run({"depth", "zoo:mix2", "--prior", "faircoin", "--horizon", "10", "--output", "0",
                  "--variants", "S2"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "S2 = 1.584963 bits (2^-S2 = 1/3)\n");
}

TEST_CASE("cli: depth undefined variants are reported, not errors") {
  CliRun r = run({"depth", "zoo:coin1", "--prior", "faircoin", "--horizon", "5", "--output", "0",
                  "--variants", "S0,S2"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("S0 undefined") != std::string::npos);
  CHECK(r.out.find("S2 = 1.000000 bits") != std::string::npos);
}

TEST_CASE("cli: check passes on the zoo and is byte-identical across thread counts") {
  CliRun a = run({"check", "zoo:coin1", "--prior", "faircoin", "--horizon", "5"});
  CHECK(a.exit_code == 0);
  CHECK(a.out.find("all ") != std::string::npos);
  CliRun b = run({"check", "zoo:geom", "--prior", "faircoin", "--horizon", "8", "--threads", "1"});
  CliRun c = run({"check", "zoo:geom", "--prior", "faircoin", "--horizon", "8", "--threads", "8"});
  CHECK(b.exit_code == 0);
  CHECK(b.out == c.out);
  // and across repeated runs
  CliRun d = run({"check", "zoo:geom", "--prior", "faircoin", "--horizon", "8", "--threads", "8"});
  CHECK(c.out == d.out);
}

TEST_CASE("cli: exit code 1 for usage errors") {
  CHECK(run({"nosuchcommand"}).exit_code == 1);
  CHECK(run({"forward", "zoo:geom", "--input", "12", "--horizon", "4"}).exit_code == 1);
  CHECK(run({"forward", "zoo:geom"}).exit_code == 1);  // missing --input
  CHECK(run({}).exit_code == 1);
  CHECK(run({"depth", "zoo:mix2", "--output", "0", "--variants", "S9"}).exit_code == 2);
}

TEST_CASE("cli: exit code 2 for analysis errors") {
  // no posterior support
  CliRun r = run({"inverse", "zoo:mix2", "--prior", "faircoin", "--horizon", "10", "--output",
                  "0101"});
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("no posterior support") != std::string::npos);
  // machine file missing
  CHECK(run({"validate", "no_such_file.sptm"}).exit_code == 2);
  // detlimit on a stochastic machine
  CHECK(run({"detlimit", "zoo:geom", "--prior", "faircoin", "--horizon", "6", "--output", "1"})
            .exit_code == 2);
}

TEST_CASE("cli: exit code 3 when an invariant fails is reserved for check") {
  // no zoo machine fails; assert the plumbing by checking the success path
  CliRun r = run({"check", "zoo:mix2", "--prior", "faircoin", "--horizon", "8", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  CHECK(rep["result"]["all_pass"] == true);
  CHECK(rep["result"]["failures"] == 0);
}

TEST_CASE("cli: validate and zoo") {
  CliRun r = run({"validate", "zoo:mix2"});
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("valid") != std::string::npos);
  CHECK(r.out.find("deterministic") != std::string::npos);

  CliRun list = run({"zoo"});
  CHECK(list.exit_code == 0);
  for (const auto& e : zoo_entries()) CHECK(list.out.find(e.name) != std::string::npos);

  CliRun one = run({"zoo", "geom"});
  CHECK(one.exit_code == 0);
  CHECK(one.out.find("name geom") != std::string::npos);
  CHECK(run({"zoo", "nosuch"}).exit_code == 2);
}

TEST_CASE("cli: machine and prior files round through the front end") {
  TempFile machine("and.sptm", find_zoo_entry("mix2")->source);
  TempFile prior("prior.tsv", "00\t1/12\n01\t1/12\n10\t1/12\n11\t1/12\n");
  CliRun r = run({"inverse", machine.path, "--prior", "file:" + prior.path, "--horizon", "10",
                  "--output", "0", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  // scaled prior, same posterior thirds
  CHECK(rep["result"]["posterior"]["00"] == "1/3");
  CHECK(rep["result"]["sum"] == "1");
  CHECK(rep["prior"]["normalized"] == false);

  // bad machine file reports the offending line
  TempFile bad("bad.sptm", "name x\nupdates 2\nwork_tapes 1\nstates s halt\nstart s\nrule * s 2 * -> halt - S -\n");
  CliRun e = run({"validate", bad.path});
  CHECK(e.exit_code == 2);
  CHECK(e.err.find("line 6") != std::string::npos);
}

TEST_CASE("cli: classes with an inverter machine") {
  TempFile dup("dup.sptm",
               "name dup1\nupdates 2\nwork_tapes 1\nstates s w0 w1 halt\nstart s\n"
               "rule * s 0 * -> w0 - S 0\n"
               "rule * s 1 * -> w1 - S 1\n"
               "rule * w0 - * -> halt - S 0\n"
               "rule * w1 - * -> halt - S 1\n");
  CliRun r = run({"classes", "zoo:mix2", "--prior", "faircoin", "--horizon", "10", "--n", "2",
                  "--inverter", dup.path, "--epsilon", "1/2", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  CHECK(rep["result"]["decider"] == true);
  CHECK(rep["result"]["one_way"]["success"] == "1");
  CHECK(rep["result"]["one_way"]["one_way_consistent"] == false);
  CHECK(rep["result"]["preimages"]["0"].size() == 3);
}

TEST_CASE("cli: entropy subcommand") {
  CliRun r = run({"entropy", "zoo:erase1", "--prior", "uniform:1", "--horizon", "3",
                  "--abstraction", "consume"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("expected path entropy = 1.000000 bits") != std::string::npos);
  CHECK(r.out.find("io entropy S(in|out) = 1.000000 bits") != std::string::npos);

  CliRun rr = run({"entropy", "zoo:erase1", "--prior", "uniform:1", "--horizon", "3",
                   "--abstraction", "retain", "--format", "json"});
  REQUIRE(rr.exit_code == 0);
  Json rep = Json::parse(rr.out);
  CHECK(rep["result"]["expected_path_entropy"] == "0.000000");
  CHECK(rep["result"]["io_entropy"] == "1.000000");

  // no halting mass
  CHECK(run({"entropy", "zoo:loop", "--prior", "uniform:1", "--horizon", "4", "--abstraction",
             "retain"})
            .exit_code == 2);
}

TEST_CASE("cli: pathdepth and detlimit") {
  CliRun r = run({"pathdepth", "zoo:mix2", "--prior", "faircoin", "--horizon", "10", "--input",
                  "00", "--output", "0"});
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "s('00' -> '0') = 1.584963 bits (2^-s = 1/3)\n");

  CliRun d = run({"detlimit", "zoo:mix2", "--prior", "faircoin", "--horizon", "10", "--output",
                  "0", "--format", "json"});
  REQUIRE(d.exit_code == 0);
  Json rep = Json::parse(d.out);
  CHECK(rep["result"]["k_bounded"] == 2);
  CHECK(rep["result"]["q"] == "3/4");
  CHECK(rep["result"]["s1_equals_s2"] == true);
  CHECK(rep["result"]["depth_identity"] == true);
}

TEST_CASE("cli: joint subcommand surfaces residual masses") {
  CliRun r = run({"joint", "zoo:geom", "--prior", "faircoin", "--horizon", "4", "--format", "json"});
  REQUIRE(r.exit_code == 0);
  Json rep = Json::parse(r.out);
  // prior weight 1/2 times conditional running mass 1/8
  CHECK(rep["mass"]["per_input"]["1"]["running"] == "1/16");
  CHECK(rep["result"]["out_marginal"]["1"] == "7/16");
  CHECK(rep["certificates"]["halting_set"]["maxlen"] == 8);
}

TEST_CASE("cli: reports are deterministic across runs") {
  std::vector<std::string> args = {"joint", "zoo:mix2", "--prior", "uniform:2",
                                   "--horizon", "10", "--format", "json"};
  CHECK(run(args).out == run(args).out);
}
