#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"
#include "sptm/joint.hpp"
#include "sptm/zoo.hpp"

using namespace sptm;

namespace {

JointLaw mix2_joint() {
  static MachineSpec m = zoo_machine("mix2");
  return build_joint(m, make_faircoin_prior({"00", "01", "10", "11"}), 10);
}

}  // namespace

TEST_CASE("build_joint: mix2 table, marginals and modal map") {
  JointLaw j = mix2_joint();
  CHECK(j.joint("00", "0") == Rational(1, 4));
  CHECK(j.joint("11", "1") == Rational(1, 4));
  CHECK(j.joint("11", "0") == 0);
  CHECK(j.out_marginal.at("0") == Rational(3, 4));
  CHECK(j.out_marginal.at("1") == Rational(1, 4));
  CHECK(j.modal("11").defined);
  CHECK(j.modal("11").y == "1");
  CHECK(j.modal("01").y == "0");
}

TEST_CASE("build_joint: coin1 is a tie everywhere") {
  JointLaw j = build_joint(zoo_machine("coin1"), make_faircoin_prior({"0", "1"}), 5);
  ModalResult r = j.modal("0");
  CHECK_FALSE(r.defined);
  CHECK(r.reason == ModalReason::tie);
}

TEST_CASE("build_joint: non-halting machine leaves an empty table, all mass residual") {
  JointLaw j = build_joint(zoo_machine("loop"), make_faircoin_prior({"0", "1"}), 5);
  CHECK(j.table.empty());
  CHECK(j.out_marginal.empty());
  for (const auto& [x, pi] : j.inputs) {
    CHECK(pi.running == 1);
    CHECK(pi.halted == 0);
  }
  ModalResult r = j.modal("0");
  CHECK_FALSE(r.defined);
  CHECK(r.reason == ModalReason::nonhalting);
}

TEST_CASE("build_joint: threads do not change anything") {
  JointLaw a = build_joint(zoo_machine("mix2"), make_uniform_prior(2), 10, 1);
  JointLaw b = build_joint(zoo_machine("mix2"), make_uniform_prior(2), 10, 8);
  CHECK(a.table == b.table);
  CHECK(a.out_marginal == b.out_marginal);
}

TEST_CASE("bayes_inverse: mix2 posterior of '0' is uniform over the three preimages") {
  PosteriorLaw post = bayes_inverse(mix2_joint(), "0");
  REQUIRE(post.posterior.size() == 3);
  CHECK(post.posterior.at("00") == Rational(1, 3));
  CHECK(post.posterior.at("01") == Rational(1, 3));
  CHECK(post.posterior.at("10") == Rational(1, 3));
}

TEST_CASE("bayes_inverse: deterministic bijection gives a point posterior") {
  JointLaw j = build_joint(zoo_machine("copy1"), make_faircoin_prior({"0", "1"}), 10);
  PosteriorLaw post = bayes_inverse(j, "1");
  REQUIRE(post.posterior.size() == 1);
  CHECK(post.posterior.at("1") == 1);
}

TEST_CASE("bayes_inverse: coin1 posterior mirrors the prior") {
  JointLaw j = build_joint(zoo_machine("coin1"), make_faircoin_prior({"0", "1"}), 5);
  PosteriorLaw post = bayes_inverse(j, "0");
  CHECK(post.posterior.at("0") == Rational(1, 2));
  CHECK(post.posterior.at("1") == Rational(1, 2));
}

TEST_CASE("bayes_inverse: zero-support target is an explicit error naming y") {
  try {
    bayes_inverse(mix2_joint(), "0101");
    FAIL("expected AnalysisError");
  } catch (const AnalysisError& e) {
    CHECK(std::string(e.what()).find("0101") != std::string::npos);
  }
}

TEST_CASE("posterior normalization holds exactly, prior normalized or not") {
  for (const auto& name : {"copy1", "erase1", "coin1", "geom", "mix2"}) {
    MachineSpec m = zoo_machine(name);
    Prior base = make_halting_set_prior(m, 1, 3, 12);
    for (const Rational& scale : {Rational(1), Rational(1, 3), Rational(7, 2)}) {
      JointLaw j = build_joint(m, base.scaled(scale), 12);
      for (const auto& [y, mass] : j.out_marginal) {
        if (mass == 0) continue;
        Rational total = 0;
        for (const auto& [x, q] : bayes_inverse(j, y).posterior) total += q;
        REQUIRE(total == 1);
      }
    }
  }
}

TEST_CASE("prior-scale invariance of posteriors and modal outputs") {
  MachineSpec m = zoo_machine("mix2");
  Prior base = make_explicit_prior(
      {{"00", Rational(1, 4)}, {"01", Rational(1, 4)}, {"10", Rational(1, 4)}, {"11", Rational(1, 4)}});
  JointLaw j0 = build_joint(m, base, 10);
  for (const Rational& scale : {Rational(1, 3), Rational(3)}) {
    JointLaw js = build_joint(m, base.scaled(scale), 10);
    for (const auto& y : {Bits("0"), Bits("1")}) {
      CHECK(bayes_inverse(j0, y).posterior == bayes_inverse(js, y).posterior);
    }
    for (const auto& [x, w] : base.table) {
      CHECK(j0.modal(x).y == js.modal(x).y);
      CHECK(j0.modal(x).defined == js.modal(x).defined);
    }
  }
}

TEST_CASE("modal output: the mode is independent of the prior") {
  MachineSpec m = zoo_machine("mix2");
  JointLaw a = build_joint(m, make_faircoin_prior({"00", "01", "10", "11"}), 10);
  JointLaw b = build_joint(
      m, make_explicit_prior({{"00", Rational(9, 10)},
                              {"01", Rational(1, 100)},
                              {"10", Rational(1, 100)},
                              {"11", Rational(1, 100)}}),
      10);
  for (const auto& x : {Bits("00"), Bits("01"), Bits("10"), Bits("11")})
    CHECK(a.modal(x).y == b.modal(x).y);
}

TEST_CASE("modal output: tie handling and robust margin") {
  JointLaw j = build_joint(zoo_machine("coin1"), make_faircoin_prior({"0", "1"}), 5);
  CHECK_FALSE(j.modal("0").defined);
  ModalResult lex = j.modal("0", {TieBreak::lex, false});
  CHECK(lex.defined);
  CHECK(lex.y == "0");
  ModalResult robust = j.modal("0", {TieBreak::undefined, true});
  CHECK_FALSE(robust.defined);
  // margin 0 < 1/|x| = 1
  CHECK((robust.reason == ModalReason::tie || robust.reason == ModalReason::margin));

  // deterministic machine: margin 1 - 0 >= 1/1 passes
  JointLaw c = build_joint(zoo_machine("copy1"), make_faircoin_prior({"0", "1"}), 5);
  ModalResult ok = c.modal("1", {TieBreak::undefined, true});
  CHECK(ok.defined);
  CHECK(ok.y == "1");
}

TEST_CASE("modal output: geom margin threshold is 1/|x| exactly") {
  // pi(out = '1' | '1') = 1 - 2^-9 at horizon 10, margin over the
  // empty runner-up clears 1/1
  JointLaw j = build_joint(zoo_machine("geom"), make_faircoin_prior({"0", "1"}), 10);
  ModalResult r = j.modal("1", {TieBreak::undefined, true});
  CHECK_FALSE(r.defined);  // margin is 511/512 < 1
  ModalResult plain = j.modal("1");
  CHECK(plain.defined);
  CHECK(plain.y == "1");
}

TEST_CASE("modal output: querying outside the support is an error") {
  CHECK_THROWS_AS(mix2_joint().modal("000"), AnalysisError);
}

TEST_CASE("modal mass sums prior weight over the modal preimage") {
  JointLaw j = mix2_joint();
  CHECK(modal_mass(j, "0") == Rational(3, 4));
  CHECK(modal_mass(j, "1") == Rational(1, 4));
  JointLaw c = build_joint(zoo_machine("coin1"), make_faircoin_prior({"0", "1"}), 5);
  CHECK(modal_mass(c, "0") == 0);  // every input is a tie under the default rule
  CHECK(modal_mass(c, "0", {TieBreak::lex, false}) == 1);
}

TEST_CASE("semi-distribution bookkeeping") {
  JointLaw j = build_joint(zoo_machine("geom"), make_faircoin_prior({"0", "1"}), 6);
  Rational out_total = 0;
  for (const auto& [y, mass] : j.out_marginal) out_total += mass;
  Rational modal_total = modal_mass(j, "0") + modal_mass(j, "1");
  CHECK(out_total <= 1);
  CHECK(modal_total <= 1);
  CHECK(out_total == 1 - Rational(1, 32));  // residual 2^-5 per input
}

TEST_CASE("totality probe: geom residual shrinks geometrically") {
  TotalityReport rep = totality_probe(zoo_machine("geom"), make_faircoin_prior({"0", "1"}), {4, 10});
  CHECK(rep.rows[0].max_residual == Rational(1, 8));
  CHECK(rep.rows[1].max_residual == Rational(1, 512));
  CHECK(rep.rows[0].certificate_c == 3);
  CHECK(rep.rows[1].certificate_c == 9);
}

TEST_CASE("totality probe: copy1 is total at horizon 2") {
  TotalityReport rep = totality_probe(zoo_machine("copy1"), make_faircoin_prior({"0", "1"}), {2});
  CHECK(rep.rows[0].max_residual == 0);
  CHECK(rep.rows[0].min_halted == 1);
  CHECK_FALSE(rep.rows[0].certificate_c.has_value());  // exact totality at this horizon
}

TEST_CASE("totality probe: alt halts almost surely though neither pure run halts") {
  MachineSpec m = zoo_machine("alt");
  CHECK(run_pure(m, 1, "0", 64).status == HaltStatus::running);
  CHECK(run_pure(m, 2, "0", 64).status == HaltStatus::running);
  std::vector<int> horizons;
  for (int t = 1; t <= 12; ++t) horizons.push_back(t);
  TotalityReport rep = totality_probe(m, make_faircoin_prior({"0", "1"}), horizons);
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    CHECK(rep.rows[i].max_residual <= rep.rows[i - 1].max_residual);
  CHECK(rep.rows[9].max_residual == Rational(11, 1024));
  CHECK(rep.rows[11].max_residual == Rational(13, 4096));
  CHECK(rep.rows[11].max_residual < Rational(1, 100));

  // cross-check the horizon-12 residual against the naive path oracle
  testoracle::Buckets b = testoracle::enumerate(m, "0", 12);
  CHECK(rep.rows[11].max_residual == Rational(b.running) / Rational(Int(b.leaves)));
}
