#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sptm/depth.hpp"
#include "sptm/engine.hpp"
#include "sptm/entropy.hpp"
#include "sptm/error.hpp"
#include "sptm/joint.hpp"
#include "sptm/machine.hpp"
#include "sptm/oracle.hpp"
#include "sptm/prior.hpp"
#include "sptm/trajectory.hpp"
#include "sptm/zoo.hpp"

namespace sptm {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CheckOptions {
  int horizon = 10;
  int threads = 1;
  ModalOptions modal;
};

namespace detail {

constexpr double kEntropyTol = 1e-9;

inline bool close(double a, double b, double tol = kEntropyTol) { return std::fabs(a - b) <= tol; }

inline std::string join_bits(const std::vector<Bits>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + (v[i].empty() ? std::string("<empty>") : v[i]);
  return s + "}";
}

}  // namespace detail

// Zoo expected-fact tables: the frozen behavioral values each built-in
// machine must reproduce. Executed by `sptm check zoo:<name>`.
inline std::vector<CheckResult> zoo_fact_checks(const std::string& name, const CheckOptions& opt) {
  std::vector<CheckResult> out;
  auto fact = [&](const std::string& fname, bool pass, std::string detail = "") {
    out.push_back({"zoo-fact:" + fname, pass, std::move(detail)});
  };
  const int threads = opt.threads;

  if (name == "copy1") {
    MachineSpec m = zoo_machine("copy1");
    fact("shape", m.states.size() == 2 && m.rules.size() == 2 && m.is_deterministic());
    RunOutcome r = run_pure(m, 1, "0", 10);
    fact("run-pure", r.status == HaltStatus::halted_proper && r.output == "0" && r.steps == 1);
    ForwardAnalysis fa = explore(m, "1", 10, threads);
    fact("forward", fa.out_given_in.size() == 1 && fa.out_given_in["1"] == 1 &&
                        fa.halted_proper == 1 && fa.running == 0);
    auto h = enumerate_halting_set(m, 1, 3, 10);
    fact("halting-set", h.members == std::vector<Bits>{"0", "1"}, detail::join_bits(h.members));
    JointLaw j = build_joint(m, make_faircoin_prior({"0", "1"}), 10, threads);
    PosteriorLaw post = bayes_inverse(j, "1");
    fact("posterior", post.posterior.size() == 1 && post.posterior["1"] == 1);
    fact("depth", depth(j, "1", DepthVariant::S2).mass == 1 &&
                      depth(j, "1", DepthVariant::S0).mass == Rational(1, 2));
    DetLimitReport dl = det_limit_report(m, j, "0");
    fact("det-limit", dl.k_bounded == 1 && dl.q == Rational(1, 2) && dl.s1_equals_s2 &&
                          dl.depth_identity && dl.preimage_bounds);
    TrajectoryLaw tr = trajectory_law(m, make_uniform_prior(1), 3, Abstraction::retain);
    fact("invertible", step_exactly_invertible(tr, 1) && expected_path_entropy(tr) == 0.0);
    TrajectoryLaw tc = trajectory_law(m, make_uniform_prior(1), 3, Abstraction::consume);
    fact("consume-restores", step_entropies(tc, 1) == std::vector<double>{0.0});
    TotalityReport tot = totality_probe(m, make_faircoin_prior({"0", "1"}), {2}, threads);
    fact("total", tot.rows[0].max_residual == 0);
  } else if (name == "erase1") {
    MachineSpec m = zoo_machine("erase1");
    Prior u1 = make_uniform_prior(1);
    JointLaw j = build_joint(m, u1, 3, threads);
    FaninReport fr = fanin_depth(m, j, "0");
    fact("fanin", fr.count == 2 && fr.identity && detail::close(fr.depth_bits, 1.0));
    TrajectoryLaw tc = trajectory_law(m, u1, 3, Abstraction::consume);
    fact("consume-step", step_entropies(tc, 1).size() == 1 &&
                             detail::close(step_entropies(tc, 1)[0], 1.0));
    TrajectoryLaw tr = trajectory_law(m, u1, 3, Abstraction::retain);
    fact("retain-step", step_entropies(tr, 1) == std::vector<double>{0.0});
    EntropyProfile ec = endpoint_comparison(tc, j);
    fact("consume-endpoint", detail::close(ec.expected_path_entropy, 1.0) &&
                                 detail::close(ec.expected_endpoint, 1.0) &&
                                 detail::close(ec.io_entropy, 1.0) && detail::close(ec.gap, 0.0));
    EntropyProfile er = endpoint_comparison(tr, j);
    fact("retain-endpoint", er.expected_path_entropy == 0.0 && er.expected_endpoint == 0.0 &&
                                detail::close(er.io_entropy, 1.0) && er.gap == 0.0);
    JointLaw jf = build_joint(m, make_faircoin_prior({"0", "1"}), 10, threads);
    DetLimitReport dl = det_limit_report(m, jf, "0");
    fact("det-limit", dl.k_bounded == 1 && dl.q == 1 && dl.s2.mass == Rational(1, 2) &&
                          dl.s1_equals_s2 && dl.depth_identity);
  } else if (name == "coin1") {
    MachineSpec m = zoo_machine("coin1");
    ForwardAnalysis fa = explore(m, "0", 5, threads);
    fact("forward", fa.out_given_in["0"] == Rational(1, 2) && fa.out_given_in["1"] == Rational(1, 2) &&
                        fa.tau_mass(1) == 1 && fa.running == 0);
    JointLaw j = build_joint(m, make_faircoin_prior({"0", "1"}), 5, threads);
    ModalResult def = j.modal("0");
    fact("modal-tie", !def.defined && def.reason == ModalReason::tie);
    ModalResult lex = j.modal("0", {TieBreak::lex, false});
    fact("modal-lex", lex.defined && lex.y == "0");
    ModalResult rob = j.modal("0", {TieBreak::lex, true});
    fact("modal-robust", !rob.defined && rob.reason == ModalReason::margin);
    PosteriorLaw post = bayes_inverse(j, "0");
    fact("posterior", post.posterior["0"] == Rational(1, 2) && post.posterior["1"] == Rational(1, 2));
    PathDepth pd = path_depth(j, "0", "1");
    fact("path-depth", pd.mass == Rational(1, 2) && detail::close(pd.bits, 1.0));
    fact("modal-mass", modal_mass(j, "0") == 0);
    TrajectoryLaw tc = trajectory_law(m, make_uniform_prior(1), 3, Abstraction::consume);
    fact("consume-path-entropy", detail::close(expected_path_entropy(tc), 1.0));
  } else if (name == "loop") {
    MachineSpec m = zoo_machine("loop");
    ForwardAnalysis fa = explore(m, "0", 5, threads);
    fact("forward", fa.running == 1 && fa.halting.empty());
    auto h = enumerate_halting_set(m, 1, 2, 50);
    fact("halting-set-empty", h.members.empty());
    NonhaltBoundReport nb = nonhalt_bound_check(m, "0", 5, threads);
    bool all = nb.all_hold;
    for (const auto& row : nb.rows) all = all && row.applicable && row.running_mass == 1;
    fact("nonhalt-bound", all);
    bool threw = false;
    try {
      trajectory_law(m, make_faircoin_prior({"0", "1"}), 5, Abstraction::retain);
    } catch (const AnalysisError&) {
      threw = true;
    }
    fact("no-halting-mass-error", threw);
  } else if (name == "geom") {
    MachineSpec m = zoo_machine("geom");
    ForwardAnalysis fa = explore(m, "1", 4, threads);
    fact("forward", fa.halting[{"1", 2}] == Rational(1, 2) && fa.halting[{"1", 3}] == Rational(1, 4) &&
                        fa.halting[{"1", 4}] == Rational(1, 8) && fa.running == Rational(1, 8) &&
                        fa.out_given_in["1"] == Rational(7, 8));
    RunOutcome r = run_pure(m, 1, "1", 10);
    fact("run-pure", r.status == HaltStatus::halted_proper && r.output == "1" && r.steps == 2);
    NonhaltBoundReport nb = nonhalt_bound_check(m, "1", 5, threads);
    fact("nonhalt-na", !nb.rows[1].applicable && nb.rows[0].applicable && nb.rows[0].holds);
    TrajectoryLaw tr = trajectory_law(m, make_faircoin_prior({"0", "1"}), 4, Abstraction::retain);
    fact("tau-weights", tr.at(2).weight == Rational(4, 7) && tr.at(3).weight == Rational(2, 7) &&
                            tr.at(4).weight == Rational(1, 7));
    TotalityReport tot = totality_probe(m, make_faircoin_prior({"0", "1"}), {4, 10}, threads);
    fact("totality", tot.rows[0].max_residual == Rational(1, 8) &&
                         tot.rows[1].max_residual == Rational(1, 512));
  } else if (name == "alt") {
    MachineSpec m = zoo_machine("alt");
    fact("pure-runs-never-halt", run_pure(m, 1, "0", 50).status == HaltStatus::running &&
                                     run_pure(m, 2, "0", 50).status == HaltStatus::running);
    NonhaltBoundReport nb = nonhalt_bound_check(m, "0", 12, threads);
    bool all = nb.all_hold;
    for (const auto& row : nb.rows) all = all && row.applicable;
    fact("nonhalt-bound", all && nb.rows[2].running_mass == Rational(1, 2));
    std::vector<int> horizons;
    for (int t = 1; t <= 12; ++t) horizons.push_back(t);
    TotalityReport tot = totality_probe(m, make_faircoin_prior({"0", "1"}), horizons, threads);
    bool monotone = true;
    for (std::size_t i = 1; i < tot.rows.size(); ++i)
      monotone = monotone && tot.rows[i].max_residual <= tot.rows[i - 1].max_residual;
    fact("residual-monotone", monotone);
    fact("residual-at-10", tot.rows[9].max_residual == Rational(11, 1024));
    fact("totality-witness", tot.rows[11].max_residual == Rational(13, 4096) &&
                                 tot.rows[11].max_residual < Rational(1, 100));
  } else if (name == "mix2") {
    MachineSpec m = zoo_machine("mix2");
    int non_halt = 0;
    for (std::size_t i = 0; i < m.states.size(); ++i)
      if (int(i) != m.halt_index) ++non_halt;
    fact("shape", non_halt == 3 && m.rules.size() == 6 && m.num_updates == 2 && m.is_deterministic());
    auto h = enumerate_halting_set(m, 1, 3, 10);
    fact("halting-set", h.members == std::vector<Bits>{"00", "01", "10", "11"});
    Prior p = make_faircoin_prior(h.members);
    JointLaw j = build_joint(m, p, 10, threads);
    fact("joint", j.joint("00", "0") == Rational(1, 4) && j.out_marginal["0"] == Rational(3, 4) &&
                      j.out_marginal["1"] == Rational(1, 4));
    fact("modal", j.modal("11").y == "1" && j.modal("01").y == "0");
    PosteriorLaw post = bayes_inverse(j, "0");
    fact("posterior-thirds", post.posterior.size() == 3 && post.posterior["00"] == Rational(1, 3) &&
                                 post.posterior["01"] == Rational(1, 3) &&
                                 post.posterior["10"] == Rational(1, 3));
    fact("depth", depth(j, "1", DepthVariant::S0).mass == Rational(1, 4) &&
                      depth(j, "1", DepthVariant::S2).mass == 1 &&
                      depth(j, "0", DepthVariant::S2).mass == Rational(1, 3) &&
                      depth(j, "0", DepthVariant::S1).mass == depth(j, "0", DepthVariant::S2).mass);
    fact("modal-mass", modal_mass(j, "0") == Rational(3, 4) && modal_mass(j, "1") == Rational(1, 4));
    DetLimitReport d1 = det_limit_report(m, j, "1");
    DetLimitReport d0 = det_limit_report(m, j, "0");
    fact("det-limit", d1.k_bounded == 2 && d1.q == Rational(1, 4) && d1.depth_identity &&
                          d0.k_bounded == 2 && d0.q == Rational(3, 4) && d0.depth_identity &&
                          d0.s1_equals_s2 && d1.s1_equals_s2);
    JointLaw ju = build_joint(m, make_uniform_prior(2), 10, threads);
    fact("fanin", fanin_depth(m, ju, "0").count == 3 && fanin_depth(m, ju, "1").count == 1 &&
                      fanin_depth(m, ju, "0").identity && fanin_depth(m, ju, "1").identity);
    ClassProbeParams cp;
    cp.n = 2;
    ClassProbe probe = class_probes(j, cp);
    fact("class-probe", probe.b_n.size() == 4 && probe.decider &&
                            probe.preimages["0"] == std::vector<Bits>({"00", "01", "10"}));
    PathDepth pd = path_depth(j, "00", "0");
    fact("path-depth", pd.mass == Rational(1, 3) && detail::close(pd.bits, std::log2(3.0)));
  }
  return out;
}

// The generic invariant suite behind `sptm check`: every structural law the
// library promises, evaluated on one (machine, prior, horizon) triple.
// Checks that do not apply (e.g. deterministic-only identities on a genuinely
// stochastic machine) pass with a "skipped" detail rather than vanishing, so
// the output layout is stable.
inline std::vector<CheckResult> run_check_suite(const MachineSpec& m, const Prior& prior,
                                                const CheckOptions& opt) {
  std::vector<CheckResult> results;
  auto add = [&](const std::string& name, bool pass, std::string detail = "") {
    results.push_back({name, pass, std::move(detail)});
  };

  const int horizon = opt.horizon;
  JointLaw j = build_joint(m, prior, horizon, opt.threads);

  {  // mass conservation at every exploration depth, exact
    bool ok = true;
    for (const auto& [x, w] : prior.table) {
      ForwardAnalysis fa = explore(m, x, horizon, opt.threads);
      for (const auto& t : fa.depth_total) ok = ok && t == 1;
    }
    add("mass-conservation", ok, std::to_string(prior.table.size()) + " input(s), depths 0.." +
                                     std::to_string(horizon));
  }

  {  // merged engine vs naive N^T path oracle
    bool ok = true;
    int compared = 0;
    const int t_oracle = std::min(horizon, 8);
    for (const auto& [x, w] : prior.table) {
      if (x.size() > 3 || compared >= 8) continue;
      ok = ok && forward_equal(explore(m, x, t_oracle, opt.threads), naive_forward(m, x, t_oracle));
      ++compared;
    }
    add("oracle-equivalence", ok,
        std::to_string(compared) + " input(s) at horizon " + std::to_string(t_oracle));
  }

  {  // scheduling independence of the merge
    bool ok = true;
    for (const auto& [x, w] : prior.table)
      ok = ok && forward_equal(explore(m, x, horizon, 1), explore(m, x, horizon, 4));
    add("merge-soundness", ok, "threads 1 vs 4");
  }

  {  // halted mass non-decreasing, running non-increasing in the horizon
    bool ok = true;
    for (const auto& [x, w] : prior.table) {
      Rational prev_halted = -1, prev_running = 2;
      for (int t = 0; t <= std::min(horizon, 8); ++t) {
        ForwardAnalysis fa = explore(m, x, t, opt.threads);
        ok = ok && fa.halted_proper >= prev_halted && fa.running <= prev_running;
        prev_halted = fa.halted_proper;
        prev_running = fa.running;
      }
    }
    add("horizon-monotonicity", ok);
  }

  {  // Kraft total for the prior
    Rational total = kraft_check(prior);
    bool ok = !prior.support_prefix_free() || total <= 1;
    add("kraft", ok, "total " + rat_str(total) +
                         (prior.support_prefix_free() ? " on a prefix-free support" : ""));
  }

  {  // every posterior sums to exactly 1
    bool ok = true;
    int count = 0;
    for (const auto& [y, mass] : j.out_marginal) {
      if (mass == 0) continue;
      PosteriorLaw post = bayes_inverse(j, y);
      Rational s = 0;
      for (const auto& [x, q] : post.posterior) s += q;
      ok = ok && s == 1;
      ++count;
    }
    add("posterior-normalization", ok, std::to_string(count) + " output(s)");
  }

  {  // semi-distribution bookkeeping
    Rational out_total = 0;
    for (const auto& [y, mass] : j.out_marginal) out_total += mass;
    Rational modal_total = 0;
    for (const auto& [y, mass] : j.out_marginal) modal_total += modal_mass(j, y, opt.modal);
    Rational prior_total = prior.total();
    add("semi-distribution", out_total <= prior_total && modal_total <= prior_total,
        "sum pi(out) = " + rat_str(out_total) + ", sum pi(out-hat) = " + rat_str(modal_total) +
            ", prior total = " + rat_str(prior_total));
  }

  {  // prior scale invariance of posteriors, modal outputs and depths
    bool ok = true;
    for (const Rational& factor : {Rational(1, 3), Rational(3)}) {
      JointLaw js = build_joint(m, prior.scaled(factor), horizon, opt.threads);
      for (const auto& [y, mass] : j.out_marginal) {
        if (mass == 0) continue;
        PosteriorLaw a = bayes_inverse(j, y), b = bayes_inverse(js, y);
        ok = ok && a.posterior == b.posterior;
        for (DepthVariant v : {DepthVariant::S1, DepthVariant::S2}) {
          DepthValue da = depth(j, y, v, opt.modal), db = depth(js, y, v, opt.modal);
          ok = ok && da.defined == db.defined && (!da.defined || da.mass == db.mass);
        }
      }
      for (const auto& [x, w] : prior.table) {
        ModalResult a = j.modal(x, opt.modal), b = js.modal(x, opt.modal);
        ok = ok && a.defined == b.defined && a.y == b.y && a.reason == b.reason;
      }
      for (const auto& [xy, mass] : j.table)
        if (mass > 0)
          ok = ok && path_depth(j, xy.first, xy.second).mass ==
                         path_depth(js, xy.first, xy.second).mass;
    }
    add("prior-scale-invariance", ok, "factors 1/3 and 3");
  }

  {  // the modal map never depends on the prior weights
    std::vector<std::pair<Bits, Rational>> flat;
    for (const auto& [x, w] : prior.table) flat.emplace_back(x, Rational(1));
    if (!flat.empty()) {
      JointLaw jf = build_joint(m, make_explicit_prior(flat, "flat"), horizon, opt.threads);
      bool ok = true;
      for (const auto& [x, w] : prior.table) {
        ModalResult a = j.modal(x, opt.modal), b = jf.modal(x, opt.modal);
        ok = ok && a.defined == b.defined && a.y == b.y && a.reason == b.reason;
      }
      add("modal-prior-independence", ok);
    } else {
      add("modal-prior-independence", true, "skipped: empty prior support");
    }
  }

  {  // S1 <= S0, S1 = S0 - S0_sum, and the summed conditionals are exactly 0
    bool ok = true;
    int targets = 0;
    for (const auto& [y, mass] : j.out_marginal) {
      DepthValue s0 = depth(j, y, DepthVariant::S0, opt.modal);
      DepthValue s1 = depth(j, y, DepthVariant::S1, opt.modal);
      DepthValue s0s = depth(j, y, DepthVariant::S0_sum, opt.modal);
      DepthValue s1s = depth(j, y, DepthVariant::S1_sum, opt.modal);
      DepthValue s2s = depth(j, y, DepthVariant::S2_sum, opt.modal);
      if (s1.defined && s0.defined) ok = ok && s1.mass >= s0.mass;          // S1 <= S0
      if (s1.defined && s0.defined && s0s.defined) ok = ok && s1.mass * s0s.mass == s0.mass;
      if (s1s.defined) ok = ok && s1s.mass == 1;
      if (s2s.defined) ok = ok && s2s.mass == 1;
      ++targets;
    }
    add("depth-identities", ok, std::to_string(targets) + " target(s)");
  }

  if (m.is_deterministic() && prior.kind == PriorKind::faircoin) {
    bool ok = true;
    int targets = 0;
    for (const auto& [y, mass] : j.out_marginal) {
      if (mass == 0) continue;
      DetLimitReport dl = det_limit_report(m, j, y, opt.modal);
      ok = ok && dl.s1_equals_s2 && dl.depth_identity && dl.preimage_bounds;
      ++targets;
    }
    add("det-limit", ok, std::to_string(targets) + " target(s)");
  } else {
    add("det-limit", true, "skipped: needs deterministic machine + faircoin prior");
  }

  if (m.is_deterministic() && prior.kind == PriorKind::uniform_n) {
    bool ok = true;
    for (const auto& [y, mass] : j.out_marginal)
      if (mass > 0) ok = ok && fanin_depth(m, j, y, opt.modal).identity;
    add("fanin-identity", ok);
  } else {
    add("fanin-identity", true, "skipped: needs deterministic machine + uniform prior");
  }

  for (Abstraction a : {Abstraction::retain, Abstraction::consume, Abstraction::io}) {
    const std::string label = std::string("entropy-") + to_string(a);
    const int t_traj = std::min(horizon, 8);
    try {
      TrajectoryLaw tl = trajectory_law(m, prior, t_traj, a);
      bool ok = true;
      for (const auto& [k, pk] : tl.by_k) {
        for (double h : step_entropies(tl, k)) ok = ok && h >= 0.0;
        ReverseChainRule rc = reverse_chain_rule(tl, k);
        ok = ok && detail::close(rc.summed_steps, rc.chain);
        ok = ok && rc.summed_steps + detail::kEntropyTol >= endpoint_entropy(tl, k);
      }
      ok = ok && trajectory_equal(tl, naive_trajectory_law(m, prior, t_traj, a));
      add(label, ok, std::to_string(tl.by_k.size()) + " halting time(s) at horizon " +
                         std::to_string(t_traj));
    } catch (const AnalysisError&) {
      add(label, true, "skipped: no halting mass within horizon");
    }
  }

  if (m.num_updates == 2 && horizon >= 1) {
    bool ok = true;
    for (const auto& [x, w] : prior.table)
      ok = ok && nonhalt_bound_check(m, x, std::min(horizon, 12), opt.threads).all_hold;
    add("nonhalt-bound", ok, "m <= " + std::to_string(std::min(horizon, 12)));
  } else {
    add("nonhalt-bound", true, "skipped: bound stated for N = 2");
  }

  {  // prefix-freeness and horizon stability of the enumerated halting set
    const int L = 4;
    auto h1 = enumerate_halting_set(m, 1, L, horizon);
    bool prefix_free = true;
    for (std::size_t i = 0; i < h1.members.size(); ++i)
      for (std::size_t k = 0; k < h1.members.size(); ++k)
        if (i != k && is_proper_prefix(h1.members[i], h1.members[k])) prefix_free = false;
    auto h2 = enumerate_halting_set(m, 1, L, horizon + 16);
    bool stable = true;
    for (const auto& x : h2.members) {
      bool was = std::find(h1.members.begin(), h1.members.end(), x) != h1.members.end();
      // A new member must be one that was still unresolved at the lower horizon.
      if (!was && run_pure(m, 1, x, horizon).status != HaltStatus::running) stable = false;
    }
    for (const auto& x : h1.members) {
      bool kept = std::find(h2.members.begin(), h2.members.end(), x) != h2.members.end();
      if (!kept) {
        // Only a newly resolved shorter member may shadow an old one.
        bool shadowed = false;
        for (const auto& mem : h2.members)
          if (is_proper_prefix(mem, x) && run_pure(m, 1, mem, horizon).status == HaltStatus::running)
            shadowed = true;
        if (!shadowed) stable = false;
      }
    }
    add("halting-set", prefix_free && stable,
        std::to_string(h1.members.size()) + " member(s) at L_max " + std::to_string(L));
  }

  return results;
}

}  // namespace sptm
