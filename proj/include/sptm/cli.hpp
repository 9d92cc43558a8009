#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sptm/check.hpp"
#include "sptm/depth.hpp"
#include "sptm/engine.hpp"
#include "sptm/entropy.hpp"
#include "sptm/error.hpp"
#include "sptm/joint.hpp"
#include "sptm/machine.hpp"
#include "sptm/prior.hpp"
#include "sptm/report.hpp"
#include "sptm/trajectory.hpp"
#include "sptm/zoo.hpp"

namespace sptm {
namespace cli {

// exit codes: 0 ok, 1 usage error, 2 analysis/parse error, 3 invariant failure

inline MachineSpec load_machine(const std::string& ref) {
  if (ref.rfind("zoo:", 0) == 0) return zoo_machine(ref.substr(4));
  std::ifstream f(ref);
  if (!f) throw Error("cannot open machine file '" + ref + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_machine(ss.str());
}

// Prior spec grammar: faircoin[:fn=<i>,maxlen=<L>] | uniform:<n> | file:<path>
inline Prior resolve_prior(const std::string& spec, const MachineSpec& m, int horizon,
                           Json* certificates) {
  if (spec == "faircoin" || spec.rfind("faircoin:", 0) == 0) {
    int fn = 1, maxlen = 8;
    if (spec.size() > 9) {
      std::stringstream ss(spec.substr(9));
      std::string part;
      while (std::getline(ss, part, ',')) {
        if (part.rfind("fn=", 0) == 0) fn = std::stoi(part.substr(3));
        else if (part.rfind("maxlen=", 0) == 0) maxlen = std::stoi(part.substr(7));
        else throw Error("bad faircoin prior option '" + part + "'");
      }
    }
    Prior p = make_halting_set_prior(m, fn, maxlen, horizon);
    if (certificates)
      (*certificates)["halting_set"] =
          Json{{"fn", fn}, {"maxlen", maxlen}, {"horizon", horizon}};
    return p;
  }
  if (spec.rfind("uniform:", 0) == 0) return make_uniform_prior(std::stoi(spec.substr(8)));
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    std::ifstream f(path);
    if (!f) throw Error("cannot open prior file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_prior_file(ss.str(), "file:" + path);
  }
  throw Error("bad prior spec '" + spec + "' (expected faircoin[:fn=i,maxlen=L] | uniform:<n> | file:<path>)");
}

struct GlobalOpts {
  std::string format = "text";
  int threads = 1;
  std::string tie_break = "undefined";
  bool robust_margin = false;

  ModalOptions modal() const {
    return {tie_break == "lex" ? TieBreak::lex : TieBreak::undefined, robust_margin};
  }
};

inline Json base_report(const std::vector<std::string>& args) {
  Json rep;
  std::string cmd = "sptm";
  for (const auto& a : args) cmd += " " + a;
  rep["command"] = cmd;
  rep["machine"] = nullptr;
  rep["prior"] = nullptr;
  rep["horizon"] = nullptr;
  rep["result"] = Json::object();
  rep["mass"] = Json::object();
  rep["certificates"] = Json::object();
  return rep;
}

inline void set_machine(Json& rep, const MachineSpec& m) {
  rep["machine"] = Json{{"name", m.name}, {"hash", machine_hash_hex(m)}};
}

inline void set_prior(Json& rep, const Prior& p) {
  rep["prior"] = Json{{"descriptor", p.descriptor},
                      {"kind", to_string(p.kind)},
                      {"support_size", p.table.size()},
                      {"total", rat_str(p.total())},
                      {"normalized", p.normalized}};
  if (p.kind == PriorKind::uniform_n)
    rep["prior"]["note"] =
        "uniform over length exactly n (prefix-free stand-in for lengths <= n)";
}

inline Json modal_json(const ModalResult& r) {
  if (r.defined) return Json{{"defined", true}, {"output", r.y}};
  return Json{{"defined", false}, {"reason", to_string(r.reason)}};
}

inline void emit(const Json& rep, const GlobalOpts& g, std::ostream& out,
                 const std::string& text) {
  if (g.format == "json") out << rep.dump(2) << "\n";
  else out << text;
}

struct DepthArgs {
  std::string machine, prior = "faircoin", output;
  int horizon = 10;
  std::string variants = "S0,S1,S2,S0_sum,S1_sum,S2_sum";
};

inline DepthVariant variant_from_string(const std::string& s) {
  for (DepthVariant v : all_depth_variants())
    if (s == to_string(v)) return v;
  throw Error("unknown depth variant '" + s + "'");
}

inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact analysis of stochastic process Turing machines"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--threads", g.threads, "worker threads for engine calls")->check(CLI::Range(1, 64));
  app.add_option("--tie-break", g.tie_break, "modal output tie rule")
      ->check(CLI::IsMember({"undefined", "lex"}));
  app.add_flag("--robust-margin", g.robust_margin,
               "require modal margin >= 1/|x|, else undefined");

  auto bits_check = CLI::Validator(
      [](std::string& s) { return is_bits(s) ? std::string() : "'" + s + "' is not a bit string"; },
      "BITS");

  struct {
    std::string machine, input;
    int horizon = 10;
  } fwd;
  CLI::App* c_forward = app.add_subcommand("forward", "exact forward distribution for one input");
  c_forward->add_option("machine", fwd.machine, "machine file or zoo:<name>")->required();
  c_forward->add_option("--input", fwd.input, "input bit string")->required()->check(bits_check);
  c_forward->add_option("--horizon", fwd.horizon, "step horizon")->check(CLI::Range(0, 64));

  struct {
    std::string machine, prior = "faircoin";
    int horizon = 10;
  } jnt;
  CLI::App* c_joint = app.add_subcommand("joint", "joint law pi(in, out) under a prior");
  c_joint->add_option("machine", jnt.machine)->required();
  c_joint->add_option("--prior", jnt.prior, "faircoin[:fn=i,maxlen=L] | uniform:<n> | file:<path>");
  c_joint->add_option("--horizon", jnt.horizon)->check(CLI::Range(0, 64));

  struct {
    std::string machine, prior = "faircoin", output;
    int horizon = 10;
  } inv;
  CLI::App* c_inverse = app.add_subcommand("inverse", "Bayesian inverse pi(in | out = y)");
  c_inverse->add_option("machine", inv.machine)->required();
  c_inverse->add_option("--prior", inv.prior);
  c_inverse->add_option("--horizon", inv.horizon)->check(CLI::Range(0, 64));
  c_inverse->add_option("--output", inv.output, "target output string")->required()->check(bits_check);

  DepthArgs dep;
  CLI::App* c_depth = app.add_subcommand("depth", "stochastic depth of a target string");
  c_depth->add_option("machine", dep.machine)->required();
  c_depth->add_option("--prior", dep.prior);
  c_depth->add_option("--horizon", dep.horizon)->check(CLI::Range(0, 64));
  c_depth->add_option("--output", dep.output)->required()->check(bits_check);
  c_depth->add_option("--variants", dep.variants, "comma-separated subset of S0,S1,S2,S0_sum,S1_sum,S2_sum");

  struct {
    std::string machine, prior = "faircoin", input, output;
    int horizon = 10;
  } pth;
  CLI::App* c_path = app.add_subcommand("pathdepth", "stochastic depth of generating y from x");
  c_path->add_option("machine", pth.machine)->required();
  c_path->add_option("--prior", pth.prior);
  c_path->add_option("--horizon", pth.horizon)->check(CLI::Range(0, 64));
  c_path->add_option("--input", pth.input)->required()->check(bits_check);
  c_path->add_option("--output", pth.output)->required()->check(bits_check);

  struct {
    std::string machine, prior = "faircoin", abstraction = "retain";
    int horizon = 8;
  } ent;
  CLI::App* c_entropy = app.add_subcommand("entropy", "backward step entropies along trajectories");
  c_entropy->add_option("machine", ent.machine)->required();
  c_entropy->add_option("--prior", ent.prior);
  c_entropy->add_option("--horizon", ent.horizon)->check(CLI::Range(1, 16));
  c_entropy->add_option("--abstraction", ent.abstraction)
      ->check(CLI::IsMember({"retain", "consume", "io"}));

  struct {
    std::string machine, prior = "faircoin", output;
    int horizon = 10;
  } det;
  CLI::App* c_det = app.add_subcommand("detlimit", "deterministic-limit identities for a target");
  c_det->add_option("machine", det.machine)->required();
  c_det->add_option("--prior", det.prior, "must resolve to a faircoin prior");
  c_det->add_option("--horizon", det.horizon)->check(CLI::Range(0, 64));
  c_det->add_option("--output", det.output)->required()->check(bits_check);

  struct {
    std::string machine, prior = "faircoin", inverter, epsilon = "1/2";
    int horizon = 10, n = 4, poly_cap = 16;
  } cls;
  CLI::App* c_classes = app.add_subcommand("classes", "decider/energy/one-way probes");
  c_classes->add_option("machine", cls.machine)->required();
  c_classes->add_option("--prior", cls.prior);
  c_classes->add_option("--horizon", cls.horizon)->check(CLI::Range(0, 64));
  c_classes->add_option("--n", cls.n, "B_n threshold exponent")->check(CLI::Range(0, 64));
  c_classes->add_option("--epsilon", cls.epsilon, "one-way threshold, rational p/q");
  c_classes->add_option("--inverter", cls.inverter, "candidate inverter machine (file or zoo:<name>)");
  c_classes->add_option("--poly-cap", cls.poly_cap, "max exponent tried for the energy fit");

  struct {
    std::string file;
  } val;
  CLI::App* c_validate = app.add_subcommand("validate", "parse and validate a machine file");
  c_validate->add_option("file", val.file, "machine file or zoo:<name>")->required();

  struct {
    std::string name;
  } zoo_args;
  CLI::App* c_zoo = app.add_subcommand("zoo", "list built-in machines or print one");
  c_zoo->add_option("name", zoo_args.name, "zoo machine name");

  struct {
    std::string machine, prior = "faircoin";
    int horizon = 10;
  } chk;
  CLI::App* c_check = app.add_subcommand("check", "run the full invariant suite");
  c_check->add_option("machine", chk.machine)->required();
  c_check->add_option("--prior", chk.prior);
  c_check->add_option("--horizon", chk.horizon)->check(CLI::Range(1, 64));

  for (CLI::App* sub : {c_forward, c_joint, c_inverse, c_depth, c_path, c_entropy, c_det,
                        c_classes, c_validate, c_zoo, c_check})
    sub->fallthrough();

  std::vector<const char*> argv;
  argv.push_back("sptm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    Json rep = base_report(args);
    std::ostringstream text;

    if (*c_forward) {
      MachineSpec m = load_machine(fwd.machine);
      set_machine(rep, m);
      rep["horizon"] = fwd.horizon;
      ForwardAnalysis fa = explore(m, fwd.input, fwd.horizon, g.threads);
      Json halting = Json::array();
      for (const auto& [key, p] : fa.halting)
        halting.push_back(Json{{"output", key.first}, {"tau", key.second}, {"prob", rat_str(p)}});
      Json cond = Json::object();
      for (const auto& [y, p] : fa.out_given_in) cond[y] = rat_str(p);
      rep["result"] = Json{{"input", fwd.input}, {"halting", halting}, {"out_given_in", cond}};
      rep["mass"] = Json{{"halted_proper", rat_str(fa.halted_proper)},
                         {"halted_on_proper_prefix", rat_str(fa.halted_on_proper_prefix)},
                         {"input_overrun", rat_str(fa.input_overrun)},
                         {"running", rat_str(fa.running)}};
      text << "machine " << m.name << " (hash " << machine_hash_hex(m) << ")\n";
      text << "input '" << fwd.input << "', horizon " << fwd.horizon << "\n";
      text << "halting records:\n";
      for (const auto& [key, p] : fa.halting)
        text << "  tau=" << key.second << " output='" << key.first << "' prob=" << rat_str(p) << "\n";
      text << "out|in:\n";
      for (const auto& [y, p] : fa.out_given_in)
        text << "  '" << y << "' : " << rat_str(p) << " (~" << fmt_bits(to_double(p)) << ")\n";
      text << "mass: halted_proper=" << rat_str(fa.halted_proper)
           << " prefix=" << rat_str(fa.halted_on_proper_prefix)
           << " overrun=" << rat_str(fa.input_overrun) << " running=" << rat_str(fa.running) << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_joint) {
      MachineSpec m = load_machine(jnt.machine);
      set_machine(rep, m);
      rep["horizon"] = jnt.horizon;
      Prior p = resolve_prior(jnt.prior, m, jnt.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, jnt.horizon, g.threads);
      Json table = Json::array();
      for (const auto& [xy, mass] : j.table)
        table.push_back(Json{{"in", xy.first}, {"out", xy.second}, {"prob", rat_str(mass)}});
      Json marginal = Json::object(), modal = Json::object(), masses = Json::object();
      for (const auto& [y, mass] : j.out_marginal) marginal[y] = rat_str(mass);
      for (const auto& [x, w] : p.table) modal[x] = modal_json(j.modal(x, g.modal()));
      Json modal_masses = Json::object();
      for (const auto& [y, mass] : j.out_marginal)
        modal_masses[y] = rat_str(modal_mass(j, y, g.modal()));
      Json residuals = Json::object();
      Rational halted_total = 0;
      for (const auto& [x, pi] : j.inputs) {
        const Rational w = p.weight(x);
        residuals[x] = Json{{"halted", rat_str(w * pi.halted)},
                            {"prefix", rat_str(w * pi.prefix_halt)},
                            {"overrun", rat_str(w * pi.overrun)},
                            {"running", rat_str(w * pi.running)}};
        halted_total += w * pi.halted;
      }
      rep["result"] = Json{{"table", table},
                           {"out_marginal", marginal},
                           {"modal", modal},
                           {"modal_mass", modal_masses}};
      rep["mass"] = Json{{"halted_total", rat_str(halted_total)},
                         {"prior_total", rat_str(p.total())},
                         {"per_input", residuals}};
      text << "machine " << m.name << ", prior " << p.descriptor << ", horizon " << jnt.horizon << "\n";
      text << "joint table pi(in, out):\n";
      for (const auto& [xy, mass] : j.table)
        text << "  ('" << xy.first << "', '" << xy.second << "') = " << rat_str(mass) << "\n";
      text << "out marginal:\n";
      for (const auto& [y, mass] : j.out_marginal)
        text << "  '" << y << "' : " << rat_str(mass) << "  modal_mass " << rat_str(modal_mass(j, y, g.modal())) << "\n";
      text << "modal outputs:\n";
      for (const auto& [x, w] : p.table) {
        ModalResult r = j.modal(x, g.modal());
        text << "  '" << x << "' -> " << (r.defined ? "'" + r.y + "'" : to_string(r.reason)) << "\n";
      }
      text << "halted mass " << rat_str(halted_total) << " of prior total " << rat_str(p.total()) << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_inverse) {
      MachineSpec m = load_machine(inv.machine);
      set_machine(rep, m);
      rep["horizon"] = inv.horizon;
      Prior p = resolve_prior(inv.prior, m, inv.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, inv.horizon, g.threads);
      PosteriorLaw post = bayes_inverse(j, inv.output);
      Json entries = Json::object();
      Rational total = 0;
      for (const auto& [x, q] : post.posterior) {
        entries[x] = rat_str(q);
        total += q;
      }
      rep["result"] = Json{{"output", inv.output}, {"posterior", entries}, {"sum", rat_str(total)}};
      rep["mass"] = Json{{"out_marginal", rat_str(j.out_marginal.at(inv.output))}};
      text << "posterior pi(in | out = '" << inv.output << "'):\n";
      for (const auto& [x, q] : post.posterior)
        text << "  '" << x << "' : " << rat_str(q) << " (~" << fmt_bits(to_double(q)) << ")\n";
      text << "sum = " << rat_str(total) << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_depth) {
      MachineSpec m = load_machine(dep.machine);
      set_machine(rep, m);
      rep["horizon"] = dep.horizon;
      Prior p = resolve_prior(dep.prior, m, dep.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, dep.horizon, g.threads);
      std::vector<DepthVariant> variants;
      std::stringstream ss(dep.variants);
      std::string item;
      while (std::getline(ss, item, ',')) variants.push_back(variant_from_string(item));
      Json values = Json::object();
      for (DepthVariant v : variants) {
        DepthValue dv = depth(j, dep.output, v, g.modal());
        if (dv.defined) {
          Json entry{{"defined", true}, {"bits", fmt_bits(dv.bits)}, {"mass", rat_str(dv.mass)}};
          if (dv.witness) entry["witness"] = *dv.witness;
          values[to_string(v)] = entry;
          text << to_string(v) << " = " << fmt_bits(dv.bits) << " bits (2^-" << to_string(v)
               << " = " << rat_str(dv.mass) << ")\n";
        } else {
          values[to_string(v)] = Json{{"defined", false}, {"reason", dv.undefined_reason}};
          text << to_string(v) << " undefined (" << dv.undefined_reason << ")\n";
        }
      }
      rep["result"] = Json{{"output", dep.output}, {"values", values}};
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_path) {
      MachineSpec m = load_machine(pth.machine);
      set_machine(rep, m);
      rep["horizon"] = pth.horizon;
      Prior p = resolve_prior(pth.prior, m, pth.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, pth.horizon, g.threads);
      PathDepth pd = path_depth(j, pth.input, pth.output);
      rep["result"] = Json{{"input", pth.input},
                           {"output", pth.output},
                           {"bits", fmt_bits(pd.bits)},
                           {"mass", rat_str(pd.mass)}};
      text << "s('" << pth.input << "' -> '" << pth.output << "') = " << fmt_bits(pd.bits)
           << " bits (2^-s = " << rat_str(pd.mass) << ")\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_entropy) {
      MachineSpec m = load_machine(ent.machine);
      set_machine(rep, m);
      rep["horizon"] = ent.horizon;
      Prior p = resolve_prior(ent.prior, m, ent.horizon, &rep["certificates"]);
      set_prior(rep, p);
      Abstraction a = ent.abstraction == "retain" ? Abstraction::retain
                      : ent.abstraction == "consume" ? Abstraction::consume
                                                     : Abstraction::io;
      TrajectoryLaw tl = trajectory_law(m, p, ent.horizon, a);
      JointLaw j = build_joint(m, p, ent.horizon, g.threads);
      EntropyProfile ep = endpoint_comparison(tl, j);
      Json per_k = Json::array();
      for (const auto& row : ep.per_k) {
        Json steps = Json::array();
        for (double h : row.step_entropies) steps.push_back(fmt_bits(h));
        per_k.push_back(Json{{"k", row.k},
                             {"weight", rat_str(row.weight)},
                             {"step_entropies", steps},
                             {"endpoint", fmt_bits(row.endpoint)}});
      }
      rep["result"] = Json{{"abstraction", to_string(a)},
                           {"per_k", per_k},
                           {"expected_path_entropy", fmt_bits(ep.expected_path_entropy)},
                           {"expected_endpoint", fmt_bits(ep.expected_endpoint)},
                           {"io_entropy", fmt_bits(ep.io_entropy)},
                           {"gap", fmt_bits(ep.gap)}};
      rep["mass"] = Json{{"halt_mass", rat_str(tl.total_halt_mass)}};
      text << "abstraction " << to_string(a) << ", horizon " << ent.horizon << "\n";
      for (const auto& row : ep.per_k) {
        text << "tau=" << row.k << " weight=" << rat_str(row.weight) << " steps=[";
        for (std::size_t i = 0; i < row.step_entropies.size(); ++i)
          text << (i ? ", " : "") << fmt_bits(row.step_entropies[i]);
        text << "] endpoint=" << fmt_bits(row.endpoint) << "\n";
      }
      text << "expected path entropy = " << fmt_bits(ep.expected_path_entropy) << " bits\n";
      text << "expected endpoint = " << fmt_bits(ep.expected_endpoint) << " bits\n";
      text << "io entropy S(in|out) = " << fmt_bits(ep.io_entropy) << " bits\n";
      text << "gap = " << fmt_bits(ep.gap) << " bits\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_det) {
      MachineSpec m = load_machine(det.machine);
      set_machine(rep, m);
      rep["horizon"] = det.horizon;
      Prior p = resolve_prior(det.prior, m, det.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, det.horizon, g.threads);
      DetLimitReport dl = det_limit_report(m, j, det.output, g.modal());
      rep["result"] = Json{{"output", det.output},
                           {"k_bounded", dl.k_bounded},
                           {"q", rat_str(dl.q)},
                           {"k_plus_log2_q", fmt_bits(dl.k_plus_log2_q)},
                           {"s1_bits", dl.s1.defined ? Json(fmt_bits(dl.s1.bits)) : Json(nullptr)},
                           {"s2_bits", dl.s2.defined ? Json(fmt_bits(dl.s2.bits)) : Json(nullptr)},
                           {"s1_equals_s2", dl.s1_equals_s2},
                           {"depth_identity", dl.depth_identity},
                           {"preimage_bounds", dl.preimage_bounds},
                           {"preimage", dl.preimage}};
      text << "K_bounded('" << det.output << "') = " << dl.k_bounded << " (enumerated set only)\n";
      text << "Q('" << det.output << "') = " << rat_str(dl.q) << "\n";
      text << "K + log2 Q = " << fmt_bits(dl.k_plus_log2_q) << " bits\n";
      text << "S1 = " << (dl.s1.defined ? fmt_bits(dl.s1.bits) : "undefined")
           << ", S2 = " << (dl.s2.defined ? fmt_bits(dl.s2.bits) : "undefined") << "\n";
      text << "S1 == S2: " << (dl.s1_equals_s2 ? "yes" : "NO") << "; max-posterior * Q == 2^-K: "
           << (dl.depth_identity ? "yes" : "NO") << "; preimage bounds: "
           << (dl.preimage_bounds ? "yes" : "NO") << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_classes) {
      MachineSpec m = load_machine(cls.machine);
      set_machine(rep, m);
      rep["horizon"] = cls.horizon;
      Prior p = resolve_prior(cls.prior, m, cls.horizon, &rep["certificates"]);
      set_prior(rep, p);
      JointLaw j = build_joint(m, p, cls.horizon, g.threads);
      ClassProbeParams params;
      params.n = cls.n;
      params.poly_degree_cap = cls.poly_cap;
      params.epsilon = parse_rational(cls.epsilon);
      JointLaw inverter_law;
      if (!cls.inverter.empty()) {
        MachineSpec im = load_machine(cls.inverter);
        Prior ip = make_halting_set_prior(im, 1, 8, cls.horizon);
        inverter_law = build_joint(im, ip, cls.horizon, g.threads);
        params.inverter = &inverter_law;
        params.run_one_way = true;
        rep["certificates"]["inverter"] =
            Json{{"name", im.name}, {"hash", machine_hash_hex(im)}};
      }
      ClassProbe probe = class_probes(j, params, g.modal());
      Json preimages = Json::object();
      for (const auto& [y, xs] : probe.preimages) preimages[y] = xs;
      Json energy = Json::array();
      for (const auto& row : probe.energy)
        energy.push_back(Json{{"x", row.x},
                              {"modal", row.y},
                              {"n_x", fmt_bits(row.n_x)},
                              {"two_s", rat_str(row.two_s)}});
      rep["result"] = Json{{"n", probe.n},
                           {"b_n", probe.b_n},
                           {"preimages", preimages},
                           {"decider", probe.decider},
                           {"energy", energy},
                           {"fitted_c", probe.fitted_c ? Json(*probe.fitted_c) : Json(nullptr)}};
      if (probe.one_way)
        rep["result"]["one_way"] = Json{{"success", rat_str(probe.one_way->success)},
                                        {"epsilon", rat_str(probe.one_way->epsilon)},
                                        {"one_way_consistent", probe.one_way->one_way_consistent}};
      text << "B_" << probe.n << " = " << detail::join_bits(probe.b_n) << "\n";
      text << "decider: " << (probe.decider ? "yes" : "no") << "\n";
      text << "preimages:\n";
      for (const auto& [y, xs] : probe.preimages)
        text << "  '" << y << "' <- " << detail::join_bits(xs) << "\n";
      text << "energy (empirical over the sample, not a class membership proof):\n";
      for (const auto& row : probe.energy)
        text << "  x='" << row.x << "' n(x)=" << fmt_bits(row.n_x) << " 2^s=" << rat_str(row.two_s) << "\n";
      if (probe.fitted_c) text << "least c with 2^s <= n(x)^c + c over sample: " << *probe.fitted_c << "\n";
      else text << "no polynomial fit within degree cap\n";
      if (probe.one_way)
        text << "one-way trial: success " << rat_str(probe.one_way->success) << " vs epsilon "
             << rat_str(probe.one_way->epsilon) << " -> "
             << (probe.one_way->one_way_consistent ? "consistent with one-way" : "NOT one-way") << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_validate) {
      MachineSpec m = load_machine(val.file);
      set_machine(rep, m);
      rep["result"] = Json{{"valid", true},
                           {"states", m.states.size()},
                           {"rules", m.rules.size()},
                           {"updates", m.num_updates},
                           {"work_tapes", m.work_tapes},
                           {"deterministic", m.is_deterministic()}};
      text << "machine '" << m.name << "' valid: " << m.states.size() << " state(s), "
           << m.rules.size() << " rule(s), N=" << m.num_updates << ", "
           << m.work_tapes << " work tape(s)"
           << (m.is_deterministic() ? ", deterministic" : "") << "\n";
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_zoo) {
      if (zoo_args.name.empty()) {
        Json list = Json::array();
        for (const auto& e : zoo_entries()) {
          list.push_back(Json{{"name", e.name}, {"description", e.description}});
          text << e.name << " - " << e.description << "\n";
        }
        rep["result"] = Json{{"machines", list}};
      } else {
        const ZooEntry* e = find_zoo_entry(zoo_args.name);
        if (!e) throw Error("no zoo machine named '" + zoo_args.name + "'");
        MachineSpec m = parse_machine(e->source);
        set_machine(rep, m);
        rep["result"] = Json{{"description", e->description}, {"source", e->source}};
        text << "# " << e->description << "\n" << e->source;
      }
      emit(rep, g, out, text.str());
      return 0;
    }

    if (*c_check) {
      MachineSpec m = load_machine(chk.machine);
      set_machine(rep, m);
      rep["horizon"] = chk.horizon;
      Prior p = resolve_prior(chk.prior, m, chk.horizon, &rep["certificates"]);
      set_prior(rep, p);
      CheckOptions copt;
      copt.horizon = chk.horizon;
      copt.threads = g.threads;
      copt.modal = g.modal();
      std::vector<CheckResult> results = run_check_suite(m, p, copt);
      if (chk.machine.rfind("zoo:", 0) == 0) {
        auto facts = zoo_fact_checks(chk.machine.substr(4), copt);
        results.insert(results.end(), facts.begin(), facts.end());
      }
      bool all = true;
      Json list = Json::array();
      for (const auto& r : results) {
        all = all && r.pass;
        list.push_back(Json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        text << (r.pass ? "ok   " : "FAIL ") << r.name
             << (r.detail.empty() ? "" : " - " + r.detail) << "\n";
      }
      int failures = 0;
      for (const auto& r : results)
        if (!r.pass) ++failures;
      rep["result"] = Json{{"checks", list}, {"all_pass", all}, {"failures", failures}};
      text << (all ? "all " + std::to_string(results.size()) + " invariants pass"
                   : std::to_string(failures) + " invariant(s) FAILED")
           << "\n";
      emit(rep, g, out, text.str());
      return all ? 0 : 3;
    }

    err << "usage error: no subcommand\n";
    return 1;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const AnalysisError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cli
}  // namespace sptm
