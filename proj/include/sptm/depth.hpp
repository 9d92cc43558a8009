#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/error.hpp"
#include "sptm/joint.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"

namespace sptm {

// s_pi(x -> y) = -log2 pi(in = x | out = y). y need not be the modal output
// of x. Inner value kept exact; bits are a rendering.
struct PathDepth {
  Bits x, y;
  Rational mass;  // 2^-s = pi(in = x | out = y)
  double bits = 0.0;
};

inline PathDepth path_depth(const JointLaw& j, const Bits& x, const Bits& y) {
  auto marg = j.out_marginal.find(y);
  if (marg == j.out_marginal.end() || marg->second == 0)
    throw AnalysisError("path_depth: pi(out = '" + y + "') = 0");
  Rational num = j.joint(x, y);
  if (num == 0)
    throw AnalysisError("path_depth: pi(in = '" + x + "', out = '" + y + "') = 0");
  PathDepth pd;
  pd.x = x;
  pd.y = y;
  pd.mass = num / marg->second;
  pd.bits = -log2_rational(pd.mass);
  return pd;
}

enum class DepthVariant { S0, S1, S2, S0_sum, S1_sum, S2_sum };

inline const char* to_string(DepthVariant v) {
  switch (v) {
    case DepthVariant::S0: return "S0";
    case DepthVariant::S1: return "S1";
    case DepthVariant::S2: return "S2";
    case DepthVariant::S0_sum: return "S0_sum";
    case DepthVariant::S1_sum: return "S1_sum";
    case DepthVariant::S2_sum: return "S2_sum";
  }
  return "?";
}

inline std::vector<DepthVariant> all_depth_variants() {
  return {DepthVariant::S0, DepthVariant::S1, DepthVariant::S2,
          DepthVariant::S0_sum, DepthVariant::S1_sum, DepthVariant::S2_sum};
}

struct DepthValue {
  bool defined = false;
  std::string undefined_reason;
  Rational mass;       // the exact inner value, 2^-S
  double bits = 0.0;   // S = -log2(mass)
  std::optional<Bits> witness;  // argmax input, max variants only
};

struct DepthReport {
  Bits y;
  std::map<DepthVariant, DepthValue> values;
};

// The stochastic depth family for a target string y:
//   S0     = -log max         { pi(x) : out-hat(x) = y }
//   S1     = -log max         { pi(x | out-hat = y) }   (= pi(x)/pi(out-hat = y))
//   S2     = -log max_x         pi(x | out = y)
// and the _sum variants with max replaced by the sum. The summed
// conditionals S1_sum/S2_sum are exactly 0 whenever defined (the conditional
// is normalized); they are computed literally and the degeneracy is left to
// the report.
inline DepthValue depth(const JointLaw& j, const Bits& y, DepthVariant variant,
                        const ModalOptions& opt = {}) {
  DepthValue dv;
  auto finish = [&](Rational mass, std::optional<Bits> witness) {
    if (mass <= 0) {
      dv.defined = false;
      dv.undefined_reason = "zero mass";
      return dv;
    }
    dv.defined = true;
    dv.mass = mass;
    dv.bits = -log2_rational(mass);
    dv.witness = std::move(witness);
    return dv;
  };

  const bool modal_variant = variant == DepthVariant::S0 || variant == DepthVariant::S1 ||
                             variant == DepthVariant::S0_sum || variant == DepthVariant::S1_sum;
  if (modal_variant) {
    // Conditioning event {in : out-hat(in) = y}.
    std::vector<Bits> preimage;
    Rational event_mass = 0;
    for (const auto& [x, w] : j.prior.table) {
      ModalResult r = j.modal(x, opt);
      if (r.defined && r.y == y) {
        preimage.push_back(x);
        event_mass += w;
      }
    }
    if (preimage.empty()) {
      dv.undefined_reason = "no input has modal output '" + y + "'";
      return dv;
    }
    Rational best = -1;
    Bits best_x;
    for (const auto& x : preimage) {
      Rational w = j.prior.weight(x);
      if (w > best) {
        best = w;
        best_x = x;
      }
    }
    switch (variant) {
      case DepthVariant::S0: return finish(best, best_x);
      case DepthVariant::S0_sum: return finish(event_mass, std::nullopt);
      case DepthVariant::S1:
        if (event_mass == 0) {
          dv.undefined_reason = "modal event has zero prior mass";
          return dv;
        }
        return finish(best / event_mass, best_x);
      case DepthVariant::S1_sum:
        if (event_mass == 0) {
          dv.undefined_reason = "modal event has zero prior mass";
          return dv;
        }
        return finish(event_mass / event_mass, std::nullopt);  // literally 1 -> 0 bits
      default: break;
    }
  }

  // S2 family conditions on {out = y}.
  auto marg = j.out_marginal.find(y);
  if (marg == j.out_marginal.end() || marg->second == 0) {
    dv.undefined_reason = "pi(out = '" + y + "') = 0";
    return dv;
  }
  Rational best = -1, sum = 0;
  Bits best_x;
  for (const auto& [xy, mass] : j.table) {
    if (xy.second != y) continue;
    Rational post = mass / marg->second;
    sum += post;
    if (post > best) {
      best = post;
      best_x = xy.first;
    }
  }
  if (variant == DepthVariant::S2) return finish(best, best_x);
  return finish(sum, std::nullopt);  // S2_sum: normalized conditional, exactly 1
}

inline DepthReport depth_report(const JointLaw& j, const Bits& y,
                                const std::vector<DepthVariant>& variants,
                                const ModalOptions& opt = {}) {
  DepthReport rep;
  rep.y = y;
  for (DepthVariant v : variants) rep.values[v] = depth(j, y, v, opt);
  return rep;
}

// Deterministic-limit identities. K_bounded is the minimum input length over
// the enumerated halting set (an upper bound on K restricted to this
// machine, certified by the set's L_max/horizon); Q is the universal
// probability of y over that set. Verified exactly:
//   S1 = S2, and max-posterior * Q = 2^-K_bounded,
// plus pi(x) <= 2^-s(x->y) <= 1 for every preimage input.
struct DetLimitReport {
  Bits y;
  int k_bounded = 0;
  Rational q;           // sum of 2^-|x| over enumerated preimage of y
  double k_plus_log2_q = 0;  // K_bounded + log2 Q
  DepthValue s1, s2;
  bool s1_equals_s2 = false;
  bool depth_identity = false;  // s2.mass * q == 2^-k_bounded exactly
  bool preimage_bounds = false;
  std::vector<Bits> preimage;
};

inline DetLimitReport det_limit_report(const MachineSpec& m, const JointLaw& j, const Bits& y,
                                       const ModalOptions& opt = {}) {
  if (!m.is_deterministic())
    throw AnalysisError("det_limit_report: machine '" + m.name + "' is not deterministic");
  if (j.prior.kind != PriorKind::faircoin)
    throw AnalysisError("det_limit_report requires a faircoin prior over the enumerated halting set");

  DetLimitReport rep;
  rep.y = y;
  rep.s1 = depth(j, y, DepthVariant::S1, opt);
  rep.s2 = depth(j, y, DepthVariant::S2, opt);

  bool found = false;
  for (const auto& [x, w] : j.prior.table) {
    // Deterministic machine: pi(out|in) is a point mass, so x is a preimage
    // of y iff the conditional puts mass 1 on y.
    auto it = j.inputs.find(x);
    auto cit = it->second.out_cond.find(y);
    if (cit == it->second.out_cond.end() || cit->second == 0) continue;
    rep.preimage.push_back(x);
    rep.q += pow2(-int(x.size()));
    if (!found || int(x.size()) < rep.k_bounded) rep.k_bounded = int(x.size());
    found = true;
  }
  if (!found) throw AnalysisError("det_limit_report: no enumerated input produces '" + y + "'");

  rep.k_plus_log2_q = rep.k_bounded + log2_rational(rep.q);
  rep.s1_equals_s2 = rep.s1.defined && rep.s2.defined && rep.s1.mass == rep.s2.mass;
  rep.depth_identity = rep.s2.defined && rep.s2.mass * rep.q == pow2(-rep.k_bounded);

  rep.preimage_bounds = true;
  for (const auto& x : rep.preimage) {
    PathDepth pd = path_depth(j, x, y);
    if (!(j.prior.weight(x) <= pd.mass && pd.mass <= 1)) rep.preimage_bounds = false;
  }
  return rep;
}

// Uniform-prior fan-in reduction for deterministic machines: the depth of y
// collapses to log2 of the preimage count; 2^S2 equals the count exactly.
struct FaninReport {
  Bits y;
  int count = 0;
  double depth_bits = 0.0;
  bool identity = false;  // S2 mass == 1/count exactly
};

inline FaninReport fanin_depth(const MachineSpec& m, const JointLaw& j, const Bits& y,
                               const ModalOptions& opt = {}) {
  if (!m.is_deterministic())
    throw AnalysisError("fanin_depth: machine '" + m.name + "' is not deterministic");
  if (j.prior.kind != PriorKind::uniform_n)
    throw AnalysisError("fanin_depth requires a uniform_n prior");
  FaninReport rep;
  rep.y = y;
  for (const auto& [x, pi] : j.inputs) {
    auto cit = pi.out_cond.find(y);
    if (cit != pi.out_cond.end() && cit->second > 0) ++rep.count;
  }
  if (rep.count == 0) {
    rep.identity = false;
    return rep;  // undefined: empty preimage
  }
  rep.depth_bits = std::log2(double(rep.count));
  DepthValue s2 = depth(j, y, DepthVariant::S2, opt);
  rep.identity = s2.defined && s2.mass * rep.count == 1;
  return rep;
}

// Complexity-class probes over a finite joint law. Everything here is an
// exact computation over the sample; scaling statements (energy-T, one-way)
// are reported as empirical fits against a fixed threshold, never as class
// membership proofs.
struct ClassProbe {
  int n = 0;
  std::vector<Bits> b_n;                   // {x : pi(x) >= 2^-n}
  BitsMap<std::vector<Bits>> preimages;    // y -> {x : out-hat(x) = y}
  bool decider = false;                    // every defined modal output in {"0","1"}
  struct EnergyRow {
    Bits x;
    Bits y;          // out-hat(x)
    double n_x = 0;  // -log2 pi(x)
    Rational two_s;  // 2^{s(x -> out-hat(x))}, exact
  };
  std::vector<EnergyRow> energy;
  std::optional<int> fitted_c;  // least c <= cap with 2^s <= n(x)^c + c over the sample

  struct OneWayTrial {
    Rational success;  // pi(inverter recovers a preimage | in in B_n)
    Rational epsilon;
    bool one_way_consistent = false;  // success <= epsilon
  };
  std::optional<OneWayTrial> one_way;
};

struct ClassProbeParams {
  int n = 4;
  int poly_degree_cap = 16;
  Rational epsilon = Rational(1, 2);
  const JointLaw* inverter = nullptr;  // optional candidate inverter SPTM
  bool run_one_way = false;
};

inline ClassProbe class_probes(const JointLaw& j, const ClassProbeParams& params,
                               const ModalOptions& opt = {}) {
  ClassProbe probe;
  probe.n = params.n;

  const Rational threshold = pow2(-params.n);
  bool all_binary = true;
  for (const auto& [x, w] : j.prior.table) {
    if (w >= threshold) probe.b_n.push_back(x);
    ModalResult r = j.modal(x, opt);
    if (!r.defined) continue;
    probe.preimages[r.y].push_back(x);
    if (r.y != "0" && r.y != "1") all_binary = false;
    ClassProbe::EnergyRow row;
    row.x = x;
    row.y = r.y;
    row.n_x = -log2_rational(w);
    row.two_s = 1 / path_depth(j, x, r.y).mass;
    probe.energy.push_back(std::move(row));
  }
  probe.decider = all_binary && !probe.preimages.empty();

  for (int c = 1; c <= params.poly_degree_cap && !probe.fitted_c; ++c) {
    bool ok = true;
    for (const auto& row : probe.energy)
      if (to_double(row.two_s) > std::pow(row.n_x, double(c)) + double(c)) {
        ok = false;
        break;
      }
    if (ok) probe.fitted_c = c;
  }

  if (params.run_one_way) {
    if (!params.inverter)
      throw AnalysisError("class_probes: one-way trial requested without an inverter");
    const JointLaw& inv = *params.inverter;
    Rational cond_mass = 0, success_mass = 0;
    for (const auto& x : probe.b_n) {
      Rational w = j.prior.weight(x);
      cond_mass += w;
      ModalResult fwd = j.modal(x, opt);
      if (!fwd.defined) continue;
      if (!inv.prior.contains(fwd.y)) continue;
      ModalResult back = inv.modal(fwd.y, opt);
      if (!back.defined) continue;
      const auto pre = probe.preimages.find(fwd.y);
      if (pre == probe.preimages.end()) continue;
      for (const auto& cand : pre->second)
        if (cand == back.y) {
          success_mass += w;
          break;
        }
    }
    if (cond_mass == 0) throw AnalysisError("class_probes: B_n is empty, conditional undefined");
    ClassProbe::OneWayTrial trial;
    trial.success = success_mass / cond_mass;
    trial.epsilon = params.epsilon;
    trial.one_way_consistent = trial.success <= trial.epsilon;
    probe.one_way = trial;
  }
  return probe;
}

}  // namespace sptm
