#pragma once

#include <future>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/engine.hpp"
#include "sptm/error.hpp"
#include "sptm/machine.hpp"
#include "sptm/prior.hpp"
#include "sptm/rational.hpp"

namespace sptm {

enum class TieBreak { undefined, lex };

struct ModalOptions {
  TieBreak tie_break = TieBreak::undefined;
  bool robust_margin = false;
};

enum class ModalReason { defined, tie, nonhalting, margin };

inline const char* to_string(ModalReason r) {
  switch (r) {
    case ModalReason::defined: return "defined";
    case ModalReason::tie: return "undefined-tie";
    case ModalReason::nonhalting: return "undefined-nonhalting";
    case ModalReason::margin: return "undefined-margin";
  }
  return "?";
}

// Modal output per input: either a string or a first-class undefined with a
// reason, never an error (the depth measures need to skip undefined inputs
// deterministically).
struct ModalResult {
  bool defined = false;
  Bits y;
  ModalReason reason = ModalReason::nonhalting;
};

// Exact joint semi-distribution pi(in, out) for one machine, prior and
// horizon. Everything is horizon-truncated: the per-input residual masses
// are carried along so every probability reads as a certified lower bound.
struct JointLaw {
  std::string machine_name;
  std::string machine_hash;
  Prior prior;
  int horizon = 0;

  struct PerInput {
    BitsMap<Rational> out_cond;  // pi(out = y | in = x), proper halts only
    Rational halted = 0;         // sum of out_cond
    Rational prefix_halt = 0;
    Rational overrun = 0;
    Rational running = 0;
  };
  BitsMap<PerInput> inputs;  // keyed by prior support

  std::map<std::pair<Bits, Bits>, Rational> table;  // (x, y) -> pi(in=x, out=y)
  BitsMap<Rational> out_marginal;                   // pi(out = y)

  Rational joint(const Bits& x, const Bits& y) const {
    auto it = table.find({x, y});
    return it == table.end() ? Rational(0) : it->second;
  }

  // Modal output: argmax_y pi(out=y | in=x), computed from the forward
  // conditional alone, hence independent of the prior. Undefined on zero
  // halting mass or non-unique mode (optionally resolved lexicographically);
  // robust_margin additionally requires max - runner-up >= 1/|x|.
  ModalResult modal(const Bits& x, const ModalOptions& opt = {}) const {
    auto it = inputs.find(x);
    if (it == inputs.end()) throw AnalysisError("input '" + x + "' is not in the prior support");
    const auto& cond = it->second.out_cond;
    if (cond.empty()) return {false, "", ModalReason::nonhalting};

    Rational best = -1, second = 0;
    std::vector<const Bits*> argmax;
    for (const auto& [y, p] : cond) {
      if (p > best) {
        second = best < 0 ? Rational(0) : best;
        best = p;
        argmax.assign(1, &y);
      } else if (p == best) {
        argmax.push_back(&y);
      } else if (p > second) {
        second = p;
      }
    }
    if (argmax.size() > 1) {
      if (opt.tie_break == TieBreak::undefined) return {false, "", ModalReason::tie};
      const Bits* pick = argmax[0];
      for (const Bits* c : argmax)
        if (*c < *pick) pick = c;
      if (opt.robust_margin) return {false, *pick, ModalReason::margin};  // tied: margin is 0
      return {true, *pick, ModalReason::defined};
    }
    if (opt.robust_margin) {
      // Threshold 1/|x|; the empty input admits no finite margin.
      if (x.empty() || best - second < Rational(1, int(x.size())))
        return {false, *argmax[0], ModalReason::margin};
    }
    return {true, *argmax[0], ModalReason::defined};
  }
};

// Runs explore for every input in the prior support (in parallel when asked;
// the inputs are independent) and assembles the joint table and marginals.
inline JointLaw build_joint(const MachineSpec& m, const Prior& p, int horizon, int threads = 1) {
  JointLaw jl;
  jl.machine_name = m.name;
  jl.machine_hash = machine_hash_hex(m);
  jl.prior = p;
  jl.horizon = horizon;

  const auto& entries = p.table;
  std::vector<ForwardAnalysis> fas(entries.size());
  const int workers = (threads > 1 && entries.size() >= 2)
                          ? std::min<int>(threads, int(entries.size()))
                          : 1;
  if (workers == 1) {
    for (std::size_t i = 0; i < entries.size(); ++i)
      fas[i] = explore(m, entries[i].first, horizon);
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = std::size_t(w); i < entries.size(); i += std::size_t(workers))
          fas[i] = explore(m, entries[i].first, horizon);
      }));
    }
    for (auto& f : futs) f.get();
  }

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [x, w] = entries[i];
    const ForwardAnalysis& fa = fas[i];
    JointLaw::PerInput pi;
    pi.out_cond = fa.out_given_in;
    pi.halted = fa.halted_proper;
    pi.prefix_halt = fa.halted_on_proper_prefix;
    pi.overrun = fa.input_overrun;
    pi.running = fa.running;
    for (const auto& [y, cond] : pi.out_cond) {
      Rational mass = w * cond;
      jl.table[{x, y}] += mass;
      jl.out_marginal[y] += mass;
    }
    jl.inputs.emplace(x, std::move(pi));
  }
  return jl;
}

// Bayesian inverse: exact, and normalized to exactly 1 whenever
// pi(out = y) > 0, whether or not the prior is.
struct PosteriorLaw {
  Bits y;
  BitsMap<Rational> posterior;  // x -> pi(in = x | out = y)
};

inline PosteriorLaw bayes_inverse(const JointLaw& j, const Bits& y) {
  auto marg = j.out_marginal.find(y);
  if (marg == j.out_marginal.end() || marg->second == 0)
    throw AnalysisError("no posterior support: pi(out = '" + y + "') = 0 at horizon " +
                        std::to_string(j.horizon));
  PosteriorLaw post;
  post.y = y;
  for (const auto& [key, mass] : j.table)
    if (key.second == y) post.posterior[key.first] = mass / marg->second;
  return post;
}

inline ModalResult modal_output(const JointLaw& j, const Bits& x, const ModalOptions& opt = {}) {
  return j.modal(x, opt);
}

// Modal-output mass: pi(out-hat = y), the sum of prior weights of inputs whose modal output
// is y (under the given tie rule).
inline Rational modal_mass(const JointLaw& j, const Bits& y, const ModalOptions& opt = {}) {
  Rational s = 0;
  for (const auto& [x, w] : j.prior.table) {
    ModalResult r = j.modal(x, opt);
    if (r.defined && r.y == y) s += w;
  }
  return s;
}

// Per-horizon halting-mass report. Never claims unbounded totality: the
// residual is exact and the certificate says "total up to horizon T within
// 2^-c".
struct TotalityRow {
  int horizon = 0;
  BitsMap<Rational> halted;  // per input
  Rational min_halted = 0;
  Rational max_residual = 0;
  std::optional<int> certificate_c;  // largest c >= 0 with residual <= 2^-c; nullopt if residual 0 (exact totality at T)
};

struct TotalityReport {
  std::vector<TotalityRow> rows;
};

inline TotalityReport totality_probe(const MachineSpec& m, const Prior& p,
                                     const std::vector<int>& horizons, int threads = 1) {
  TotalityReport rep;
  for (int T : horizons) {
    TotalityRow row;
    row.horizon = T;
    bool first = true;
    for (const auto& [x, w] : p.table) {
      ForwardAnalysis fa = explore(m, x, T, threads);
      row.halted[x] = fa.halted_proper;
      Rational residual = 1 - fa.halted_proper;
      if (first || fa.halted_proper < row.min_halted) row.min_halted = fa.halted_proper;
      if (first || residual > row.max_residual) row.max_residual = residual;
      first = false;
    }
    if (!first) {
      if (row.max_residual == 0) {
        row.certificate_c = std::nullopt;
      } else {
        int c = 0;
        while (row.max_residual <= pow2(-(c + 1)) && c < 4096) ++c;
        row.certificate_c = c;
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace sptm
