#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sptm/error.hpp"
#include "sptm/joint.hpp"
#include "sptm/rational.hpp"
#include "sptm/trajectory.hpp"

namespace sptm {

namespace detail {

// H(A | B) in bits from an exact joint over (a, b) pairs. The joint need not
// be normalized; only ratios enter.
inline double cond_entropy_bits(const std::map<std::pair<std::string, std::string>, Rational>& joint) {
  std::map<std::string, Rational> b_marginal;
  Rational total = 0;
  for (const auto& [ab, p] : joint) {
    if (p == 0) continue;
    b_marginal[ab.second] += p;
    total += p;
  }
  if (total == 0) return 0.0;
  double h = 0.0;
  for (const auto& [ab, p] : joint) {
    if (p == 0) continue;
    const Rational cond = p / b_marginal[ab.second];  // pi(a | b)
    h -= to_double(p / total) * log2_rational(cond);
  }
  return h < 0 ? 0.0 : h;
}

// Exact test that every backward conditional is a point mass (zero entropy
// without tolerance).
inline bool backward_point_mass(const std::map<std::pair<std::string, std::string>, Rational>& joint) {
  std::map<std::string, const std::string*> seen;
  for (const auto& [ab, p] : joint) {
    if (p == 0) continue;
    auto [it, inserted] = seen.emplace(ab.second, &ab.first);
    if (!inserted && *it->second != ab.first) return false;
  }
  return true;
}

inline std::map<std::pair<std::string, std::string>, Rational> pairwise_marginal(
    const TrajectoryLaw::PerK& pk, std::size_t i, std::size_t j) {
  std::map<std::pair<std::string, std::string>, Rational> out;
  for (const auto& [seq, p] : pk.seqs) out[{seq[i], seq[j]}] += p;
  return out;
}

}  // namespace detail

// Backward conditional entropies S(X_{t-1} | X_t) in bits for t = 1..k,
// under the law conditioned on tau = k. One entry per executed step.
inline std::vector<double> step_entropies(const TrajectoryLaw& tl, int k) {
  const auto& pk = tl.at(k);
  std::vector<double> out;
  for (int t = 1; t <= k; ++t)
    out.push_back(detail::cond_entropy_bits(
        detail::pairwise_marginal(pk, std::size_t(t - 1), std::size_t(t))));
  return out;
}

inline bool step_exactly_invertible(const TrajectoryLaw& tl, int k) {
  const auto& pk = tl.at(k);
  for (int t = 1; t <= k; ++t)
    if (!detail::backward_point_mass(
            detail::pairwise_marginal(pk, std::size_t(t - 1), std::size_t(t))))
      return false;
  return true;
}

inline double endpoint_entropy(const TrajectoryLaw& tl, int k) {
  const auto& pk = tl.at(k);
  return detail::cond_entropy_bits(detail::pairwise_marginal(pk, 0, std::size_t(k)));
}

// Expected summed backward entropy over trajectory lengths (reported with
// positive sign): sum_k pi(k) sum_{t=1..k} S(X_{t-1} | X_t).
inline double expected_path_entropy(const TrajectoryLaw& tl) {
  if (tl.by_k.empty()) throw AnalysisError("expected_path_entropy: empty trajectory law");
  double v = 0.0;
  for (const auto& [k, pk] : tl.by_k) {
    double inner = 0.0;
    for (double h : step_entropies(tl, k)) inner += h;
    v += to_double(pk.weight) * inner;
  }
  return v;
}

// S(in | out) from the joint law, restricted to the properly halted mass and
// renormalized.
inline double io_conditional_entropy(const JointLaw& j) {
  Rational total = 0;
  for (const auto& [y, mass] : j.out_marginal) total += mass;
  if (total == 0)
    throw AnalysisError("io_conditional_entropy: no halting mass at horizon " +
                        std::to_string(j.horizon));
  std::map<std::pair<std::string, std::string>, Rational> joint;
  for (const auto& [xy, mass] : j.table) joint[{xy.first, xy.second}] = mass;
  return detail::cond_entropy_bits(joint);
}

struct EntropyProfile {
  Abstraction abstraction = Abstraction::retain;
  struct PerK {
    int k = 0;
    Rational weight;                    // pi(tau = k) / pi(tau <= horizon)
    std::vector<double> step_entropies; // S(X_{t-1}|X_t), t = 1..k
    double endpoint = 0.0;              // S(X_0 | X_k)
  };
  std::vector<PerK> per_k;
  double expected_path_entropy = 0.0;
  double expected_endpoint = 0.0;  // sum_k pi(k) S(X_0 | X_k)
  double io_entropy = 0.0;         // S(in | out) from the joint law
  double gap = 0.0;                // expected_path_entropy - expected_endpoint
};

// Evaluates the expansion of the expected summed backward entropy into the
// endpoint term, plus the in/out identification of the endpoints. The gap is
// reported numerically, never asserted small; in the exactly invertible case
// all terms are zero and the expansion is exact.
inline EntropyProfile endpoint_comparison(const TrajectoryLaw& tl, const JointLaw& j) {
  if (tl.machine_hash != j.machine_hash || tl.horizon != j.horizon ||
      tl.prior_descriptor != j.prior.descriptor)
    throw AnalysisError("endpoint_comparison: trajectory law and joint law disagree on machine/prior/horizon");
  EntropyProfile ep;
  ep.abstraction = tl.abstraction;
  for (const auto& [k, pk] : tl.by_k) {
    EntropyProfile::PerK row;
    row.k = k;
    row.weight = pk.weight;
    row.step_entropies = step_entropies(tl, k);
    row.endpoint = endpoint_entropy(tl, k);
    ep.per_k.push_back(std::move(row));
  }
  for (const auto& row : ep.per_k) {
    double inner = 0.0;
    for (double h : row.step_entropies) inner += h;
    ep.expected_path_entropy += to_double(row.weight) * inner;
    ep.expected_endpoint += to_double(row.weight) * row.endpoint;
  }
  ep.io_entropy = io_conditional_entropy(j);
  ep.gap = ep.expected_path_entropy - ep.expected_endpoint;
  return ep;
}

// Both sides of the reverse chain rule for a fixed k, computed independently
// from the exact sequence joint: sum_t S(X_{t-1}|X_t) and
// S(X_0..X_{k-1} | X_k). They agree because the conditioned chain is Markov
// and so is its time reversal.
struct ReverseChainRule {
  double summed_steps = 0.0;
  double chain = 0.0;
};

inline ReverseChainRule reverse_chain_rule(const TrajectoryLaw& tl, int k) {
  const auto& pk = tl.at(k);
  ReverseChainRule r;
  for (double h : step_entropies(tl, k)) r.summed_steps += h;

  double h_full = 0.0;
  std::map<std::string, Rational> last;
  for (const auto& [seq, p] : pk.seqs) {
    if (p == 0) continue;
    h_full -= to_double(p) * log2_rational(p);
    last[seq.back()] += p;
  }
  double h_last = 0.0;
  for (const auto& [s, p] : last) {
    if (p == 0) continue;
    h_last -= to_double(p) * log2_rational(p);
  }
  r.chain = h_full - h_last;
  return r;
}

}  // namespace sptm
