#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sptm/bits.hpp"
#include "sptm/error.hpp"

namespace sptm {

// One transition of one (or all) update functions. A rule either consumes
// the next unread input bit (the domain then includes that bit's value) or
// leaves the input untouched. The input cursor never moves left and the
// output tape is append-only.
struct TransitionRule {
  int fn = 0;  // 0 = '*' (belongs to every update function), else 1..N
  int src = -1;
  bool consumes = false;
  int in_bit = -1;            // 0/1 when consumes
  std::vector<int> wread;     // per work tape: -1 wildcard, 0, 1
  int dst = -1;
  std::vector<int> wwrite;    // per work tape: -1 keep, 0, 1
  std::vector<char> wmove;    // per work tape: 'L', 'R', 'S'
  int out = -1;               // -1 no write, 0, 1
  int line = 0;               // source line, for diagnostics

  friend bool operator==(const TransitionRule& a, const TransitionRule& b) {
    return a.fn == b.fn && a.src == b.src && a.consumes == b.consumes &&
           a.in_bit == b.in_bit && a.wread == b.wread && a.dst == b.dst &&
           a.wwrite == b.wwrite && a.wmove == b.wmove && a.out == b.out;
  }
};

// A validated prefix probabilistic Turing machine: N deterministic update
// functions over a shared tape architecture (one-way read-only input,
// append-only output, two-way binary work tapes with zero default).
struct MachineSpec {
  std::string name;
  int num_updates = 2;
  int work_tapes = 1;
  std::vector<std::string> states;  // as listed; includes "halt"
  int start_index = -1;
  int halt_index = -1;
  std::vector<TransitionRule> rules;

  // rule_index[state][fn-1] -> indices of candidate rules (specific + '*').
  std::vector<std::vector<std::vector<int>>> rule_index;

  const std::string& state_name(int i) const { return states[std::size_t(i)]; }

  int state_id(const std::string& s) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == s) return int(i);
    return -1;
  }

  const std::vector<int>& candidates(int state, int fn) const {
    return rule_index[std::size_t(state)][std::size_t(fn - 1)];
  }

  friend bool operator==(const MachineSpec& a, const MachineSpec& b) {
    return a.name == b.name && a.num_updates == b.num_updates &&
           a.work_tapes == b.work_tapes && a.states == b.states &&
           a.start_index == b.start_index && a.rules == b.rules;
  }

  // True when every update function induces the same transition table, i.e.
  // the PPTM degenerates to a deterministic TM. Compared structurally: the
  // per-function normalized rule sets must coincide.
  bool is_deterministic() const {
    auto table_for = [&](int fn) {
      std::set<std::tuple<int, bool, int, std::vector<int>, int, std::vector<int>,
                          std::vector<char>, int>>
          t;
      for (const auto& r : rules)
        if (r.fn == 0 || r.fn == fn)
          t.insert({r.src, r.consumes, r.in_bit, r.wread, r.dst, r.wwrite, r.wmove, r.out});
      return t;
    };
    const auto first = table_for(1);
    for (int f = 2; f <= num_updates; ++f)
      if (table_for(f) != first) return false;
    return true;
  }
};

namespace detail {

inline bool rules_overlap(const TransitionRule& a, const TransitionRule& b) {
  if (a.src != b.src) return false;
  // A no-read rule applies for every value of the next input symbol, so it
  // overlaps with any consume rule on the same state.
  if (a.consumes && b.consumes && a.in_bit != b.in_bit) return false;
  for (std::size_t i = 0; i < a.wread.size(); ++i) {
    if (a.wread[i] == -1 || b.wread[i] == -1) continue;
    if (a.wread[i] != b.wread[i]) return false;
  }
  return true;
}

struct Token {
  std::string text;
  int line;
  int col;
};

inline std::vector<std::vector<Token>> tokenize_lines(const std::string& text) {
  std::vector<std::vector<Token>> lines;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < raw.size()) {
      if (raw[i] == '#') break;
      if (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r') {
        ++i;
        continue;
      }
      std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t' && raw[i] != '\r' &&
             raw[i] != '#')
        ++i;
      toks.push_back({raw.substr(start, i - start), lineno, int(start) + 1});
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

inline int parse_int(const Token& t, int min_value, const char* what) {
  for (char c : t.text)
    if (c < '0' || c > '9') throw ParseError(t.line, t.col, std::string(what) + " must be a nonnegative integer, got '" + t.text + "'");
  long v = 0;
  for (char c : t.text) {
    v = v * 10 + (c - '0');
    if (v > 1'000'000) throw ParseError(t.line, t.col, std::string(what) + " out of range");
  }
  if (v < min_value)
    throw ParseError(t.line, t.col, std::string(what) + " must be >= " + std::to_string(min_value));
  return int(v);
}

}  // namespace detail

// Parses and validates a machine description (grammar in README). Throws
// ParseError with line/column on syntax errors, unknown states, missing
// start/halt, or two rules of the same update function with overlapping
// domains.
inline MachineSpec parse_machine(const std::string& text) {
  using detail::Token;
  MachineSpec m;
  m.num_updates = 0;
  m.work_tapes = 0;
  auto lines = detail::tokenize_lines(text);

  bool seen_name = false, seen_updates = false, seen_tapes = false, seen_states = false,
       seen_start = false;
  std::string start_name;

  std::size_t li = 0;
  for (; li < lines.size(); ++li) {
    const auto& toks = lines[li];
    const std::string& kw = toks[0].text;
    if (kw == "rule") break;
    auto expect_args = [&](std::size_t n) {
      if (toks.size() != n + 1)
        throw ParseError(toks[0].line, toks[0].col,
                         "'" + kw + "' expects " + std::to_string(n) + " argument(s)");
    };
    if (kw == "name") {
      expect_args(1);
      m.name = toks[1].text;
      seen_name = true;
    } else if (kw == "updates") {
      expect_args(1);
      m.num_updates = detail::parse_int(toks[1], 2, "updates");
      seen_updates = true;
    } else if (kw == "work_tapes") {
      expect_args(1);
      m.work_tapes = detail::parse_int(toks[1], 1, "work_tapes");
      seen_tapes = true;
    } else if (kw == "states") {
      if (toks.size() < 2) throw ParseError(toks[0].line, toks[0].col, "'states' expects at least one state");
      for (std::size_t i = 1; i < toks.size(); ++i) {
        if (std::find(m.states.begin(), m.states.end(), toks[i].text) != m.states.end())
          throw ParseError(toks[i].line, toks[i].col, "duplicate state '" + toks[i].text + "'");
        m.states.push_back(toks[i].text);
      }
      seen_states = true;
    } else if (kw == "start") {
      expect_args(1);
      start_name = toks[1].text;
      seen_start = true;
    } else {
      throw ParseError(toks[0].line, toks[0].col, "unknown directive '" + kw + "'");
    }
  }

  if (!seen_name) throw ParseError(1, 1, "missing 'name' directive");
  if (!seen_updates) throw ParseError(1, 1, "missing 'updates' directive");
  if (!seen_tapes) throw ParseError(1, 1, "missing 'work_tapes' directive");
  if (!seen_states) throw ParseError(1, 1, "missing 'states' directive");
  if (!seen_start) throw ParseError(1, 1, "missing 'start' directive");

  m.halt_index = m.state_id("halt");
  if (m.halt_index < 0) throw ParseError(1, 1, "state list must contain 'halt'");
  m.start_index = m.state_id(start_name);
  if (m.start_index < 0) throw ParseError(1, 1, "start state '" + start_name + "' not in state list");
  if (m.start_index == m.halt_index) throw ParseError(1, 1, "start state may not be 'halt'");

  // rule <fn|*> <state> <in:0|1|-> <work.. per tape> -> <state'> <wwrite.. > <wmove.. > <out:0|1|->
  for (; li < lines.size(); ++li) {
    const auto& toks = lines[li];
    if (toks[0].text != "rule")
      throw ParseError(toks[0].line, toks[0].col, "expected 'rule', got '" + toks[0].text + "'");
    const std::size_t expected = 1 + 3 + std::size_t(m.work_tapes) + 1 + 1 + 2 * std::size_t(m.work_tapes) + 1;
    if (toks.size() != expected)
      throw ParseError(toks[0].line, toks[0].col,
                       "rule expects " + std::to_string(expected - 1) + " tokens after 'rule' for " +
                           std::to_string(m.work_tapes) + " work tape(s), got " +
                           std::to_string(toks.size() - 1));
    TransitionRule r;
    r.line = toks[0].line;
    std::size_t p = 1;

    const Token& fn_tok = toks[p++];
    if (fn_tok.text == "*") {
      r.fn = 0;
    } else {
      r.fn = detail::parse_int(fn_tok, 1, "update function index");
      if (r.fn > m.num_updates)
        throw ParseError(fn_tok.line, fn_tok.col, "update function index " + fn_tok.text +
                                                      " exceeds updates=" + std::to_string(m.num_updates));
    }

    const Token& src_tok = toks[p++];
    r.src = m.state_id(src_tok.text);
    if (r.src < 0) throw ParseError(src_tok.line, src_tok.col, "unknown state '" + src_tok.text + "'");
    if (r.src == m.halt_index)
      throw ParseError(src_tok.line, src_tok.col, "rules may not start in 'halt' (halt is absorbing)");

    const Token& in_tok = toks[p++];
    if (in_tok.text == "-") {
      r.consumes = false;
    } else if (in_tok.text == "0" || in_tok.text == "1") {
      r.consumes = true;
      r.in_bit = in_tok.text[0] - '0';
    } else {
      throw ParseError(in_tok.line, in_tok.col, "input read must be 0, 1 or -, got '" + in_tok.text + "'");
    }

    for (int t = 0; t < m.work_tapes; ++t) {
      const Token& wt = toks[p++];
      if (wt.text == "*") r.wread.push_back(-1);
      else if (wt.text == "0" || wt.text == "1") r.wread.push_back(wt.text[0] - '0');
      else throw ParseError(wt.line, wt.col, "work read must be 0, 1 or *, got '" + wt.text + "'");
    }

    const Token& arrow = toks[p++];
    if (arrow.text != "->") throw ParseError(arrow.line, arrow.col, "expected '->', got '" + arrow.text + "'");

    const Token& dst_tok = toks[p++];
    r.dst = m.state_id(dst_tok.text);
    if (r.dst < 0) throw ParseError(dst_tok.line, dst_tok.col, "unknown state '" + dst_tok.text + "'");

    for (int t = 0; t < m.work_tapes; ++t) {
      const Token& wt = toks[p++];
      if (wt.text == "-") r.wwrite.push_back(-1);
      else if (wt.text == "0" || wt.text == "1") r.wwrite.push_back(wt.text[0] - '0');
      else throw ParseError(wt.line, wt.col, "work write must be 0, 1 or -, got '" + wt.text + "'");
    }
    for (int t = 0; t < m.work_tapes; ++t) {
      const Token& wt = toks[p++];
      if (wt.text == "L" || wt.text == "R" || wt.text == "S") r.wmove.push_back(wt.text[0]);
      else throw ParseError(wt.line, wt.col, "work move must be L, R or S, got '" + wt.text + "'");
    }

    const Token& out_tok = toks[p++];
    if (out_tok.text == "-") r.out = -1;
    else if (out_tok.text == "0" || out_tok.text == "1") r.out = out_tok.text[0] - '0';
    else throw ParseError(out_tok.line, out_tok.col, "output write must be 0, 1 or -, got '" + out_tok.text + "'");

    m.rules.push_back(std::move(r));
  }

  // Determinism of each update function: no two candidate rules may apply to
  // the same (state, next input symbol, work symbols) point.
  for (int fn = 1; fn <= m.num_updates; ++fn) {
    for (std::size_t i = 0; i < m.rules.size(); ++i) {
      if (m.rules[i].fn != 0 && m.rules[i].fn != fn) continue;
      for (std::size_t j = i + 1; j < m.rules.size(); ++j) {
        if (m.rules[j].fn != 0 && m.rules[j].fn != fn) continue;
        if (detail::rules_overlap(m.rules[i], m.rules[j]))
          throw ParseError(m.rules[j].line, 1,
                           "conflicting rules for update function " + std::to_string(fn) +
                               ": overlaps rule at line " + std::to_string(m.rules[i].line));
      }
    }
  }

  m.rule_index.assign(m.states.size(), std::vector<std::vector<int>>(std::size_t(m.num_updates)));
  for (std::size_t ri = 0; ri < m.rules.size(); ++ri) {
    const auto& r = m.rules[ri];
    for (int fn = 1; fn <= m.num_updates; ++fn)
      if (r.fn == 0 || r.fn == fn)
        m.rule_index[std::size_t(r.src)][std::size_t(fn - 1)].push_back(int(ri));
  }
  return m;
}

// Canonical text form; parse(serialize(m)) == m.
inline std::string serialize_machine(const MachineSpec& m) {
  std::ostringstream os;
  os << "name " << m.name << "\n";
  os << "updates " << m.num_updates << "\n";
  os << "work_tapes " << m.work_tapes << "\n";
  os << "states";
  for (const auto& s : m.states) os << " " << s;
  os << "\n";
  os << "start " << m.state_name(m.start_index) << "\n";
  for (const auto& r : m.rules) {
    os << "rule " << (r.fn == 0 ? std::string("*") : std::to_string(r.fn));
    os << " " << m.state_name(r.src);
    os << " " << (r.consumes ? std::string(1, char('0' + r.in_bit)) : std::string("-"));
    for (int w : r.wread) os << " " << (w < 0 ? std::string("*") : std::to_string(w));
    os << " -> " << m.state_name(r.dst);
    for (int w : r.wwrite) os << " " << (w < 0 ? std::string("-") : std::to_string(w));
    for (char mv : r.wmove) os << " " << mv;
    os << " " << (r.out < 0 ? std::string("-") : std::to_string(r.out));
    os << "\n";
  }
  return os.str();
}

// Stable content hash (FNV-1a over the canonical serialization); used to
// identify machines in reports.
inline std::uint64_t machine_hash(const MachineSpec& m) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : serialize_machine(m)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string machine_hash_hex(const MachineSpec& m) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = machine_hash(m);
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[std::size_t(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

}  // namespace sptm
