#pragma once

#include <stdexcept>
#include <string>

namespace sptm {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Machine description file rejected (syntax or structural validation).
struct ParseError : Error {
  int line = 0;
  int col = 0;
  ParseError(int line_, int col_, const std::string& msg)
      : Error("line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

// A reachable (state, input symbol, work symbols) point has no rule. This is
// a hard error, never an implicit halt: silent halting would corrupt the
// probability accounting.
struct IncompleteMachineError : Error {
  using Error::Error;
};

// Query on a law that cannot answer it (no posterior support, no halting
// mass, input outside the prior support, ...).
struct AnalysisError : Error {
  using Error::Error;
};

}  // namespace sptm
