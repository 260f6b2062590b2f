#pragma once

#include <stdexcept>
#include <string>

#include "sess2gts/ast.hpp"

namespace sess2gts {

// Positioned parse failure. Every malformed input yields one of these;
// no input crashes the parser.
struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

SessionProcPtr parse_session_proc(const std::string& src);
GenericProcPtr parse_generic_proc(const std::string& src);
SessionTypePtr parse_session_type(const std::string& src);
ProcessTypePtr parse_process_type(const std::string& src);
TypeEnv parse_type_env(const std::string& src);

} // namespace sess2gts
