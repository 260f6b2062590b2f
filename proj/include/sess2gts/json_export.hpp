#pragma once

#include <string>

#include "sess2gts/ast.hpp"

namespace sess2gts {

// Structured AST export. Field names are stable; see README for the schema.
std::string to_json(const SessionProcPtr& p, int indent = 2);
std::string to_json(const GenericProcPtr& p, int indent = 2);
std::string to_json(const SessionTypePtr& t, int indent = 2);
std::string to_json(const ProcessTypePtr& t, int indent = 2);
std::string to_json(const TypeEnv& env, int indent = 2);

} // namespace sess2gts
