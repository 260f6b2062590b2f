#pragma once

#include <string>

#include "sess2gts/ast.hpp"

namespace sess2gts {

std::string render(const SessionProcPtr& p);
std::string render(const GenericProcPtr& p);
std::string render(const SessionTypePtr& t);
std::string render(const ProcessTypePtr& t);
std::string render(const TypeEnv& env);
std::string render(const ExprPtr& e);
std::string render(const Payload& p);
std::string render(const TypePayload& p);

} // namespace sess2gts
