#pragma once

#include "femscript/dsl/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace femscript::dsl
{

/// Builds a Program from a preprocessed token stream. Syntax errors are
/// ParseErrors naming the offending token and what was expected.
Program parse(const std::vector<Token>& tokens, const std::vector<Macro>& macros = {});

/// tokenize + preprocess + parse.
Program parse_source(std::string_view source);

/// Source text that parses back to an equal Program. Binary expressions are
/// fully parenthesised.
std::string print(const Program& program);
std::string print(const Expr& expr);

} // namespace femscript::dsl
