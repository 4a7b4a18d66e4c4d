#pragma once

#include <cmc/cfa.hpp>
#include <cmc/lexer.hpp>

#include <set>
#include <string>
#include <string_view>

namespace cmc {

// Parses `.imp` source. Locations are numbered in order of first appearance
// along the edge list, with the initial location as L0.
Cfa parse_program(std::string_view source);

Cfa parse_cfa(std::string_view text);
std::string serialize_cfa(const Cfa& cfa);

// Loads a `.cfa` file or an `.imp` program, chosen by extension.
Cfa load_program(const std::string& path);

// Program expression grammar shared by both front ends. When `declared` is
// non-null every variable must be in it.
Expr parse_expr(TokenStream& ts, const std::set<std::string>* declared = nullptr);

} // namespace cmc
