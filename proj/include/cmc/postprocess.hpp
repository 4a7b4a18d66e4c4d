#pragma once

#include <cmc/formula.hpp>
#include <cmc/types.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cmc {

// One reached state as post-processing sees it.
struct ReachedEntry {
    LocationId location{};
    Formula domain;     // e_P, or the rendering of an explicit state
    Formula assumption; // e_A
    bool waitlist = false;
    bool error = false;
};

// (pc = location) -> body
struct Clause {
    LocationId location{};
    Formula body;

    friend bool operator==(const Clause&, const Clause&) = default;
};

// Waitlist and error states give (pc = l) -> !e_P, all others
// (pc = l) -> (!e_P | e_A). Clauses with body true are dropped and the rest
// deduplicated, ordered by location then body text.
std::vector<Clause> postprocess(const std::vector<ReachedEntry>& reached);

Formula pc_is(LocationId l);
Formula psi_formula(const std::vector<Clause>& clauses);

// `# psi` header, then one implication per line or the single line `true`.
std::string psi_text(const std::vector<Clause>& clauses);
std::vector<Clause> parse_psi(std::string_view text);

} // namespace cmc
