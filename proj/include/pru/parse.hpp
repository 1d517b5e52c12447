#pragma once

#include "pru/term.hpp"

#include <string_view>

namespace pru {

// Parses the textual term language. Grammar (whitespace-insensitive):
//
//   term := z | s
//         | (pi W I)          projection, 1 <= I <= W
//         | (comp G F)        composition, F then G
//         | (rec F G)         recursion: base F, step G
//         | (pair F G)        tupling
//         | (id N)            macro: identity on width N
//         | (diag N)          macro: duplication of width N
//         | (tw A B)          macro: block swap
//         | (proj W I1 .. Ik) macro: projection tuple
//         | (prod F G)        macro: F and G on disjoint blocks
//
// Macros expand during parsing; print() emits core forms only, so
// parse(print(t)) == t for every term.
//
// Throws ParseError (with line:col) on bad syntax, including trailing
// input; macro expansion may throw SpecError, core constructors TypeError.
Term parse(std::string_view text);

} // namespace pru
