#pragma once

#include "cstuple/strs.hpp"

#include <map>
#include <stdexcept>
#include <string>

namespace cstuple {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + msg),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

// "a -> b -> c" (right-associative), parentheses allowed
TypePtr parse_type(const std::string& text);

// Full .strs source: sort/cons/fn declarations (gathered first) and rules.
// Undeclared letter identifiers in rules become variables with inferred
// types. Throws ParseError.
Strs parse_strs(const std::string& text);

// A closed term over the signature; undeclared identifiers are errors.
TermPtr parse_ground_term(const std::string& text, const Signature& sig);

// A term whose variables must be listed (name -> type) in vars.
TermPtr parse_term_with_vars(const std::string& text, const Signature& sig,
                             const std::map<std::string, TypePtr>& vars);

} // namespace cstuple
