#pragma once

#include "cstuple/term.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cstuple {

// Per-sort ordering direction: Descending compares with (N, >=),
// Ascending with (N, <=).
enum class SortDir { Descending, Ascending };

enum class SymbolKind { Constructor, Defined, Oracle };

struct SymbolInfo {
    TypePtr type;
    SymbolKind kind;
};

// Sorts and typed symbols. Declaration order is preserved for listings.
class Signature {
public:
    // throws std::invalid_argument on duplicate names
    void add_sort(const std::string& name, SortDir dir = SortDir::Descending);
    // throws std::invalid_argument on duplicates, undeclared sorts in the
    // type, or a symbol of order > 2
    void add_symbol(const std::string& name, TypePtr type, SymbolKind kind);

    bool has_sort(const std::string& name) const;
    SortDir sort_dir(const std::string& name) const;
    bool has_symbol(const std::string& name) const;
    const SymbolInfo& symbol(const std::string& name) const;
    // a Sym term carrying the declared type
    TermPtr make_symbol(const std::string& name) const;

    const std::vector<std::string>& sort_names() const { return sort_order_; }
    const std::vector<std::string>& symbol_names() const { return symbol_order_; }
    // constructor symbols whose final result is the given sort, in
    // declaration order
    std::vector<std::string> constructors_of(const std::string& sort) const;

private:
    std::vector<std::string> sort_order_;
    std::map<std::string, SortDir> sorts_;
    std::vector<std::string> symbol_order_;
    std::map<std::string, SymbolInfo> symbols_;
};

struct Rule {
    TermPtr lhs;
    TermPtr rhs;
};

std::string rule_to_string(const Rule& r);

struct Strs {
    Signature sig;
    std::vector<Rule> rules;

    // validates and appends; throws std::invalid_argument on: lhs not headed
    // by a defined symbol, non-base or unequal rule types, rhs variables not
    // bound by the lhs, inconsistently typed variables, or symbols that do
    // not match the signature
    void add_rule(TermPtr lhs, TermPtr rhs);
};

struct OrthogonalityViolation {
    enum class Kind { NonLeftLinear, Overlap };
    Kind kind;
    size_t rule1;
    size_t rule2; // equals rule1 for NonLeftLinear
    std::string detail; // repeated variable, or the rendered unifier
};

struct OrthogonalityReport {
    bool orthogonal;
    std::vector<OrthogonalityViolation> violations;
    std::string to_string() const;
};

// left-linearity of every lhs plus pairwise non-unifiability of distinct
// lhss (renamed apart)
OrthogonalityReport check_orthogonality(const Strs& strs);

// true when some rule matches at the root, or the head is a fully applied
// oracle symbol whose arguments are all encoded words
bool is_redex(const Strs& strs, const TermPtr& t);
// no subterm is a redex
bool is_normal_form(const Strs& strs, const TermPtr& t);

// A finite bit string; index 0 is the leftmost character.
struct Word {
    std::vector<uint8_t> bits;
    bool operator==(const Word&) const = default;
    auto operator<=>(const Word&) const = default;
};

// "_" or "" parse as the empty word; throws std::invalid_argument on
// characters outside {0,1}
Word parse_word(const std::string& s);
// "_" for the empty word, the bit characters otherwise
std::string word_to_string(const Word& w);

// The word encoding requires the signature to declare
//   o : bit, i : bit, nil : word, cons : bit -> word -> word;
// encode_word throws std::invalid_argument when they are absent or typed
// differently. "001" becomes o :: (o :: (i :: [])).
TermPtr encode_word(const Word& w, const Signature& sig);
// inverse of encode_word; nullopt for any other term
std::optional<Word> decode_word(const TermPtr& t);

} // namespace cstuple
