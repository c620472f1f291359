#pragma once

#include "cstuple/type.hpp"

#include <map>
#include <optional>
#include <vector>

namespace cstuple {

enum class TermKind { Var, Sym, App };

class Term;
using TermPtr = std::shared_ptr<const Term>;

// Applicative terms: variables, function symbols, binary application.
// Nodes are immutable and shared freely.
class Term {
public:
    static TermPtr var(std::string name, TypePtr type);
    static TermPtr sym(std::string name, TypePtr type);
    // throws std::invalid_argument unless fn has an arrow type whose argument
    // matches arg's type
    static TermPtr app(TermPtr fn, TermPtr arg);
    static TermPtr app(TermPtr fn, const std::vector<TermPtr>& args);

    TermKind kind() const { return kind_; }
    const std::string& name() const;
    const TermPtr& fn() const;
    const TermPtr& arg() const;
    const TypePtr& type() const { return type_; }

private:
    Term(TermKind k, std::string name, TypePtr type)
        : kind_(k), name_(std::move(name)), type_(std::move(type)) {}
    Term(TermPtr f, TermPtr a, TypePtr type)
        : kind_(TermKind::App), fn_(std::move(f)), arg_(std::move(a)), type_(std::move(type)) {}

    TermKind kind_;
    std::string name_;
    TermPtr fn_, arg_;
    TypePtr type_;
};

// A position is a path of application steps: 1 = function side, 2 = argument
// side. The empty position is the root.
using Position = std::vector<int>;
using Subst = std::map<std::string, TermPtr>;

// head and argument list of the application spine: f s1 ... sn
const TermPtr& spine_head(const TermPtr& t);
std::vector<TermPtr> spine_args(const TermPtr& t);

size_t node_count(const TermPtr& t);
// all positions, in pre-order (root, then 1-side, then 2-side)
std::vector<Position> positions(const TermPtr& t);
std::optional<TermPtr> subterm_at(const TermPtr& t, const Position& p);
// replace the subterm at p; throws std::out_of_range on a bad position
TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& replacement);

bool term_equal(const TermPtr& a, const TermPtr& b);
bool is_ground(const TermPtr& t);
// free variables in first-occurrence (pre-order) order
std::vector<std::pair<std::string, TypePtr>> free_vars(const TermPtr& t);

TermPtr apply_subst(const TermPtr& t, const Subst& s);
// syntactic matching: find s with pattern*s == subject. Repeated pattern
// variables must bind equal subterms.
std::optional<Subst> match_term(const TermPtr& pattern, const TermPtr& subject);
// first-order syntactic unification with occurs check; variables of the two
// terms are assumed disjoint (rename apart first)
std::optional<Subst> unify(const TermPtr& a, const TermPtr& b);

std::string position_to_string(const Position& p);

// Printer. Applications are juxtaposed with minimal parentheses; terms headed
// by a binary symbol named "cons" print with the infix :: sugar and a nullary
// "nil" prints as [].
std::string to_string(const TermPtr& t);

} // namespace cstuple
