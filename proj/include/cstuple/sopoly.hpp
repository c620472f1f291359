#pragma once

#include "cstuple/csexpr.hpp"
#include "cstuple/strs.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace cstuple {

// Second-order polynomials: n | v | P + Q | P * Q | F(Q), with named
// order-0 variables and named order-1 variables applied to one argument.
// Values are immutable and freely shareable.
enum class SoKind { Const, Var, Add, Mul, App };

class SoPoly;
using SoPolyPtr = std::shared_ptr<const SoPoly>;

class SoPoly {
public:
    static SoPolyPtr constant(uint64_t v);
    static SoPolyPtr var(std::string name);
    static SoPolyPtr add(SoPolyPtr a, SoPolyPtr b);
    static SoPolyPtr mul(SoPolyPtr a, SoPolyPtr b);
    static SoPolyPtr app(std::string fun, SoPolyPtr argument);

    SoKind kind() const { return kind_; }
    uint64_t value() const;      // Const
    const std::string& name() const; // Var, App
    const SoPolyPtr& a() const;  // Add, Mul left; App argument
    const SoPolyPtr& b() const;  // Add, Mul right

private:
    SoPoly(SoKind k, uint64_t v, std::string n, SoPolyPtr a, SoPolyPtr b)
        : kind_(k), value_(v), name_(std::move(n)), a_(std::move(a)), b_(std::move(b)) {}

    SoKind kind_;
    uint64_t value_;
    std::string name_;
    SoPolyPtr a_, b_;
};

// `n`, decimal constants, `+`, `*`, `F(...)`, parentheses. Throws ParseError.
SoPolyPtr parse_sopoly(const std::string& text);
// minimal-parenthesis rendering; parse_sopoly(sopoly_to_string(p)) == p for
// simplified p
std::string sopoly_to_string(const SoPolyPtr& p);

// Normalization: constant folding, flattening of + and * chains, a constant
// factor distributed over a sum, like summands collected, and a canonical
// summand/factor order. Two polynomials produced by the constructions below
// are compared by equality of their simplified renderings; no polynomial
// identity testing beyond that is attempted.
SoPolyPtr simplify_sopoly(const SoPolyPtr& p);

struct SoEnv {
    std::map<std::string, uint64_t> nums;
    std::map<std::string, CsFun> funs;
};

// total on covered variables, saturating at the top of uint64; throws
// std::invalid_argument on an unbound name
uint64_t eval_sopoly(const SoPolyPtr& p, const SoEnv& env);

std::set<std::string> sopoly_num_vars(const SoPolyPtr& p);
std::set<std::string> sopoly_fun_vars(const SoPolyPtr& p);

// Capture-free substitution: order-0 variables map to polynomials; an
// order-1 name F maps to (binder, body), and every F(E) becomes body with
// the binder variable replaced by the substituted E.
struct SoSubstitution {
    std::map<std::string, SoPolyPtr> vars;
    std::map<std::string, std::pair<std::string, SoPolyPtr>> funs;
};
SoPolyPtr subst_sopoly(const SoPolyPtr& p, const SoSubstitution& s);

// The query-size polynomial: the sum, over every occurrence fc(E) in P
// (nested occurrences included), of E with any fc application inside it
// replaced by the constant 1. No occurrence yields 0. Simplified.
SoPolyPtr build_Q(const SoPolyPtr& P, const std::string& fc = "Fc");

// The oracle-answer length bound B(g, y) = Q[fs(z) := mu*g(z) + nu,
// x := mu*y + nu] where Q = build_Q(P, fc). mu and nu may be symbolic.
// Simplified.
SoPolyPtr build_B(const SoPolyPtr& P, const SoPolyPtr& mu, const SoPolyPtr& nu,
                  const std::string& fc = "Fc", const std::string& fs = "Fs",
                  const std::string& x = "x", const std::string& g = "G",
                  const std::string& y = "y");
SoPolyPtr build_B(const SoPolyPtr& P, uint64_t mu, uint64_t nu);

// The derivation-height bound D(f, n) = P[fc(z) := 1, fs(z) := mu*f(z) + nu,
// x := mu*n + nu]. Simplified.
SoPolyPtr build_D(const SoPolyPtr& P, const SoPolyPtr& mu, const SoPolyPtr& nu,
                  const std::string& fc = "Fc", const std::string& fs = "Fs",
                  const std::string& x = "x", const std::string& f = "F",
                  const std::string& n = "n");
SoPolyPtr build_D(const SoPolyPtr& P, uint64_t mu, uint64_t nu);

// The cost function of a symbol taking one order-1 argument and one base
// argument, as a polynomial over Fc, Fs, x (binders in that order). nullopt
// when the binder layout differs or the body uses max, monus, or pow.
std::optional<SoPolyPtr> sopoly_from_cost(const CsLambda& lam);

// ---------------------------------------------------------------------------
// finite oracle tables

struct OracleTable {
    std::map<Word, Word> entries;
    std::optional<Word> fallback; // answers unmapped queries when set

    // throws std::out_of_range when the word is unmapped and no fallback is
    // set
    const Word& lookup(const Word& w) const;
    bool covers(const Word& w) const;
};

// one mapping per line: `<bits> -> <bits>`, the empty word spelled `_`;
// '#' starts a comment. Throws ParseError on malformed lines or duplicates.
OracleTable parse_otab(const std::string& text);
std::string otab_to_string(const OracleTable& t);

// max { |table(x)| : x in A, |x| <= n }, 0 for an empty set; lookup errors
// propagate for members outside the table's coverage
uint64_t limitsize(const OracleTable& table, const std::vector<Word>& A, uint64_t n);

// limitsize over the table's whole mapped domain: the finite-table surrogate
// of the oracle length |f| (equal to it only relative to the table)
uint64_t table_length(const OracleTable& table, uint64_t n);

} // namespace cstuple
