#pragma once

#include "cstuple/csexpr.hpp"
#include "cstuple/strs.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cstuple {

// Cost and size interpretation functions, one pair per symbol.
struct CsInterp {
    std::map<std::string, CsLambda> sizes;
    std::map<std::string, CsLambda> costs;
};

// binder kind layouts implied by a symbol type: size binds one binder per
// argument; cost binds a (cost, size) function pair per order-1 argument and
// one number per base argument, in positional order
std::vector<BinderKind> size_binder_kinds(const TypePtr& symbolType);
std::vector<BinderKind> cost_binder_kinds(const TypePtr& symbolType);

// .csi format: `size f = \x y. expr` / `cost f = \x y. expr`; constructors
// may omit lines (they default to 0 of the right shape), other symbols must
// be fully specified. Throws ParseError.
CsInterp parse_interp(const std::string& text, const Strs& strs);
// round-trippable .csi text, symbols in signature declaration order
std::string interp_to_string(const CsInterp& interp, const Strs& strs);

// ---------- valuations ----------

struct DescribedFun {
    CsFun fn;
    std::string desc;
};

// assignments for the free variables of a rule: sizes for base variables,
// (size, cost) function pairs for order-1 variables
struct Valuation {
    std::map<std::string, uint64_t> nums;
    std::map<std::string, DescribedFun> sizeFuns;
    std::map<std::string, DescribedFun> costFuns;
    std::string describe() const;
};

// runtime semantics for oracle symbols: answer-length bound and per-call cost
struct OracleSem {
    CsFun size;
    uint64_t callCost = 1;
};
using OracleSems = std::map<std::string, OracleSem>;

// ---------- evaluation ----------

// denotation of a term in the size domain: a natural for base-type terms, an
// applicable value for arrow-type terms
struct SizeValue {
    std::optional<uint64_t> num;
    std::function<SizeValue(const SizeValue&)> fn;

    bool is_num() const { return num.has_value(); }
    uint64_t as_num() const;
    CsFun as_fun() const; // order-1 values only
};

SizeValue eval_size(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                    const OracleSems* oracles = nullptr);
uint64_t eval_size_num(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                       const OracleSems* oracles = nullptr);

// cost of a base-type term (or fully applied spine); throws std::logic_error
// on a bare base-type variable, whose cost is not determined by a rule
// valuation
uint64_t eval_cost(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                   const OracleSems* oracles = nullptr);

// sum of eval_cost over all non-variable base-type subterm occurrences
uint64_t totalcost(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                   const OracleSems* oracles = nullptr);
// same, restricted to subterms not in normal form
uint64_t totalcost_prime(const CsInterp& interp, const Strs& strs, const TermPtr& s,
                         const Valuation& val, const OracleSems* oracles = nullptr);

// ---------- compatibility checking ----------

struct Falsification {
    size_t ruleIndex;
    enum class Which { Cost, Size } which;
    uint64_t lhsValue;
    uint64_t rhsValue; // totalcost(rhs) for cost, size of rhs for size
    std::string valuation;
};

struct Verdict {
    enum class Kind { Certified, Tested, Falsified, Unknown } kind;
    size_t samples = 0;                        // Tested
    std::optional<Falsification> falsification; // Falsified
    std::string reason;                        // Unknown
    std::string to_string() const;
};

enum class CheckMode { Falsify, Certify };

// Falsify: sample valuations (grid then random, seeded per rule) and report
// the first counterexample to cost strictness or the size order. Certify:
// sound symbolic coefficient-domination check over the certifiable fragment;
// never wrongly certifies, says Unknown when it cannot conclude.
Verdict check_rule(const CsInterp& interp, const Strs& strs, size_t ruleIndex, CheckMode mode,
                   size_t budget = 1000, uint64_t seed = 0);

struct SystemVerdict {
    std::vector<Verdict> rules;
    Verdict::Kind overall; // Certified only when every rule is Certified
};

SystemVerdict check_system(const CsInterp& interp, const Strs& strs, CheckMode mode,
                           size_t budget = 1000, uint64_t seed = 0);

// sampled weak-monotonicity check of every interpretation function with
// respect to the per-sort ordering directions
std::vector<std::string> check_monotonicity(const CsInterp& interp, const Strs& strs,
                                            uint64_t seed = 0, size_t samples = 200);

// ---------- polynomially bounded interpretations over words ----------

struct PolyBoundedReport {
    bool ok;
    std::vector<std::string> problems;
    uint64_t mu = 0; // max bit size + cons increment
    uint64_t nu = 0; // size of the empty word
    CsLambda mainCost; // the main symbol's cost function (the bound polynomial)
    std::string to_string() const;
};

// checks: word sort over naturals descending; all constructor costs zero;
// cons size of the shape x + y + c (c >= 1), the x treated as optional
// exactly when every bit constructor has size 0; the main symbol's cost body
// inside the polynomial fragment
PolyBoundedReport check_poly_bounded(const CsInterp& interp, const Strs& strs,
                                     const std::string& mainSymbol);

// sizes reachable by ground constructor terms, per sort, bounded search;
// sorts marked "open" (no constructors, or constructors with order-1
// arguments) are listed with an empty vector
struct ReachableSizes {
    std::map<std::string, std::vector<uint64_t>> values;
    std::map<std::string, bool> open;
    bool is_open(const std::string& sort) const;
    const std::vector<uint64_t>& of(const std::string& sort) const;
};

ReachableSizes reachable_sizes(const CsInterp& interp, const Signature& sig,
                               uint64_t cap = 64, size_t maxValues = 40);

} // namespace cstuple
