#pragma once

#include "cstuple/interp.hpp"
#include "cstuple/sopoly.hpp"
#include "cstuple/strs.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cstuple {

inline constexpr size_t kDefaultMaxSteps = 1000000;

// thrown when a run fails to reach a normal form within its step budget
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// tables bound to oracle symbols, by symbol name
using OracleBinding = std::map<std::string, OracleTable>;

// a contraction site: either a rule match or an oracle call
struct Redex {
    Position position;
    std::optional<size_t> rule; // index into strs.rules; empty for oracle sites
    Subst subst;                // rule sites only
    std::string oracleSymbol;   // oracle sites only
    Word query;                 // oracle sites only

    bool is_oracle() const { return !rule.has_value(); }
};

// one reduction step; oracle records carry the query and the answer
struct StepRecord {
    Position position;
    std::optional<size_t> rule;
    std::string oracleSymbol;
    Word query, answer;
    size_t nodesBefore = 0;
    size_t nodesAfter = 0;

    bool is_oracle() const { return !rule.has_value(); }
};

struct RunStats {
    size_t steps = 0;
    size_t oracleCalls = 0;
    uint64_t maxQuery = 0;  // longest oracle query, in bits
    size_t maxNodes = 0;    // peak term size over the whole run
    bool normalForm = false;
};

// The leftmost-innermost contraction site of a ground term: positions are
// visited post-order with the function side before the argument side, and
// rules are tried in declaration order at each position. An oracle site is a
// fully applied oracle symbol whose arguments are all encoded words; it only
// fires once its arguments are normal forms, which innermost order gives for
// free. nullopt means s is a normal form.
std::optional<Redex> find_innermost_redex(const Strs& strs, const TermPtr& s);

// Contract the innermost redex once. Oracle sites answer from the bound
// table in a single step. Throws std::invalid_argument when an oracle symbol
// has no bound table (or is not unary), and std::out_of_range when the table
// has no entry (and no fallback) for the query.
std::optional<std::pair<TermPtr, StepRecord>> step(const Strs& strs,
                                                   const OracleBinding* oracles,
                                                   const TermPtr& s);

struct RunResult {
    TermPtr result;
    std::vector<StepRecord> trace;
    RunStats stats;
};

// Iterate step until a normal form or maxSteps. A budget exhaustion is not an
// error: the partial trace is returned with stats.normalForm = false.
RunResult normalize(const Strs& strs, const OracleBinding* oracles, TermPtr s,
                    size_t maxSteps = kDefaultMaxSteps);

// trace lines, one per step: `<step#> <position> <rule-id|oracle> <nodes-before>
// <nodes-after>`; rules print as r<index>, oracle steps as oracle:<symbol>
std::string trace_to_string(const std::vector<StepRecord>& trace);
// key-value footer: steps, oracle-calls, max-query, max-nodes, normal-form
std::string stats_to_string(const RunStats& stats);

struct ComputeResult {
    Word output;
    TermPtr start;  // the synthesized start term
    TermPtr normal; // its normal form
    std::vector<StepRecord> trace;
    RunStats stats;
};

// Apply a second-order program to an oracle: build `main S w` where S is an
// oracle symbol answering from the table (added to a copy of the signature if
// absent), normalize, and decode the normal form. The main symbol must have
// type (word -> word) -> word -> word. Throws std::invalid_argument on a
// wrongly typed main or oracle symbol or a normal form that is not a word
// encoding, BudgetExhausted past maxSteps, and oracle lookup errors.
ComputeResult compute_type2(const Strs& strs, const std::string& mainSymbol,
                            const OracleTable& oracle, const Word& w,
                            size_t maxSteps = kDefaultMaxSteps,
                            const std::string& oracleSymbol = "S");

// A run with its two predicted ceilings: the step count against the
// derivation-height bound D evaluated at (table_length, |w|), and the longest
// oracle query against the query-length bound B at the same point.
struct MonitorReport {
    Word output;
    RunStats stats;
    uint64_t mu = 0, nu = 0;
    std::string Dtext; // D rendered over (F, n)
    std::string Btext; // B rendered over (G, y)
    uint64_t Dvalue = 0;
    uint64_t Bvalue = 0;
    bool ok = false; // steps <= Dvalue and maxQuery <= Bvalue

    std::string to_string() const; // key-value lines
};

// Requires an interpretation that passes check_poly_bounded for mainSymbol
// (throws std::invalid_argument listing the problems otherwise); other errors
// as compute_type2.
MonitorReport monitor_bounds(const Strs& strs, const CsInterp& interp,
                             const std::string& mainSymbol, const OracleTable& oracle,
                             const Word& w, size_t maxSteps = kDefaultMaxSteps,
                             const std::string& oracleSymbol = "S");

} // namespace cstuple
