#pragma once

#include "cstuple/interp.hpp"
#include "cstuple/rewrite.hpp"
#include "cstuple/sopoly.hpp"
#include "cstuple/strs.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cstuple {

// ---------------------------------------------------------------------------
// Oracle Turing machines: three right-infinite tapes over {0, 1, blank} and
// one type-1 oracle. Tape 1 is the main tape, tape 2 the query tape, tape 3
// the answer tape.

enum class TapeSymbol : uint8_t { Zero, One, Blank };

enum class MoveDir : uint8_t { Left, Right };

char tape_symbol_char(TapeSymbol s); // '0', '1', 'B'
std::optional<TapeSymbol> tape_symbol_of(char c);

struct OtmTransition {
    std::string from;
    int tape = 1; // 1..3
    TapeSymbol read = TapeSymbol::Blank;
    TapeSymbol write = TapeSymbol::Blank;
    MoveDir move = MoveDir::Right;
    std::string to;
};

struct OtmSpec {
    std::vector<std::string> states; // in order of first mention
    std::string start, final, query, answer;
    std::vector<OtmTransition> transitions;
};

// Line format: `start <s>`, `final <s>`, `query <s>`, `answer <s>`,
// `trans <from> <tape> <read> <write> <move> <to>` with read/write in
// {0,1,B} and move in {L,R}; '#' starts a comment. State names are
// identifiers ([A-Za-z_][A-Za-z0-9_]*). All four declaration lines are
// required, each exactly once. Throws ParseError.
OtmSpec parse_otm(const std::string& text);
std::string otm_to_string(const OtmSpec& spec);

// Hard errors (std::invalid_argument): a tape outside 1..3, two transitions
// from one state watching different tapes, two transitions sharing
// (from, read), any transition out of the final state, and any transition
// out of the query state (its only exit is the built-in oracle step).
// Returns warnings, one per left-moving transition: a left move with the
// head already at the leftmost cell stays in place.
std::vector<std::string> validate_otm(const OtmSpec& spec);

// One tape, split at the head: cells left of the head in reverse order
// (left.front() is the nearest) and the head cell plus everything to its
// right in order. Cells beyond the stored lists are blank.
struct TapeHalves {
    std::vector<TapeSymbol> left, right;

    bool operator==(const TapeHalves&) const = default;
};

struct OtmConfig {
    std::string state;
    std::array<TapeHalves, 3> tapes;

    bool operator==(const OtmConfig&) const = default;
};

// w on tape 1 with the head at its leftmost bit, tapes 2 and 3 blank, in
// the start state
OtmConfig initial_config(const OtmSpec& spec, const Word& w);

// One machine step. A non-query state applies its unique enabled transition:
// the read symbol is the head of the tape's right list (blank when the list
// is empty), the write replaces it, then the head moves; a left move with
// nothing to the left stays in place. The query state performs the built-in
// oracle step: read the query word from the tape-2 head up to the first
// blank, erase tape 2, write the oracle's answer on tape 3 with the head on
// its leftmost bit, and enter the answer state — all as one step.
// Throws std::invalid_argument when the state is final or no transition is
// enabled (the machine is stuck); oracle lookup misses propagate as
// std::out_of_range.
OtmConfig otm_step(const OtmSpec& spec, const OracleTable& oracle, const OtmConfig& c);

struct OtmRun {
    Word output;
    size_t steps = 0;
    size_t oracleCalls = 0;
};

// Run from initial_config(spec, w) until the final state; the output is the
// main-tape content from the head up to the first blank. Throws
// BudgetExhausted past maxSteps, plus anything otm_step throws.
OtmRun otm_run(const OtmSpec& spec, const OracleTable& oracle, const Word& w,
               size_t maxSteps = kDefaultMaxSteps);

// ---------------------------------------------------------------------------
// term encoding of configurations, over a compiled system's signature

// `st_<state> (split (L <left>) (R <right>)) ...` with each tape's cell
// lists embedded verbatim (left lists are already reversed). Requires the
// symbols compile_otm emits; throws std::invalid_argument when the state
// symbol is missing from the signature.
TermPtr encode_config(const OtmConfig& c, const Signature& sig);
// Inverse; throws std::invalid_argument on terms that are not configuration
// encodings.
OtmConfig decode_config(const TermPtr& t);

// ---------------------------------------------------------------------------
// compiling a machine to a rewriting system with a cost-size interpretation

struct CompiledOtm {
    Strs strs;
    CsInterp interp;
    std::string strsText; // the .strs source strs was parsed from
    std::string csiText;  // the .csi source interp was parsed from
};

// Compile the machine into one simply-typed rewriting system: configuration
// constructors, per-transition step rules (a blank read splits into explicit
// `b`-cell and empty-list variants; a left move gets stay-at-leftmost
// variants), the oracle query rule, word cleanup, the helper algebra (len,
// max, limit, retif, tryapply, tryall, add, mult), and the budgeted
// execution loop driven by the runtime bound: `main f w` normalizes to the
// machine's output on w. runtimeBound must be a second-order polynomial in
// at most one function name and one number name bounding the machine's step
// count as a function of the oracle's length and |w|; it is trusted, not
// verified. The generated interpretation orients every rule.
// Throws std::invalid_argument on an invalid machine or runtime bound.
CompiledOtm compile_otm(const OtmSpec& spec, const SoPolyPtr& runtimeBound);

// The term computing P(limitsize(f, A), n) by brute force: constants become
// unary numerals, the number variable becomes zTerm, sums and products map
// to `add`/`mult`, and every F(Q) becomes `tryall fterm aterm <Q-term>`.
// sig must declare those symbols (compile_otm's systems do). p must be in
// the second-order polynomial grammar over at most one function name and
// one number name.
TermPtr build_theta(const SoPolyPtr& p, const TermPtr& fterm, const TermPtr& zterm,
                    const TermPtr& aterm, const Signature& sig);

} // namespace cstuple
