#include "cstuple/otm.hpp"

#include "cstuple/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cstuple {

namespace {

std::string tape_symbol_name(TapeSymbol s) {
    switch (s) {
    case TapeSymbol::Zero: return "o";
    case TapeSymbol::One: return "i";
    case TapeSymbol::Blank: return "b";
    }
    throw std::logic_error("unreachable tape symbol");
}

bool valid_state_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

void mention_state(OtmSpec& spec, const std::string& name) {
    if (std::find(spec.states.begin(), spec.states.end(), name) == spec.states.end())
        spec.states.push_back(name);
}

} // namespace

char tape_symbol_char(TapeSymbol s) {
    switch (s) {
    case TapeSymbol::Zero: return '0';
    case TapeSymbol::One: return '1';
    case TapeSymbol::Blank: return 'B';
    }
    throw std::logic_error("unreachable tape symbol");
}

std::optional<TapeSymbol> tape_symbol_of(char c) {
    switch (c) {
    case '0': return TapeSymbol::Zero;
    case '1': return TapeSymbol::One;
    case 'B': return TapeSymbol::Blank;
    default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// .otm parsing

OtmSpec parse_otm(const std::string& text) {
    OtmSpec spec;
    bool haveStart = false, haveFinal = false, haveQuery = false, haveAnswer = false;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    std::vector<std::pair<std::string, int>> declared; // (state, line) in order

    while (std::getline(in, line)) {
        ++lineNo;
        if (size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;

        auto readState = [&](const char* what) {
            std::string name;
            if (!(ls >> name))
                throw ParseError(std::string("expected a state name after '") + what + "'",
                                 lineNo, 1);
            if (!valid_state_name(name))
                throw ParseError("invalid state name '" + name + "'", lineNo, 1);
            return name;
        };

        if (kw == "start" || kw == "final" || kw == "query" || kw == "answer") {
            std::string name = readState(kw.c_str());
            bool* seen = kw == "start"    ? &haveStart
                         : kw == "final"  ? &haveFinal
                         : kw == "query"  ? &haveQuery
                                          : &haveAnswer;
            if (*seen) throw ParseError("duplicate '" + kw + "' line", lineNo, 1);
            *seen = true;
            if (kw == "start") spec.start = name;
            else if (kw == "final") spec.final = name;
            else if (kw == "query") spec.query = name;
            else spec.answer = name;
            declared.emplace_back(name, lineNo);
        } else if (kw == "trans") {
            OtmTransition tr;
            tr.from = readState("trans");
            std::string tape, read, write, move;
            if (!(ls >> tape >> read >> write >> move))
                throw ParseError("expected '<tape> <read> <write> <move> <to>'", lineNo, 1);
            if (tape != "1" && tape != "2" && tape != "3")
                throw ParseError("tape must be 1, 2, or 3, got '" + tape + "'", lineNo, 1);
            tr.tape = tape[0] - '0';
            auto sym = [&](const std::string& s, const char* what) {
                if (s.size() != 1 || !tape_symbol_of(s[0]))
                    throw ParseError(std::string(what) + " symbol must be 0, 1, or B, got '" +
                                         s + "'",
                                     lineNo, 1);
                return *tape_symbol_of(s[0]);
            };
            tr.read = sym(read, "read");
            tr.write = sym(write, "write");
            if (move == "L") tr.move = MoveDir::Left;
            else if (move == "R") tr.move = MoveDir::Right;
            else throw ParseError("move must be L or R, got '" + move + "'", lineNo, 1);
            std::string to;
            if (!(ls >> to)) throw ParseError("expected a target state", lineNo, 1);
            if (!valid_state_name(to))
                throw ParseError("invalid state name '" + to + "'", lineNo, 1);
            tr.to = to;
            std::string extra;
            if (ls >> extra)
                throw ParseError("unexpected token '" + extra + "'", lineNo, 1);
            spec.transitions.push_back(tr);
            declared.emplace_back(tr.from, lineNo);
            declared.emplace_back(tr.to, lineNo);
        } else {
            throw ParseError("unknown directive '" + kw + "'", lineNo, 1);
        }
    }

    if (!haveStart) throw ParseError("missing 'start' line", lineNo, 1);
    if (!haveFinal) throw ParseError("missing 'final' line", lineNo, 1);
    if (!haveQuery) throw ParseError("missing 'query' line", lineNo, 1);
    if (!haveAnswer) throw ParseError("missing 'answer' line", lineNo, 1);
    for (const auto& [name, _] : declared) mention_state(spec, name);
    return spec;
}

std::string otm_to_string(const OtmSpec& spec) {
    std::ostringstream os;
    os << "start " << spec.start << "\n";
    os << "final " << spec.final << "\n";
    os << "query " << spec.query << "\n";
    os << "answer " << spec.answer << "\n";
    for (const OtmTransition& tr : spec.transitions)
        os << "trans " << tr.from << " " << tr.tape << " " << tape_symbol_char(tr.read) << " "
           << tape_symbol_char(tr.write) << " " << (tr.move == MoveDir::Left ? "L" : "R") << " "
           << tr.to << "\n";
    return os.str();
}

std::vector<std::string> validate_otm(const OtmSpec& spec) {
    std::set<std::string> known(spec.states.begin(), spec.states.end());
    auto checkKnown = [&](const std::string& s, const char* role) {
        if (!known.count(s))
            throw std::invalid_argument(std::string(role) + " state '" + s +
                                        "' is not in the state list");
    };
    checkKnown(spec.start, "start");
    checkKnown(spec.final, "final");
    checkKnown(spec.query, "query");
    checkKnown(spec.answer, "answer");

    std::map<std::string, int> watchedTape;
    std::map<std::pair<std::string, TapeSymbol>, size_t> seenRead;
    std::vector<std::string> warnings;
    for (size_t idx = 0; idx < spec.transitions.size(); ++idx) {
        const OtmTransition& tr = spec.transitions[idx];
        checkKnown(tr.from, "source");
        checkKnown(tr.to, "target");
        if (tr.tape < 1 || tr.tape > 3)
            throw std::invalid_argument("transition " + std::to_string(idx) +
                                        ": tape must be 1, 2, or 3");
        if (tr.from == spec.final)
            throw std::invalid_argument("state '" + tr.from +
                                        "' is final; transitions out of it are not allowed");
        if (tr.from == spec.query)
            throw std::invalid_argument(
                "state '" + tr.from +
                "' is the query state; its only exit is the built-in oracle step");
        auto [it, fresh] = watchedTape.emplace(tr.from, tr.tape);
        if (!fresh && it->second != tr.tape)
            throw std::invalid_argument("state '" + tr.from + "' watches both tape " +
                                        std::to_string(it->second) + " and tape " +
                                        std::to_string(tr.tape) +
                                        "; transitions from one state must observe a single tape");
        if (!seenRead.emplace(std::make_pair(tr.from, tr.read), idx).second)
            throw std::invalid_argument(std::string("nondeterministic: state '") + tr.from +
                                        "' has two transitions reading '" +
                                        tape_symbol_char(tr.read) + "'");
        if (tr.move == MoveDir::Left)
            warnings.push_back("transition " + tr.from + " -> " + tr.to + " (tape " +
                               std::to_string(tr.tape) + ", read " + tape_symbol_char(tr.read) +
                               ") moves left; it stays in place when the head is already at the "
                               "leftmost cell");
    }
    return warnings;
}

// ---------------------------------------------------------------------------
// direct simulation

OtmConfig initial_config(const OtmSpec& spec, const Word& w) {
    OtmConfig c;
    c.state = spec.start;
    for (uint8_t bit : w.bits)
        c.tapes[0].right.push_back(bit ? TapeSymbol::One : TapeSymbol::Zero);
    return c;
}

namespace {

// the cells from the head up to the first blank, as a word
Word head_word(const TapeHalves& tape) {
    Word w;
    for (TapeSymbol s : tape.right) {
        if (s == TapeSymbol::Blank) break;
        w.bits.push_back(s == TapeSymbol::One ? 1 : 0);
    }
    return w;
}

} // namespace

OtmConfig otm_step(const OtmSpec& spec, const OracleTable& oracle, const OtmConfig& c) {
    if (c.state == spec.final)
        throw std::invalid_argument("the machine is already in its final state");

    OtmConfig d = c;
    if (c.state == spec.query) {
        const Word query = head_word(c.tapes[1]);
        const Word& answer = oracle.lookup(query);
        d.state = spec.answer;
        d.tapes[1] = TapeHalves{};
        d.tapes[2].left.clear();
        d.tapes[2].right.clear();
        for (uint8_t bit : answer.bits)
            d.tapes[2].right.push_back(bit ? TapeSymbol::One : TapeSymbol::Zero);
        return d;
    }

    const OtmTransition* chosen = nullptr;
    bool anyFrom = false;
    for (const OtmTransition& tr : spec.transitions) {
        if (tr.from != c.state) continue;
        anyFrom = true;
        const TapeHalves& t = c.tapes[static_cast<size_t>(tr.tape - 1)];
        TapeSymbol readHere = t.right.empty() ? TapeSymbol::Blank : t.right.front();
        if (tr.read == readHere) {
            chosen = &tr;
            break;
        }
    }
    if (!chosen) {
        if (!anyFrom)
            throw std::invalid_argument("stuck: no transition out of state '" + c.state + "'");
        throw std::invalid_argument("stuck: state '" + c.state +
                                    "' has no transition for the symbol under its head");
    }

    TapeHalves& t = d.tapes[static_cast<size_t>(chosen->tape - 1)];
    if (t.right.empty()) t.right.push_back(chosen->write);
    else t.right.front() = chosen->write;
    if (chosen->move == MoveDir::Right) {
        t.left.insert(t.left.begin(), t.right.front());
        t.right.erase(t.right.begin());
    } else if (!t.left.empty()) {
        t.right.insert(t.right.begin(), t.left.front());
        t.left.erase(t.left.begin());
    } // a left move at the leftmost cell stays in place
    d.state = chosen->to;
    return d;
}

OtmRun otm_run(const OtmSpec& spec, const OracleTable& oracle, const Word& w, size_t maxSteps) {
    OtmConfig c = initial_config(spec, w);
    OtmRun run;
    while (c.state != spec.final) {
        if (run.steps >= maxSteps)
            throw BudgetExhausted("machine did not halt within " + std::to_string(maxSteps) +
                                  " steps");
        if (c.state == spec.query) ++run.oracleCalls;
        c = otm_step(spec, oracle, c);
        ++run.steps;
    }
    run.output = head_word(c.tapes[0]);
    return run;
}

// ---------------------------------------------------------------------------
// configuration terms

namespace {

TermPtr cells_term(const std::vector<TapeSymbol>& cells, const Signature& sig) {
    TermPtr t = sig.make_symbol("nil");
    for (auto it = cells.rbegin(); it != cells.rend(); ++it)
        t = Term::app(sig.make_symbol("cons"), {sig.make_symbol(tape_symbol_name(*it)), t});
    return t;
}

TermPtr tape_term(const TapeHalves& tape, const Signature& sig) {
    TermPtr l = Term::app(sig.make_symbol("L"), {cells_term(tape.left, sig)});
    TermPtr r = Term::app(sig.make_symbol("R"), {cells_term(tape.right, sig)});
    return Term::app(sig.make_symbol("split"), {l, r});
}

std::vector<TapeSymbol> decode_cells(const TermPtr& t) {
    std::vector<TapeSymbol> cells;
    TermPtr cur = t;
    for (;;) {
        TermPtr head = spine_head(cur);
        if (head->kind() != TermKind::Sym)
            throw std::invalid_argument("not a configuration term: malformed cell list");
        std::vector<TermPtr> args = spine_args(cur);
        if (head->name() == "nil" && args.empty()) return cells;
        if (head->name() == "cons" && args.size() == 2) {
            TermPtr cell = args[0];
            if (cell->kind() != TermKind::Sym)
                throw std::invalid_argument("not a configuration term: malformed cell");
            if (cell->name() == "o") cells.push_back(TapeSymbol::Zero);
            else if (cell->name() == "i") cells.push_back(TapeSymbol::One);
            else if (cell->name() == "b") cells.push_back(TapeSymbol::Blank);
            else
                throw std::invalid_argument("not a configuration term: unknown cell symbol '" +
                                            cell->name() + "'");
            cur = args[1];
            continue;
        }
        throw std::invalid_argument("not a configuration term: malformed cell list");
    }
}

TapeHalves decode_tape(const TermPtr& t) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() != TermKind::Sym || head->name() != "split" || args.size() != 2)
        throw std::invalid_argument("not a configuration term: expected a split tape");
    auto side = [&](const TermPtr& s, const char* wrapper) {
        TermPtr h = spine_head(s);
        std::vector<TermPtr> a = spine_args(s);
        if (h->kind() != TermKind::Sym || h->name() != wrapper || a.size() != 1)
            throw std::invalid_argument(std::string("not a configuration term: expected ") +
                                        wrapper + " (...)");
        return decode_cells(a[0]);
    };
    TapeHalves tape;
    tape.left = side(args[0], "L");
    tape.right = side(args[1], "R");
    return tape;
}

} // namespace

TermPtr encode_config(const OtmConfig& c, const Signature& sig) {
    const std::string symName = "st_" + c.state;
    if (!sig.has_symbol(symName))
        throw std::invalid_argument("signature has no state symbol '" + symName +
                                    "'; not a compiled machine signature");
    return Term::app(sig.make_symbol(symName), {tape_term(c.tapes[0], sig),
                                                tape_term(c.tapes[1], sig),
                                                tape_term(c.tapes[2], sig)});
}

OtmConfig decode_config(const TermPtr& t) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() != TermKind::Sym || head->name().rfind("st_", 0) != 0 || args.size() != 3)
        throw std::invalid_argument("not a configuration term: expected st_<state> t1 t2 t3");
    OtmConfig c;
    c.state = head->name().substr(3);
    for (size_t k = 0; k < 3; ++k) c.tapes[k] = decode_tape(args[k]);
    return c;
}

// ---------------------------------------------------------------------------
// the budget term and its cost accounting

namespace {

void check_theta_grammar(const SoPolyPtr& p) {
    if (sopoly_num_vars(p).size() > 1)
        throw std::invalid_argument(
            "runtime bound must use at most one number variable, got {" +
            [&] {
                std::string s;
                for (const std::string& v : sopoly_num_vars(p)) s += (s.empty() ? "" : ", ") + v;
                return s;
            }() +
            "}");
    if (sopoly_fun_vars(p).size() > 1)
        throw std::invalid_argument("runtime bound must use at most one function name");
}

std::string wrap_term_text(const std::string& s) {
    return s.find(' ') == std::string::npos ? s : "(" + s + ")";
}

std::string numeral_text(uint64_t k) {
    std::string t = "0";
    for (uint64_t j = 0; j < k; ++j) t = "s " + wrap_term_text(t);
    return t;
}

// mirrors build_theta, producing rule-source text
std::string theta_text(const SoPolyPtr& p, const std::string& fterm, const std::string& zterm,
                       const std::string& aterm) {
    switch (p->kind()) {
    case SoKind::Const: return numeral_text(p->value());
    case SoKind::Var: return zterm;
    case SoKind::Add:
        return "add " + wrap_term_text(theta_text(p->a(), fterm, zterm, aterm)) + " " +
               wrap_term_text(theta_text(p->b(), fterm, zterm, aterm));
    case SoKind::Mul:
        return "mult " + wrap_term_text(theta_text(p->a(), fterm, zterm, aterm)) + " " +
               wrap_term_text(theta_text(p->b(), fterm, zterm, aterm));
    case SoKind::App:
        return "tryall " + wrap_term_text(fterm) + " " + wrap_term_text(aterm) + " " +
               wrap_term_text(theta_text(p->a(), fterm, zterm, aterm));
    }
    throw std::logic_error("unreachable polynomial kind");
}

struct ThetaCostBound {
    SoPolyPtr perMember; // multiplies the query-set cardinality
    SoPolyPtr base;
};

// The exact cost of normalizing the budget term, as perMember * |A| + base:
// every add/mult/tryall node contributes its interpretation's cost at the
// sizes of its (already computed) arguments. S(q) is the value a sub-term
// computes, as a polynomial over fs and z.
ThetaCostBound theta_cost_bound(const SoPolyPtr& p, const std::string& fc, const std::string& fs,
                                const std::string& z) {
    auto S = [&](const SoPolyPtr& q) {
        SoSubstitution s;
        for (const std::string& v : sopoly_num_vars(q)) s.vars[v] = SoPoly::var(z);
        for (const std::string& f : sopoly_fun_vars(q))
            s.funs[f] = {"u", SoPoly::app(fs, SoPoly::var("u"))};
        return subst_sopoly(q, s);
    };
    auto k = [](uint64_t v) { return SoPoly::constant(v); };
    switch (p->kind()) {
    case SoKind::Const:
    case SoKind::Var: return {k(0), k(0)};
    case SoKind::Add: {
        ThetaCostBound l = theta_cost_bound(p->a(), fc, fs, z);
        ThetaCostBound r = theta_cost_bound(p->b(), fc, fs, z);
        return {SoPoly::add(l.perMember, r.perMember),
                SoPoly::add(SoPoly::add(l.base, r.base), SoPoly::add(S(p->a()), k(1)))};
    }
    case SoKind::Mul: {
        ThetaCostBound l = theta_cost_bound(p->a(), fc, fs, z);
        ThetaCostBound r = theta_cost_bound(p->b(), fc, fs, z);
        SoPolyPtr multCost = SoPoly::add(
            SoPoly::add(SoPoly::mul(S(p->a()), S(p->b())), SoPoly::mul(k(2), S(p->a()))), k(1));
        return {SoPoly::add(l.perMember, r.perMember),
                SoPoly::add(SoPoly::add(l.base, r.base), multCost)};
    }
    case SoKind::App: {
        ThetaCostBound q = theta_cost_bound(p->a(), fc, fs, z);
        SoPolyPtr n = S(p->a());
        SoPolyPtr per = SoPoly::add(
            SoPoly::add(SoPoly::app(fc, n), SoPoly::mul(k(2), SoPoly::app(fs, n))),
            SoPoly::add(SoPoly::mul(k(2), n), k(6)));
        return {SoPoly::add(q.perMember, per), SoPoly::add(q.base, k(1))};
    }
    }
    throw std::logic_error("unreachable polynomial kind");
}

} // namespace

TermPtr build_theta(const SoPolyPtr& p, const TermPtr& fterm, const TermPtr& zterm,
                    const TermPtr& aterm, const Signature& sig) {
    check_theta_grammar(p);
    switch (p->kind()) {
    case SoKind::Const: {
        TermPtr t = sig.make_symbol("0");
        for (uint64_t j = 0; j < p->value(); ++j) t = Term::app(sig.make_symbol("s"), {t});
        return t;
    }
    case SoKind::Var: return zterm;
    case SoKind::Add:
        return Term::app(sig.make_symbol("add"), {build_theta(p->a(), fterm, zterm, aterm, sig),
                                                  build_theta(p->b(), fterm, zterm, aterm, sig)});
    case SoKind::Mul:
        return Term::app(sig.make_symbol("mult"), {build_theta(p->a(), fterm, zterm, aterm, sig),
                                                   build_theta(p->b(), fterm, zterm, aterm, sig)});
    case SoKind::App:
        return Term::app(sig.make_symbol("tryall"),
                         {fterm, aterm, build_theta(p->a(), fterm, zterm, aterm, sig)});
    }
    throw std::logic_error("unreachable polynomial kind");
}

// ---------------------------------------------------------------------------
// the compiler

namespace {

// the runtime bound with its function renamed to `fun` and its variable to
// `var`, rendered as interpretation-expression text
std::string render_bound(const SoPolyPtr& pm, const std::string& fun, const std::string& var) {
    SoSubstitution s;
    for (const std::string& v : sopoly_num_vars(pm)) s.vars[v] = SoPoly::var(var);
    for (const std::string& f : sopoly_fun_vars(pm))
        s.funs[f] = {"u", SoPoly::app(fun, SoPoly::var("u"))};
    return sopoly_to_string(simplify_sopoly(subst_sopoly(pm, s)));
}

struct TapeRuleVariant {
    std::string pattern, result;
};

std::vector<TapeRuleVariant> tape_rule_variants(const OtmTransition& tr) {
    const std::string w = tape_symbol_name(tr.write);
    std::vector<TapeRuleVariant> out;
    if (tr.read != TapeSymbol::Blank) {
        const std::string r = tape_symbol_name(tr.read);
        if (tr.move == MoveDir::Left) {
            out.push_back({"split (L (cons x y)) (R (cons " + r + " z))",
                           "split (L y) (R (cons x (cons " + w + " z)))"});
            out.push_back({"split (L nil) (R (cons " + r + " z))",
                           "split (L nil) (R (cons " + w + " z))"});
        } else {
            out.push_back({"split (L y) (R (cons " + r + " z))",
                           "split (L (cons " + w + " y)) (R z)"});
        }
    } else if (tr.move == MoveDir::Left) {
        out.push_back({"split (L (cons x y)) (R (cons b z))",
                       "split (L y) (R (cons x (cons " + w + " z)))"});
        out.push_back({"split (L (cons x y)) (R nil)",
                       "split (L y) (R (cons x (cons " + w + " nil)))"});
        out.push_back({"split (L nil) (R (cons b z))", "split (L nil) (R (cons " + w + " z))"});
        out.push_back({"split (L nil) (R nil)", "split (L nil) (R (cons " + w + " nil))"});
    } else {
        out.push_back({"split (L y) (R (cons b z))", "split (L (cons " + w + " y)) (R z)"});
        out.push_back({"split (L y) (R nil)", "split (L (cons " + w + " y)) (R nil)"});
    }
    return out;
}

std::string config_args(int tape, const std::string& affected) {
    std::string out;
    for (int k = 1; k <= 3; ++k) {
        out += " ";
        if (k == tape) out += "(" + affected + ")";
        else out += "t" + std::to_string(k);
    }
    return out;
}

} // namespace

CompiledOtm compile_otm(const OtmSpec& spec, const SoPolyPtr& runtimeBound) {
    validate_otm(spec);
    check_theta_grammar(runtimeBound);
    const SoPolyPtr pm = simplify_sopoly(runtimeBound);
    const SoPolyPtr pm1 = simplify_sopoly(SoPoly::add(pm, SoPoly::constant(1)));

    // ---- the rewriting system ----------------------------------------
    std::ostringstream s;
    s << "# compiled from an oracle machine: " << spec.states.size() << " states, "
      << spec.transitions.size() << " transitions\n";
    s << "# start " << spec.start << ", final " << spec.final << ", query " << spec.query
      << ", answer " << spec.answer << "\n\n";
    s << "sort bit\nsort word\nsort left\nsort right\nsort tape\nsort config\n";
    s << "sort nat\nsort nnat asc\nsort set\n\n";
    s << "cons o : bit\ncons i : bit\ncons b : bit\n";
    s << "cons nil : word\ncons cons : bit -> word -> word\n";
    s << "cons L : word -> left\ncons R : word -> right\n";
    s << "cons split : left -> right -> tape\n";
    for (const std::string& q : spec.states)
        s << "cons st_" << q << " : tape -> tape -> tape -> config\n";
    s << "cons 0 : nat\ncons s : nat -> nat\n";
    s << "cons n0 : nnat\ncons ns : nnat -> nnat\n";
    s << "cons empty : set\ncons setcons : word -> set -> set\n\n";
    s << "fn step : (word -> word) -> config -> config\n";
    s << "fn clean : word -> word\n";
    s << "fn len : word -> nat\n";
    s << "fn max : nat -> nat -> nat\n";
    s << "fn limit : word -> nat -> word\n";
    s << "fn retif : word -> nat -> word -> word\n";
    s << "fn tryapply : (word -> word) -> word -> nat -> nat\n";
    s << "fn tryall : (word -> word) -> set -> nat -> nat\n";
    s << "fn add : nat -> nat -> nat\n";
    s << "fn mult : nat -> nat -> nat\n";
    s << "fn execute : (word -> word) -> nat -> nnat -> nat -> set -> config -> word\n";
    s << "fn executeAux : (word -> word) -> nat -> nnat -> nat -> set -> config -> word\n";
    s << "fn extract : tape -> word\n";
    s << "fn minus : nat -> nnat -> nat\n";
    s << "fn mainAux : (word -> word) -> nat -> config -> word\n";
    s << "fn main : (word -> word) -> word -> word\n\n";

    s << "# one machine transition per head observation\n";
    for (const OtmTransition& tr : spec.transitions)
        for (const TapeRuleVariant& v : tape_rule_variants(tr))
            s << "rule step F (st_" << tr.from << config_args(tr.tape, v.pattern) << ") -> st_"
              << tr.to << config_args(tr.tape, v.result) << "\n";
    s << "rule step F (st_" << spec.query << " t1 (split x (R y)) t3) -> st_" << spec.answer
      << " t1 (split (L nil) (R nil)) (split (L nil) (R (F (clean y))))\n\n";

    s << "rule clean (cons o x) -> cons o (clean x)\n";
    s << "rule clean (cons i x) -> cons i (clean x)\n";
    s << "rule clean (cons b x) -> nil\n";
    s << "rule clean nil -> nil\n\n";

    s << "rule len nil -> 0\n";
    s << "rule len (cons x y) -> s (len y)\n";
    s << "rule max 0 m -> m\n";
    s << "rule max (s n) 0 -> s n\n";
    s << "rule max (s n) (s m) -> s (max n m)\n";
    s << "rule limit nil n -> nil\n";
    s << "rule limit (cons x y) 0 -> nil\n";
    s << "rule limit (cons x y) (s n) -> cons x (limit y n)\n";
    s << "rule retif nil n z -> z\n";
    s << "rule retif (cons x y) 0 z -> nil\n";
    s << "rule retif (cons x y) (s n) z -> retif y n z\n";
    s << "rule tryapply F a n -> len (retif a n (F (limit a n)))\n";
    s << "rule tryall F empty n -> 0\n";
    s << "rule tryall F (setcons a w) n -> max (tryapply F a n) (tryall F w n)\n";
    s << "rule add 0 m -> m\n";
    s << "rule add (s n) m -> s (add n m)\n";
    s << "rule mult 0 m -> 0\n";
    s << "rule mult (s n) m -> add m (mult n m)\n\n";

    s << "# the budgeted execution loop\n";
    s << "rule main F w -> mainAux F (len w) (st_" << spec.start
      << " (split (L nil) (R w)) (split (L nil) (R nil)) (split (L nil) (R nil)))\n";
    s << "rule mainAux F z c -> execute F (" << theta_text(pm1, "F", "z", "empty")
      << ") n0 z empty c\n";
    for (const std::string& q : spec.states) {
        if (q == spec.final)
            s << "rule execute F n m z a (st_" << q << " t1 t2 t3) -> extract t1\n";
        else if (q == spec.query)
            s << "rule execute F (s n) m z a (st_" << q << " t1 t2 t3) -> executeAux F n (ns m)"
              << " z (setcons (extract t2) a) (st_" << q << " t1 t2 t3)\n";
        else
            s << "rule execute F (s n) m z a (st_" << q << " t1 t2 t3) -> execute F n (ns m)"
              << " z a (step F (st_" << q << " t1 t2 t3))\n";
    }
    s << "rule executeAux F n m z a c -> execute F (minus (" << theta_text(pm1, "F", "z", "a")
      << ") m) m z a (step F c)\n";
    s << "rule extract (split (L x) (R y)) -> clean y\n";
    s << "rule minus x n0 -> x\n";
    s << "rule minus 0 (ns y) -> 0\n";
    s << "rule minus (s x) (ns y) -> minus x y\n";

    // ---- the interpretation ------------------------------------------
    const std::string pmSzZ = "(" + render_bound(pm, "F", "z") + ")";
    const std::string pmSzN = "(" + render_bound(pm, "F", "n") + ")";
    const std::string pmCzZ = "(" + render_bound(pm, "Fs", "z") + ")";
    const std::string pmCzN = "(" + render_bound(pm, "Fs", "n") + ")";
    ThetaCostBound ab = theta_cost_bound(pm1, "Fc", "Fs", "z");
    const std::string aZ = "(" + sopoly_to_string(simplify_sopoly(ab.perMember)) + ")";
    const std::string bZ = "(" + sopoly_to_string(simplify_sopoly(ab.base)) + ")";
    ThetaCostBound abN = theta_cost_bound(pm1, "Fc", "Fs", "n");
    const std::string aN = "(" + sopoly_to_string(simplify_sopoly(abN.perMember)) + ")";
    const std::string bN = "(" + sopoly_to_string(simplify_sopoly(abN.base)) + ")";
    const std::string thS = "max(monus(" + pmSzZ + " + 1, m), n)";
    const std::string thC = "max(monus(" + pmCzZ + " + 1, m), n)";

    std::ostringstream i;
    i << "# sizes measure cell counts (a configuration omits its answer tape);\n";
    i << "# costs bound the innermost rewrite steps a symbol can still trigger\n\n";
    i << "size o = 0\nsize i = 0\nsize b = 0\n";
    i << "size nil = 0\nsize cons = \\x y. x + y + 1\n";
    i << "size L = \\x. x\nsize R = \\x. x\nsize split = \\x y. x + y\n";
    for (const std::string& q : spec.states)
        i << "size st_" << q << " = \\x y z. x + y\n";
    i << "size 0 = 0\nsize s = \\x. x + 1\n";
    i << "size n0 = 0\nsize ns = \\x. x + 1\n";
    i << "size empty = 0\nsize setcons = \\x y. y + 1\n\n";
    i << "size step = \\F x. x + 1\n";
    i << "cost step = \\Fc Fs x. Fc(x) + x + 2\n";
    i << "size clean = \\x. x\n";
    i << "cost clean = \\x. x + 1\n";
    i << "size len = \\x. x\n";
    i << "cost len = \\x. x + 1\n";
    i << "size max = \\n m. max(n, m)\n";
    i << "cost max = \\n m. n + 1\n";
    i << "size limit = \\x n. n\n";
    i << "cost limit = \\x n. n + 1\n";
    i << "size retif = \\x n z. z\n";
    i << "cost retif = \\x n z. n + 1\n";
    i << "size tryapply = \\F a n. F(n)\n";
    i << "cost tryapply = \\Fc Fs a n. Fc(n) + Fs(n) + 2*n + 4\n";
    i << "size tryall = \\F a n. F(n)\n";
    i << "cost tryall = \\Fc Fs a n. a*(Fc(n) + 2*Fs(n) + 2*n + 6) + 1\n";
    i << "size add = \\n m. n + m\n";
    i << "cost add = \\n m. n + 1\n";
    i << "size mult = \\n m. n*m\n";
    i << "cost mult = \\n m. n*m + 2*n + 1\n";
    i << "size execute = \\F n m z a c. c + " << thS << "\n";
    i << "cost execute = \\Fc Fs n m z a c. " << thC << "*(6 + 2*(" << thC << " + c) + Fc(" << thC
      << " + c) + (" << thC << " + a)*" << aZ << " + " << bZ << " + " << pmCzZ << ") + " << thC
      << " + c + 3\n";
    i << "size executeAux = \\F n m z a c. c + 1 + " << thS << "\n";
    i << "cost executeAux = \\Fc Fs n m z a c. (" << thC << " + 1)*(5 + 2*(" << thC
      << " + c + 1) + Fc(" << thC << " + c + 1) + (" << thC << " + a)*" << aZ << " + " << bZ
      << " + " << pmCzZ << ") + 2\n";
    i << "size extract = \\x. x\n";
    i << "cost extract = \\x. x + 2\n";
    i << "size minus = \\x y. monus(x, y)\n";
    i << "cost minus = \\x y. x + 1\n";
    i << "size mainAux = \\F z c. c + " << pmSzZ << " + 1\n";
    i << "cost mainAux = \\Fc Fs z c. (" << pmCzZ << " + 1)*(8 + 3*" << pmCzZ << " + 2*c + Fc("
      << pmCzZ << " + 1 + c) + (" << pmCzZ << " + 1)*" << aZ << " + " << bZ << ") + " << pmCzZ
      << " + c + 5 + " << bZ << "\n";
    i << "size main = \\F n. n + " << pmSzN << " + 1\n";
    i << "cost main = \\Fc Fs n. (" << pmCzN << " + 1)*(8 + 3*" << pmCzN << " + 2*n + Fc("
      << pmCzN << " + n + 1) + (" << pmCzN << " + 1)*" << aN << " + " << bN << ") + " << pmCzN
      << " + 2*n + 7 + " << bN << "\n";

    CompiledOtm out;
    out.strsText = s.str();
    out.csiText = i.str();
    out.strs = parse_strs(out.strsText);
    out.interp = parse_interp(out.csiText, out.strs);
    return out;
}

} // namespace cstuple
