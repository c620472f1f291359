#include "cstuple/rewrite.hpp"

#include "cstuple/term.hpp"

#include <algorithm>
#include <sstream>

namespace cstuple {

namespace {

// post-order, function side first; fills `found` and returns true to cut the
// search at the first (leftmost-innermost) site
bool find_rec(const Strs& strs, const TermPtr& t, Position& here, std::optional<Redex>& found) {
    if (t->kind() == TermKind::App) {
        here.push_back(1);
        if (find_rec(strs, t->fn(), here, found)) return true;
        here.back() = 2;
        if (find_rec(strs, t->arg(), here, found)) return true;
        here.pop_back();
    }
    for (size_t i = 0; i < strs.rules.size(); ++i) {
        if (auto s = match_term(strs.rules[i].lhs, t)) {
            found = Redex{here, i, std::move(*s), "", {}};
            return true;
        }
    }
    const TermPtr& head = spine_head(t);
    if (head->kind() == TermKind::Sym && t->type()->is_base() && strs.sig.has_symbol(head->name()) &&
        strs.sig.symbol(head->name()).kind == SymbolKind::Oracle) {
        std::vector<TermPtr> args = spine_args(t);
        if (!args.empty()) {
            std::vector<Word> decoded;
            for (const TermPtr& a : args) {
                auto w = decode_word(a);
                if (!w) return false;
                decoded.push_back(std::move(*w));
            }
            // a unary query; step rejects wider oracle spines loudly
            found = Redex{here, std::nullopt, {}, head->name(), std::move(decoded.front())};
            return true;
        }
    }
    return false;
}

} // namespace

std::optional<Redex> find_innermost_redex(const Strs& strs, const TermPtr& s) {
    Position here;
    std::optional<Redex> found;
    find_rec(strs, s, here, found);
    return found;
}

std::optional<std::pair<TermPtr, StepRecord>> step(const Strs& strs, const OracleBinding* oracles,
                                                   const TermPtr& s) {
    std::optional<Redex> redex = find_innermost_redex(strs, s);
    if (!redex) return std::nullopt;

    StepRecord rec;
    rec.position = redex->position;
    rec.rule = redex->rule;
    rec.nodesBefore = node_count(s);

    TermPtr contracted;
    if (redex->is_oracle()) {
        TermPtr site = *subterm_at(s, redex->position);
        if (spine_args(site).size() != 1)
            throw std::invalid_argument("oracle symbol " + redex->oracleSymbol +
                                        " must take exactly one argument");
        if (!oracles || oracles->find(redex->oracleSymbol) == oracles->end())
            throw std::invalid_argument("no oracle table bound to symbol " +
                                        redex->oracleSymbol);
        rec.oracleSymbol = redex->oracleSymbol;
        rec.query = redex->query;
        rec.answer = oracles->at(redex->oracleSymbol).lookup(redex->query);
        contracted = encode_word(rec.answer, strs.sig);
    } else {
        contracted = apply_subst(strs.rules[*redex->rule].rhs, redex->subst);
    }

    TermPtr out = replace_at(s, redex->position, contracted);
    rec.nodesAfter = node_count(out);
    return std::make_pair(std::move(out), std::move(rec));
}

RunResult normalize(const Strs& strs, const OracleBinding* oracles, TermPtr s, size_t maxSteps) {
    RunResult run;
    run.stats.maxNodes = node_count(s);
    while (true) {
        if (run.trace.size() >= maxSteps) {
            run.stats.normalForm = !find_innermost_redex(strs, s).has_value();
            break;
        }
        auto next = step(strs, oracles, s);
        if (!next) {
            run.stats.normalForm = true;
            break;
        }
        s = std::move(next->first);
        StepRecord& rec = next->second;
        if (rec.is_oracle()) {
            ++run.stats.oracleCalls;
            run.stats.maxQuery = std::max<uint64_t>(run.stats.maxQuery, rec.query.bits.size());
        }
        run.stats.maxNodes = std::max(run.stats.maxNodes, rec.nodesAfter);
        run.trace.push_back(std::move(rec));
    }
    run.result = std::move(s);
    run.stats.steps = run.trace.size();
    return run;
}

std::string trace_to_string(const std::vector<StepRecord>& trace) {
    std::ostringstream os;
    for (size_t i = 0; i < trace.size(); ++i) {
        const StepRecord& rec = trace[i];
        os << i + 1 << ' ' << position_to_string(rec.position) << ' ';
        if (rec.is_oracle())
            os << "oracle:" << rec.oracleSymbol;
        else
            os << 'r' << *rec.rule;
        os << ' ' << rec.nodesBefore << ' ' << rec.nodesAfter << '\n';
    }
    return os.str();
}

std::string stats_to_string(const RunStats& stats) {
    std::ostringstream os;
    os << "steps=" << stats.steps << '\n'
       << "oracle-calls=" << stats.oracleCalls << '\n'
       << "max-query=" << stats.maxQuery << '\n'
       << "max-nodes=" << stats.maxNodes << '\n'
       << "normal-form=" << (stats.normalForm ? "true" : "false") << '\n';
    return os.str();
}

namespace {

TypePtr word_to_word_type() {
    TypePtr word = SimpleType::base("word");
    return SimpleType::arrow(word, word);
}

} // namespace

ComputeResult compute_type2(const Strs& strs, const std::string& mainSymbol,
                            const OracleTable& oracle, const Word& w, size_t maxSteps,
                            const std::string& oracleSymbol) {
    if (!strs.sig.has_symbol(mainSymbol))
        throw std::invalid_argument("unknown main symbol " + mainSymbol);
    TypePtr want = SimpleType::arrow(word_to_word_type(), word_to_word_type());
    if (!type_equal(strs.sig.symbol(mainSymbol).type, want))
        throw std::invalid_argument("main symbol " + mainSymbol + " must have type " +
                                    want->to_string());

    Strs sys = strs;
    if (sys.sig.has_symbol(oracleSymbol)) {
        const SymbolInfo& info = sys.sig.symbol(oracleSymbol);
        if (info.kind != SymbolKind::Oracle || !type_equal(info.type, word_to_word_type()))
            throw std::invalid_argument("symbol " + oracleSymbol +
                                        " is already declared and is not a word oracle");
    } else {
        sys.sig.add_symbol(oracleSymbol, word_to_word_type(), SymbolKind::Oracle);
    }

    ComputeResult out;
    out.start = Term::app(sys.sig.make_symbol(mainSymbol),
                          {sys.sig.make_symbol(oracleSymbol), encode_word(w, sys.sig)});

    OracleBinding binding{{oracleSymbol, oracle}};
    RunResult run = normalize(sys, &binding, out.start, maxSteps);
    if (!run.stats.normalForm) {
        std::ostringstream os;
        os << "no normal form within " << maxSteps << " steps";
        throw BudgetExhausted(os.str());
    }
    auto decoded = decode_word(run.result);
    if (!decoded)
        throw std::invalid_argument("the normal form is not a word encoding: " +
                                    to_string(run.result));
    out.output = std::move(*decoded);
    out.normal = std::move(run.result);
    out.trace = std::move(run.trace);
    out.stats = run.stats;
    return out;
}

MonitorReport monitor_bounds(const Strs& strs, const CsInterp& interp,
                             const std::string& mainSymbol, const OracleTable& oracle,
                             const Word& w, size_t maxSteps, const std::string& oracleSymbol) {
    PolyBoundedReport bounded = check_poly_bounded(interp, strs, mainSymbol);
    if (!bounded.ok) {
        std::string msg = "interpretation is not polynomially bounded";
        for (const std::string& p : bounded.problems) msg += "; " + p;
        throw std::invalid_argument(msg);
    }
    std::optional<SoPolyPtr> P = sopoly_from_cost(bounded.mainCost);
    if (!P) throw std::logic_error("bound polynomial left the polynomial fragment");

    MonitorReport report;
    report.mu = bounded.mu;
    report.nu = bounded.nu;
    SoPolyPtr D = build_D(*P, bounded.mu, bounded.nu);
    SoPolyPtr B = build_B(*P, bounded.mu, bounded.nu);
    report.Dtext = sopoly_to_string(D);
    report.Btext = sopoly_to_string(B);

    CsFun answerLength = [&oracle](uint64_t z) { return table_length(oracle, z); };
    SoEnv denv;
    denv.nums["n"] = w.bits.size();
    denv.funs["F"] = answerLength;
    report.Dvalue = eval_sopoly(D, denv);
    SoEnv benv;
    benv.nums["y"] = w.bits.size();
    benv.funs["G"] = answerLength;
    report.Bvalue = eval_sopoly(B, benv);

    ComputeResult run = compute_type2(strs, mainSymbol, oracle, w, maxSteps, oracleSymbol);
    report.output = std::move(run.output);
    report.stats = run.stats;
    report.ok = report.stats.steps <= report.Dvalue && report.stats.maxQuery <= report.Bvalue;
    return report;
}

std::string MonitorReport::to_string() const {
    std::ostringstream os;
    os << "output=" << word_to_string(output) << '\n'
       << "steps=" << stats.steps << '\n'
       << "D-bound=" << Dtext << '\n'
       << "D-value=" << Dvalue << '\n'
       << "max-query=" << stats.maxQuery << '\n'
       << "B-bound=" << Btext << '\n'
       << "B-value=" << Bvalue << '\n'
       << "ok=" << (ok ? "true" : "false") << '\n';
    return os.str();
}

} // namespace cstuple
