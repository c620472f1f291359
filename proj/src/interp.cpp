#include "cstuple/interp.hpp"

#include "cstuple/parser.hpp"
#include "cstuple/term.hpp"
#include "certify.hpp"
#include "expr_parse.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cstuple {

// ---------------------------------------------------------------------------
// binder layouts

std::vector<BinderKind> size_binder_kinds(const TypePtr& symbolType) {
    std::vector<BinderKind> out;
    for (TypePtr cur = symbolType; !cur->is_base(); cur = cur->result())
        out.push_back(cur->arg()->is_base() ? BinderKind::Number : BinderKind::Function);
    return out;
}

std::vector<BinderKind> cost_binder_kinds(const TypePtr& symbolType) {
    std::vector<BinderKind> out;
    for (TypePtr cur = symbolType; !cur->is_base(); cur = cur->result()) {
        if (cur->arg()->is_base()) {
            out.push_back(BinderKind::Number);
        } else {
            out.push_back(BinderKind::Function); // cost of the argument
            out.push_back(BinderKind::Function); // size of the argument
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// parsing and printing

namespace {

CsLambda default_zero_lambda(const TypePtr& symbolType, bool forCost) {
    CsLambda lam;
    int argNo = 0;
    for (TypePtr cur = symbolType; !cur->is_base(); cur = cur->result()) {
        ++argNo;
        if (cur->arg()->is_base()) {
            lam.binders.push_back(Binder{"x" + std::to_string(argNo), BinderKind::Number});
        } else if (forCost) {
            lam.binders.push_back(Binder{"Fc" + std::to_string(argNo), BinderKind::Function});
            lam.binders.push_back(Binder{"Fs" + std::to_string(argNo), BinderKind::Function});
        } else {
            lam.binders.push_back(Binder{"F" + std::to_string(argNo), BinderKind::Function});
        }
    }
    lam.body = CsExpr::constant(0);
    return lam;
}

} // namespace

CsInterp parse_interp(const std::string& text, const Strs& strs) {
    CsInterp out;
    for (const LexedLine& ln : lex_file(text)) {
        TokCursor cur(ln.toks);
        const Token kw = cur.expect_ident();
        bool isSize;
        if (kw.text == "size") {
            isSize = true;
        } else if (kw.text == "cost") {
            isSize = false;
        } else {
            throw ParseError("expected 'size' or 'cost'", kw.line, kw.col);
        }
        const Token st = cur.peek();
        if (st.kind != TokKind::Ident && st.kind != TokKind::Int)
            cur.fail("expected a symbol name");
        cur.next();
        const std::string& sym = st.text;
        if (!strs.sig.has_symbol(sym))
            throw ParseError("unknown symbol " + sym, st.line, st.col);
        const TypePtr& ty = strs.sig.symbol(sym).type;
        for (TypePtr c = ty; !c->is_base(); c = c->result()) {
            const TypePtr& a = c->arg();
            if (!a->is_base() && !a->result()->is_base())
                throw ParseError("order-1 argument of " + sym +
                                     " must take exactly one argument",
                                 st.line, st.col);
        }
        cur.expect_punct("=");
        std::vector<BinderKind> kinds = isSize ? size_binder_kinds(ty) : cost_binder_kinds(ty);
        CsLambda lam = parse_cs_lambda(cur, kinds);
        cur.expect_end();
        auto& table = isSize ? out.sizes : out.costs;
        if (table.count(sym))
            throw ParseError(std::string(isSize ? "size" : "cost") + " of " + sym +
                                 " defined twice",
                             kw.line, kw.col);
        table.emplace(sym, std::move(lam));
    }
    for (const std::string& sym : strs.sig.symbol_names()) {
        const SymbolInfo& info = strs.sig.symbol(sym);
        // oracle symbols take their semantics from the run, not from a file
        if (info.kind == SymbolKind::Oracle) continue;
        bool isCtor = info.kind == SymbolKind::Constructor;
        if (!out.sizes.count(sym)) {
            if (!isCtor)
                throw ParseError("missing size interpretation for " + sym, 0, 0);
            out.sizes.emplace(sym, default_zero_lambda(info.type, false));
        }
        if (!out.costs.count(sym)) {
            if (!isCtor)
                throw ParseError("missing cost interpretation for " + sym, 0, 0);
            out.costs.emplace(sym, default_zero_lambda(info.type, true));
        }
    }
    return out;
}

std::string interp_to_string(const CsInterp& interp, const Strs& strs) {
    std::ostringstream os;
    for (const std::string& sym : strs.sig.symbol_names()) {
        auto si = interp.sizes.find(sym);
        if (si != interp.sizes.end())
            os << "size " << sym << " = " << lambda_to_string(si->second) << "\n";
        auto ci = interp.costs.find(sym);
        if (ci != interp.costs.end())
            os << "cost " << sym << " = " << lambda_to_string(ci->second) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// valuations

std::string Valuation::describe() const {
    std::ostringstream os;
    bool first = true;
    auto sep = [&]() {
        if (!first) os << ", ";
        first = false;
    };
    for (const auto& [name, v] : nums) {
        sep();
        os << name << "=" << v;
    }
    for (const auto& [name, f] : sizeFuns) {
        sep();
        os << name << ".size=" << f.desc;
    }
    for (const auto& [name, f] : costFuns) {
        sep();
        os << name << ".cost=" << f.desc;
    }
    if (first) os << "(empty)";
    return os.str();
}

// ---------------------------------------------------------------------------
// evaluation

uint64_t SizeValue::as_num() const {
    if (!num) throw std::logic_error("size value is a function, expected a number");
    return *num;
}

CsFun SizeValue::as_fun() const {
    if (num) throw std::logic_error("size value is a number, expected a function");
    auto f = fn;
    return [f](uint64_t x) { return f(SizeValue{x, nullptr}).as_num(); };
}

namespace {

struct EvalCtx {
    const CsInterp& interp;
    const Valuation& val;
    const OracleSems* oracles;
};

SizeValue size_num(uint64_t v) { return SizeValue{v, nullptr}; }

SizeValue size_of_lambda(const CsLambda& lam, std::vector<CsValue> collected) {
    if (collected.size() == lam.binders.size())
        return size_num(eval_cs(lam.body, collected));
    BinderKind k = lam.binders[collected.size()].kind;
    return SizeValue{std::nullopt,
                     [lam, collected = std::move(collected), k](const SizeValue& a) {
                         std::vector<CsValue> env = collected;
                         if (k == BinderKind::Number)
                             env.emplace_back(a.as_num());
                         else
                             env.emplace_back(a.as_fun());
                         return size_of_lambda(lam, std::move(env));
                     }};
}

SizeValue eval_size_impl(const EvalCtx& ctx, const TermPtr& t) {
    switch (t->kind()) {
        case TermKind::Var: {
            if (t->type()->is_base()) {
                auto it = ctx.val.nums.find(t->name());
                if (it == ctx.val.nums.end())
                    throw std::invalid_argument("no size for variable " + t->name());
                return size_num(it->second);
            }
            auto it = ctx.val.sizeFuns.find(t->name());
            if (it == ctx.val.sizeFuns.end())
                throw std::invalid_argument("no size function for variable " + t->name());
            CsFun f = it->second.fn;
            return SizeValue{std::nullopt,
                             [f](const SizeValue& a) { return size_num(f(a.as_num())); }};
        }
        case TermKind::Sym: {
            if (ctx.oracles) {
                auto it = ctx.oracles->find(t->name());
                if (it != ctx.oracles->end()) {
                    CsFun f = it->second.size;
                    return SizeValue{std::nullopt, [f](const SizeValue& a) {
                                         return size_num(f(a.as_num()));
                                     }};
                }
            }
            auto it = ctx.interp.sizes.find(t->name());
            if (it == ctx.interp.sizes.end())
                throw std::invalid_argument("no size interpretation for symbol " + t->name());
            return size_of_lambda(it->second, {});
        }
        case TermKind::App: {
            SizeValue f = eval_size_impl(ctx, t->fn());
            if (!f.fn) throw std::logic_error("applying a base-type size value");
            return f.fn(eval_size_impl(ctx, t->arg()));
        }
    }
    throw std::logic_error("unhandled term kind");
}

// cost denotations are curried: a base argument consumes one size, an
// order-1 argument consumes its (cost, size) function pair
struct CostValue {
    std::optional<uint64_t> num;
    std::function<CostValue(uint64_t)> applyBase;
    std::function<CostValue(const CsFun&, const CsFun&)> applyFun;
};

CostValue cost_num(uint64_t v) { return CostValue{v, nullptr, nullptr}; }

CostValue cost_of_lambda(const CsLambda& lam, std::vector<CsValue> collected) {
    if (collected.size() == lam.binders.size())
        return cost_num(eval_cs(lam.body, collected));
    BinderKind k = lam.binders[collected.size()].kind;
    if (k == BinderKind::Number) {
        return CostValue{std::nullopt,
                         [lam, collected = std::move(collected)](uint64_t s) {
                             std::vector<CsValue> env = collected;
                             env.emplace_back(s);
                             return cost_of_lambda(lam, std::move(env));
                         },
                         nullptr};
    }
    return CostValue{std::nullopt, nullptr,
                     [lam, collected = std::move(collected)](const CsFun& fc, const CsFun& fs) {
                         std::vector<CsValue> env = collected;
                         env.emplace_back(fc);
                         env.emplace_back(fs);
                         return cost_of_lambda(lam, std::move(env));
                     }};
}

CostValue cost_of_term(const EvalCtx& ctx, const TermPtr& t) {
    switch (t->kind()) {
        case TermKind::Var: {
            if (t->type()->is_base())
                throw std::logic_error("cost of base-type variable " + t->name() +
                                       " is not determined by a valuation");
            auto it = ctx.val.costFuns.find(t->name());
            if (it == ctx.val.costFuns.end())
                throw std::invalid_argument("no cost function for variable " + t->name());
            CsFun z = it->second.fn;
            return CostValue{std::nullopt, [z](uint64_t s) { return cost_num(z(s)); }, nullptr};
        }
        case TermKind::Sym: {
            if (ctx.oracles) {
                auto it = ctx.oracles->find(t->name());
                if (it != ctx.oracles->end()) {
                    uint64_t cc = it->second.callCost;
                    return CostValue{std::nullopt, [cc](uint64_t) { return cost_num(cc); },
                                     nullptr};
                }
            }
            auto it = ctx.interp.costs.find(t->name());
            if (it == ctx.interp.costs.end())
                throw std::invalid_argument("no cost interpretation for symbol " + t->name());
            return cost_of_lambda(it->second, {});
        }
        case TermKind::App: {
            CostValue f = cost_of_term(ctx, t->fn());
            const TermPtr& a = t->arg();
            if (a->type()->is_base()) {
                if (!f.applyBase)
                    throw std::logic_error("cost application expected a function argument");
                return f.applyBase(eval_size_impl(ctx, a).as_num());
            }
            if (!f.applyFun)
                throw std::logic_error("cost application expected a base argument");
            CostValue ac = cost_of_term(ctx, a);
            CsFun fc = [ac](uint64_t s) {
                if (!ac.applyBase)
                    throw std::logic_error("order-1 argument cost is not unary");
                CostValue r = ac.applyBase(s);
                if (!r.num) throw std::logic_error("order-1 argument cost did not close");
                return *r.num;
            };
            CsFun fs = eval_size_impl(ctx, a).as_fun();
            return f.applyFun(fc, fs);
        }
    }
    throw std::logic_error("unhandled term kind");
}

} // namespace

SizeValue eval_size(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                    const OracleSems* oracles) {
    EvalCtx ctx{interp, val, oracles};
    return eval_size_impl(ctx, s);
}

uint64_t eval_size_num(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                       const OracleSems* oracles) {
    return eval_size(interp, s, val, oracles).as_num();
}

uint64_t eval_cost(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                   const OracleSems* oracles) {
    EvalCtx ctx{interp, val, oracles};
    CostValue v = cost_of_term(ctx, s);
    if (!v.num) throw std::logic_error("cost of a term of arrow type");
    return *v.num;
}

uint64_t totalcost(const CsInterp& interp, const TermPtr& s, const Valuation& val,
                   const OracleSems* oracles) {
    uint64_t total = 0;
    for (const Position& pos : positions(s)) {
        TermPtr sub = *subterm_at(s, pos);
        if (sub->kind() == TermKind::Var || !sub->type()->is_base()) continue;
        total = sat_add(total, eval_cost(interp, sub, val, oracles));
    }
    return total;
}

uint64_t totalcost_prime(const CsInterp& interp, const Strs& strs, const TermPtr& s,
                         const Valuation& val, const OracleSems* oracles) {
    uint64_t total = 0;
    for (const Position& pos : positions(s)) {
        TermPtr sub = *subterm_at(s, pos);
        if (sub->kind() == TermKind::Var || !sub->type()->is_base()) continue;
        if (is_normal_form(strs, sub)) continue;
        total = sat_add(total, eval_cost(interp, sub, val, oracles));
    }
    return total;
}

// ---------------------------------------------------------------------------
// verdicts

std::string Verdict::to_string() const {
    switch (kind) {
        case Kind::Certified:
            return "Certified";
        case Kind::Tested:
            return "Tested(" + std::to_string(samples) + ")";
        case Kind::Falsified: {
            const Falsification& f = *falsification;
            std::string which = f.which == Falsification::Which::Cost ? "cost" : "size";
            return "Falsified(" + which + "): lhs=" + std::to_string(f.lhsValue) +
                   ", rhs=" + std::to_string(f.rhsValue) + " at " + f.valuation;
        }
        case Kind::Unknown:
            return "Unknown: " + reason;
    }
    return "?";
}

// ---------------------------------------------------------------------------
// reachable sizes

bool ReachableSizes::is_open(const std::string& sort) const {
    auto it = open.find(sort);
    return it == open.end() ? true : it->second;
}

const std::vector<uint64_t>& ReachableSizes::of(const std::string& sort) const {
    static const std::vector<uint64_t> empty;
    auto it = values.find(sort);
    return it == values.end() ? empty : it->second;
}

ReachableSizes reachable_sizes(const CsInterp& interp, const Signature& sig, uint64_t cap,
                               size_t maxValues) {
    ReachableSizes out;
    for (const std::string& sort : sig.sort_names()) {
        out.values[sort];
        out.open[sort] = false;
    }
    struct Ctor {
        std::vector<std::string> argSorts;
        const CsLambda* size;
        std::string resultSort;
    };
    std::vector<Ctor> ctors;
    std::map<std::string, bool> hasCtor;
    for (const std::string& sym : sig.symbol_names()) {
        const SymbolInfo& info = sig.symbol(sym);
        if (info.kind != SymbolKind::Constructor) continue;
        std::string resultSort = info.type->final_result().base_name();
        hasCtor[resultSort] = true;
        bool firstOrderArgs = true;
        std::vector<std::string> argSorts;
        for (TypePtr cur = info.type; !cur->is_base(); cur = cur->result()) {
            if (!cur->arg()->is_base()) {
                firstOrderArgs = false;
                break;
            }
            argSorts.push_back(cur->arg()->base_name());
        }
        auto it = interp.sizes.find(sym);
        if (!firstOrderArgs || it == interp.sizes.end()) {
            out.open[resultSort] = true;
            continue;
        }
        ctors.push_back(Ctor{std::move(argSorts), &it->second, std::move(resultSort)});
    }
    for (const std::string& sort : sig.sort_names())
        if (!hasCtor.count(sort)) out.open[sort] = true;

    auto insert_value = [&](const std::string& sort, uint64_t v) {
        std::vector<uint64_t>& r = out.values[sort];
        if (v > cap || r.size() >= maxValues) return false;
        auto it = std::lower_bound(r.begin(), r.end(), v);
        if (it != r.end() && *it == v) return false;
        r.insert(it, v);
        return true;
    };

    for (int round = 0; round < 8; ++round) {
        bool changed = false;
        for (const Ctor& c : ctors) {
            // odometer over the first few reachable values of each argument
            std::vector<std::vector<uint64_t>> lists;
            bool feasible = true;
            for (const std::string& as : c.argSorts) {
                const std::vector<uint64_t>& r = out.values[as];
                if (r.empty()) {
                    feasible = false;
                    break;
                }
                size_t n = std::min<size_t>(r.size(), 12);
                lists.emplace_back(r.begin(), r.begin() + static_cast<long>(n));
            }
            if (!feasible) continue;
            size_t combos = 1;
            for (const auto& l : lists) combos *= l.size();
            combos = std::min<size_t>(combos, 4096);
            for (size_t idx = 0; idx < combos; ++idx) {
                std::vector<CsValue> env;
                size_t rem = idx;
                env.resize(lists.size(), CsValue{uint64_t{0}});
                for (size_t j = lists.size(); j-- > 0;) {
                    env[j] = lists[j][rem % lists[j].size()];
                    rem /= lists[j].size();
                }
                uint64_t v;
                try {
                    v = eval_cs(c.size->body, env);
                } catch (const std::logic_error&) {
                    out.open[c.resultSort] = true;
                    break;
                }
                if (insert_value(c.resultSort, v)) changed = true;
            }
        }
        if (!changed) break;
    }
    for (const std::string& sort : sig.sort_names())
        if (out.open[sort]) out.values[sort].clear();
    return out;
}

// ---------------------------------------------------------------------------
// sampled compatibility checking

namespace {

uint64_t clamp_into(const std::vector<uint64_t>& r, uint64_t v) {
    auto it = std::upper_bound(r.begin(), r.end(), v);
    if (it == r.begin()) return r.front();
    return *(it - 1);
}

struct FunSample {
    CsFun fn;
    std::string desc;
};

std::string fmt_affine(uint64_t a, uint64_t b) {
    if (a == 0) return std::to_string(b);
    std::string s = a == 1 ? "n" : std::to_string(a) + "*n";
    if (b != 0) s += " + " + std::to_string(b);
    return s;
}

FunSample affine_up(uint64_t a, uint64_t b) {
    return FunSample{[a, b](uint64_t n) { return sat_add(sat_mul(a, n), b); },
                     "\\n. " + fmt_affine(a, b)};
}

FunSample affine_down(uint64_t a, uint64_t c) {
    if (a == 0) return FunSample{[c](uint64_t) { return c; }, "\\n. " + std::to_string(c)};
    std::string inner = a == 1 ? "n" : std::to_string(a) + "*n";
    return FunSample{[a, c](uint64_t n) {
                         uint64_t an = sat_mul(a, n);
                         return c > an ? c - an : 0;
                     },
                     "\\n. monus(" + std::to_string(c) + ", " + inner + ")"};
}

std::vector<FunSample> grid_funs(bool increasing) {
    if (increasing)
        return {affine_up(0, 0), affine_up(1, 0), affine_up(0, 1),
                affine_up(1, 1), affine_up(2, 0), affine_up(0, 2)};
    return {affine_down(0, 0), affine_down(0, 1), affine_down(0, 2),
            affine_down(1, 2), affine_down(1, 4), affine_down(2, 4)};
}

FunSample random_fun(std::mt19937_64& rng, bool increasing) {
    if (increasing) {
        uint64_t a = rng() % 5, b = rng() % 5;
        if (rng() % 2 == 0) return affine_up(a, b);
        uint64_t c = rng() % 9;
        FunSample base = affine_up(a, b);
        return FunSample{[base, c](uint64_t n) { return std::min(base.fn(n), c); },
                         "\\n. min(" + fmt_affine(a, b) + ", " + std::to_string(c) + ")"};
    }
    if (rng() % 2 == 0) return affine_down(0, rng() % 5);
    return affine_down(1 + rng() % 4, rng() % 9);
}

FunSample clamp_sample(FunSample f, const std::vector<uint64_t>* r) {
    if (!r || r->empty()) return f;
    CsFun base = f.fn;
    const std::vector<uint64_t>* pr = r;
    return FunSample{[base, pr](uint64_t n) { return clamp_into(*pr, base(n)); },
                     f.desc + " (clamped)"};
}

// one sampling dimension of a rule valuation
struct Dim {
    enum class K { Num, SizeFun, CostFun } k;
    std::string var;
    // Num
    std::vector<uint64_t> gridVals;
    const std::vector<uint64_t>* domain = nullptr; // closed sorts: pick from here
    // functions
    std::vector<FunSample> gridFuns;
    bool increasing = true;
    const std::vector<uint64_t>* clampR = nullptr;

    size_t grid_size() const { return k == K::Num ? gridVals.size() : gridFuns.size(); }
    void set_grid(Valuation& v, size_t i) const {
        if (k == K::Num)
            v.nums[var] = gridVals[i];
        else if (k == K::SizeFun)
            v.sizeFuns[var] = DescribedFun{gridFuns[i].fn, gridFuns[i].desc};
        else
            v.costFuns[var] = DescribedFun{gridFuns[i].fn, gridFuns[i].desc};
    }
    void set_random(Valuation& v, std::mt19937_64& rng) const {
        if (k == K::Num) {
            uint64_t x = domain && !domain->empty() ? (*domain)[rng() % domain->size()]
                                                    : rng() % 65;
            v.nums[var] = x;
            return;
        }
        FunSample f = clamp_sample(random_fun(rng, increasing), clampR);
        if (k == K::SizeFun)
            v.sizeFuns[var] = DescribedFun{f.fn, f.desc};
        else
            v.costFuns[var] = DescribedFun{f.fn, f.desc};
    }
};

std::vector<Dim> build_dims(const Strs& strs, const ReachableSizes& reach, const TermPtr& lhs) {
    std::vector<Dim> dims;
    for (const auto& [name, ty] : free_vars(lhs)) {
        if (ty->is_base()) {
            Dim d;
            d.k = Dim::K::Num;
            d.var = name;
            const std::string& sort = ty->base_name();
            if (!reach.is_open(sort) && !reach.of(sort).empty()) {
                const std::vector<uint64_t>& r = reach.of(sort);
                size_t n = std::min<size_t>(r.size(), 6);
                d.gridVals.assign(r.begin(), r.begin() + static_cast<long>(n));
                d.domain = &r;
            } else {
                d.gridVals = {0, 1, 2, 3, 4, 5};
            }
            // Probe small nonzero values first: the all-zero corner tends to
            // collapse both sides to the same constant, which makes for an
            // uninformative counterexample report. Zero is still swept, at
            // the end of the cycle.
            auto firstPos = std::find_if(d.gridVals.begin(), d.gridVals.end(),
                                         [](uint64_t v) { return v > 0; });
            if (firstPos != d.gridVals.end())
                std::rotate(d.gridVals.begin(), firstPos, d.gridVals.end());
            dims.push_back(std::move(d));
            continue;
        }
        const std::string& argSort = ty->arg()->base_name();
        const std::string& resSort = ty->result()->base_name();
        SortDir di = strs.sig.sort_dir(argSort);
        SortDir dk = strs.sig.sort_dir(resSort);
        Dim ds;
        ds.k = Dim::K::SizeFun;
        ds.var = name;
        ds.increasing = di == dk;
        if (!reach.is_open(resSort) && !reach.of(resSort).empty()) ds.clampR = &reach.of(resSort);
        for (FunSample f : grid_funs(ds.increasing))
            ds.gridFuns.push_back(clamp_sample(std::move(f), ds.clampR));
        dims.push_back(std::move(ds));
        Dim dc;
        dc.k = Dim::K::CostFun;
        dc.var = name;
        dc.increasing = di == SortDir::Descending;
        dc.gridFuns = grid_funs(dc.increasing);
        dims.push_back(std::move(dc));
    }
    return dims;
}

} // namespace

Verdict check_rule(const CsInterp& interp, const Strs& strs, size_t ruleIndex, CheckMode mode,
                   size_t budget, uint64_t seed) {
    if (mode == CheckMode::Certify) return certify_rule(interp, strs, ruleIndex);

    const Rule& rule = strs.rules.at(ruleIndex);
    ReachableSizes reach = reachable_sizes(interp, strs.sig);
    std::vector<Dim> dims = build_dims(strs, reach, rule.lhs);
    SortDir dir = strs.sig.sort_dir(rule.lhs->type()->base_name());
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (ruleIndex + 1)));

    auto evaluate = [&](const Valuation& v) -> std::optional<Falsification> {
        uint64_t lc = eval_cost(interp, rule.lhs, v);
        uint64_t rtc = totalcost(interp, rule.rhs, v);
        if (lc <= rtc)
            return Falsification{ruleIndex, Falsification::Which::Cost, lc, rtc, v.describe()};
        uint64_t ls = eval_size_num(interp, rule.lhs, v);
        uint64_t rs = eval_size_num(interp, rule.rhs, v);
        bool ok = dir == SortDir::Descending ? ls >= rs : ls <= rs;
        if (!ok)
            return Falsification{ruleIndex, Falsification::Which::Size, ls, rs, v.describe()};
        return std::nullopt;
    };

    size_t gridCount = 1;
    for (const Dim& d : dims) {
        gridCount *= d.grid_size();
        if (gridCount >= budget) {
            gridCount = budget;
            break;
        }
    }
    gridCount = std::min(gridCount, budget);

    size_t tried = 0;
    for (size_t idx = 0; idx < gridCount; ++idx) {
        Valuation v;
        size_t rem = idx;
        for (size_t j = dims.size(); j-- > 0;) {
            size_t n = dims[j].grid_size();
            dims[j].set_grid(v, rem % n);
            rem /= n;
        }
        ++tried;
        if (auto f = evaluate(v)) {
            Verdict out;
            out.kind = Verdict::Kind::Falsified;
            out.samples = tried;
            out.falsification = std::move(f);
            return out;
        }
    }
    for (; tried < budget; ++tried) {
        Valuation v;
        for (const Dim& d : dims) d.set_random(v, rng);
        if (auto f = evaluate(v)) {
            Verdict out;
            out.kind = Verdict::Kind::Falsified;
            out.samples = tried + 1;
            out.falsification = std::move(f);
            return out;
        }
    }
    Verdict out;
    out.kind = Verdict::Kind::Tested;
    out.samples = tried;
    return out;
}

SystemVerdict check_system(const CsInterp& interp, const Strs& strs, CheckMode mode,
                           size_t budget, uint64_t seed) {
    SystemVerdict sv;
    bool anyFalsified = false, anyUnknown = false, allCertified = true;
    for (size_t i = 0; i < strs.rules.size(); ++i) {
        Verdict v = check_rule(interp, strs, i, mode, budget, seed);
        anyFalsified = anyFalsified || v.kind == Verdict::Kind::Falsified;
        anyUnknown = anyUnknown || v.kind == Verdict::Kind::Unknown;
        allCertified = allCertified && v.kind == Verdict::Kind::Certified;
        sv.rules.push_back(std::move(v));
    }
    if (anyFalsified)
        sv.overall = Verdict::Kind::Falsified;
    else if (anyUnknown)
        sv.overall = Verdict::Kind::Unknown;
    else if (allCertified || strs.rules.empty())
        sv.overall = Verdict::Kind::Certified;
    else
        sv.overall = Verdict::Kind::Tested;
    return sv;
}

// ---------------------------------------------------------------------------
// monotonicity diagnostics

namespace {

struct BinderProbe {
    BinderKind kind;
    // Number binders
    const std::vector<uint64_t>* r = nullptr; // closed sort values (null: open)
    SortDir dir = SortDir::Descending;        // bump direction for numbers
    // Function binders
    bool increasing = true;                   // sampling family
    const std::vector<uint64_t>* clampR = nullptr;
    SortDir outDir = SortDir::Descending;     // bump the output this way
    const std::vector<uint64_t>* outR = nullptr;
};

// step v one position up (per dir) inside r, or numerically when r is null;
// nullopt when no strictly-higher value exists
std::optional<uint64_t> bump_number(uint64_t v, SortDir dir, const std::vector<uint64_t>* r) {
    if (r && !r->empty()) {
        if (dir == SortDir::Descending) {
            auto it = std::upper_bound(r->begin(), r->end(), v);
            if (it == r->end()) return std::nullopt;
            return *it;
        }
        auto it = std::lower_bound(r->begin(), r->end(), v);
        if (it == r->begin()) return std::nullopt;
        return *(it - 1);
    }
    if (dir == SortDir::Descending) return sat_add(v, 1);
    if (v == 0) return std::nullopt;
    return v - 1;
}

CsFun bump_fun(const CsFun& g, SortDir outDir, const std::vector<uint64_t>* outR) {
    if (outR && !outR->empty()) {
        const std::vector<uint64_t>* r = outR;
        return [g, outDir, r](uint64_t n) {
            uint64_t v = g(n);
            auto b = bump_number(v, outDir, r);
            return b ? *b : v;
        };
    }
    if (outDir == SortDir::Descending) return [g](uint64_t n) { return sat_add(g(n), 1); };
    return [g](uint64_t n) {
        uint64_t v = g(n);
        return v == 0 ? 0 : v - 1;
    };
}

} // namespace

std::vector<std::string> check_monotonicity(const CsInterp& interp, const Strs& strs,
                                            uint64_t seed, size_t samples) {
    std::vector<std::string> warnings;
    ReachableSizes reach = reachable_sizes(interp, strs.sig);
    const Signature& sig = strs.sig;

    auto domain_of = [&](const std::string& sort) -> const std::vector<uint64_t>* {
        if (reach.is_open(sort) || reach.of(sort).empty()) return nullptr;
        return &reach.of(sort);
    };

    for (const std::string& sym : sig.symbol_names()) {
        const SymbolInfo& info = sig.symbol(sym);
        for (int comp = 0; comp < 2; ++comp) {
            bool isSize = comp == 0;
            const auto& table = isSize ? interp.sizes : interp.costs;
            auto lit = table.find(sym);
            if (lit == table.end()) continue;
            const CsLambda& lam = lit->second;
            std::vector<BinderKind> expected =
                isSize ? size_binder_kinds(info.type) : cost_binder_kinds(info.type);
            if (lam.binders.size() != expected.size()) {
                warnings.push_back(std::string(isSize ? "size" : "cost") + " of " + sym +
                                   " has " + std::to_string(lam.binders.size()) +
                                   " binders, expected " + std::to_string(expected.size()));
                continue;
            }

            std::vector<BinderProbe> probes;
            bool supported = true;
            for (TypePtr cur = info.type; !cur->is_base(); cur = cur->result()) {
                const TypePtr& a = cur->arg();
                if (a->is_base()) {
                    BinderProbe p;
                    p.kind = BinderKind::Number;
                    p.r = domain_of(a->base_name());
                    p.dir = sig.sort_dir(a->base_name());
                    probes.push_back(p);
                    continue;
                }
                if (!a->result()->is_base()) {
                    supported = false;
                    break;
                }
                const std::string& argSort = a->arg()->base_name();
                const std::string& resSort = a->result()->base_name();
                SortDir di = sig.sort_dir(argSort);
                SortDir dk = sig.sort_dir(resSort);
                if (!isSize) {
                    BinderProbe pc; // cost of the argument: values in plain naturals
                    pc.kind = BinderKind::Function;
                    pc.increasing = di == SortDir::Descending;
                    pc.outDir = SortDir::Descending;
                    probes.push_back(pc);
                }
                BinderProbe ps; // size of the argument
                ps.kind = BinderKind::Function;
                ps.increasing = di == dk;
                ps.clampR = domain_of(resSort);
                ps.outDir = dk;
                ps.outR = ps.clampR;
                probes.push_back(ps);
            }
            if (!supported) continue;

            SortDir resultDir =
                isSize ? sig.sort_dir(info.type->final_result().base_name()) : SortDir::Descending;
            std::mt19937_64 rng(seed ^ std::hash<std::string>{}(sym + (isSize ? "#s" : "#c")));
            std::set<size_t> reported;

            for (size_t s = 0; s < samples; ++s) {
                std::vector<CsValue> env;
                std::vector<uint64_t> numVals(probes.size(), 0);
                std::vector<CsFun> funVals(probes.size());
                for (size_t j = 0; j < probes.size(); ++j) {
                    const BinderProbe& p = probes[j];
                    if (p.kind == BinderKind::Number) {
                        uint64_t v = p.r && !p.r->empty() ? (*p.r)[rng() % p.r->size()]
                                                          : rng() % 9;
                        numVals[j] = v;
                        env.emplace_back(v);
                    } else {
                        FunSample f = clamp_sample(random_fun(rng, p.increasing), p.clampR);
                        funVals[j] = f.fn;
                        env.emplace_back(f.fn);
                    }
                }
                uint64_t base = eval_cs(lam.body, env);
                for (size_t j = 0; j < probes.size(); ++j) {
                    if (reported.count(j)) continue;
                    const BinderProbe& p = probes[j];
                    std::vector<CsValue> env2 = env;
                    if (p.kind == BinderKind::Number) {
                        auto b = bump_number(numVals[j], p.dir, p.r);
                        if (!b) continue;
                        env2[j] = *b;
                    } else {
                        env2[j] = bump_fun(funVals[j], p.outDir, p.outR);
                    }
                    uint64_t bumped = eval_cs(lam.body, env2);
                    bool ok = resultDir == SortDir::Descending ? bumped >= base : bumped <= base;
                    if (!ok) {
                        warnings.push_back(
                            std::string(isSize ? "size" : "cost") + " of " + sym +
                            " is not weakly monotone in " + lam.binders[j].name + " (output " +
                            std::to_string(base) + " -> " + std::to_string(bumped) + ", " +
                            (resultDir == SortDir::Descending ? "descending" : "ascending") +
                            " result)");
                        reported.insert(j);
                    }
                }
            }
        }
    }
    return warnings;
}

// ---------------------------------------------------------------------------
// polynomially bounded interpretations over words

std::string PolyBoundedReport::to_string() const {
    if (ok) {
        return "polynomially bounded: mu=" + std::to_string(mu) + ", nu=" + std::to_string(nu) +
               ", P = " + lambda_to_string(mainCost);
    }
    std::string s = "not polynomially bounded:";
    for (const std::string& p : problems) s += "\n  - " + p;
    return s;
}

namespace {

const char* first_noncert_op(const CsExprPtr& e) {
    switch (e->kind()) {
        case CsKind::Const:
        case CsKind::Arg:
            return nullptr;
        case CsKind::Max:
            return "max";
        case CsKind::Monus:
            return "monus";
        case CsKind::Pow:
            return "pow";
        case CsKind::FApp:
            return first_noncert_op(e->a());
        case CsKind::Add:
        case CsKind::Mul: {
            const char* l = first_noncert_op(e->a());
            return l ? l : first_noncert_op(e->b());
        }
    }
    return nullptr;
}

} // namespace

PolyBoundedReport check_poly_bounded(const CsInterp& interp, const Strs& strs,
                                     const std::string& mainSymbol) {
    PolyBoundedReport rep;
    rep.ok = false;
    const Signature& sig = strs.sig;
    auto problem = [&](const std::string& msg) { rep.problems.push_back(msg); };

    auto has_typed = [&](const std::string& name, const char* type) {
        return sig.has_symbol(name) && sig.symbol(name).type->to_string() == type;
    };
    if (!has_typed("o", "bit") || !has_typed("i", "bit") || !has_typed("nil", "word") ||
        !has_typed("cons", "bit -> word -> word")) {
        problem("word constructors o, i : bit, nil : word, cons : bit -> word -> word required");
        return rep;
    }
    if (sig.sort_dir("word") != SortDir::Descending)
        problem("sort word must use the descending order");

    for (const std::string& sym : sig.symbol_names()) {
        const SymbolInfo& info = sig.symbol(sym);
        if (info.kind != SymbolKind::Constructor) continue;
        auto it = interp.costs.find(sym);
        if (it == interp.costs.end()) {
            problem("missing cost interpretation for constructor " + sym);
            continue;
        }
        auto p = normalize_fragment(it->second.body, it->second.binders);
        if (!p || !p->is_zero()) problem("cost of constructor " + sym + " must be 0");
    }

    uint64_t maxBit = 0;
    bool bitsConstant = true;
    for (const std::string& c : sig.constructors_of("bit")) {
        auto it = interp.sizes.find(c);
        std::optional<Poly> p =
            it == interp.sizes.end()
                ? std::nullopt
                : normalize_fragment(it->second.body, it->second.binders);
        if (!p || !p->is_constant()) {
            problem("size of bit constructor " + c + " must be a constant");
            bitsConstant = false;
            continue;
        }
        maxBit = std::max(maxBit, p->constant_term());
    }

    uint64_t nilSize = 0;
    if (auto it = interp.sizes.find("nil"); it != interp.sizes.end()) {
        auto p = normalize_fragment(it->second.body, it->second.binders);
        if (!p || !p->is_constant())
            problem("size of nil must be a constant");
        else
            nilSize = p->constant_term();
    } else {
        problem("missing size interpretation for nil");
    }

    uint64_t consInc = 0;
    if (auto it = interp.sizes.find("cons"); it != interp.sizes.end()) {
        const CsLambda& lam = it->second;
        auto p = normalize_fragment(lam.body, lam.binders);
        bool shapeOk = false;
        if (p && lam.binders.size() == 2) {
            const std::string& x = lam.binders[0].name;
            const std::string& y = lam.binders[1].name;
            uint64_t cx = p->coeff_var(x);
            uint64_t cy = p->coeff_var(y);
            uint64_t c0 = p->constant_term();
            size_t expectedTerms = (c0 > 0 ? 1 : 0) + (cx > 0 ? 1 : 0) + (cy > 0 ? 1 : 0);
            bool xOk = cx == 1 || (cx == 0 && bitsConstant && maxBit == 0);
            shapeOk = cy == 1 && c0 >= 1 && xOk && p->term_count() == expectedTerms;
            consInc = c0;
        }
        if (!shapeOk)
            problem("size of cons must be x + y + c with c >= 1 (the bit contribution may be "
                    "dropped only when every bit constructor has size 0)");
    } else {
        problem("missing size interpretation for cons");
    }

    rep.mu = sat_add(maxBit, consInc);
    rep.nu = nilSize;

    if (!sig.has_symbol(mainSymbol)) {
        problem("main symbol " + mainSymbol + " is not declared");
    } else if (auto it = interp.costs.find(mainSymbol); it != interp.costs.end()) {
        rep.mainCost = it->second;
        if (const char* op = first_noncert_op(it->second.body))
            problem("cost of " + mainSymbol + " uses " + op +
                    ", outside the polynomial fragment");
    } else {
        problem("missing cost interpretation for " + mainSymbol);
    }

    rep.ok = rep.problems.empty();
    return rep;
}

} // namespace cstuple
