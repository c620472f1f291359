#include "certify.hpp"

#include "cstuple/strs.hpp"
#include "cstuple/term.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace cstuple {

// ---------------------------------------------------------------------------
// Poly

Poly Poly::constant(uint64_t v) {
    Poly p;
    if (v != 0) p.c_[{}] = v;
    return p;
}

Poly Poly::var(const std::string& atom) {
    Poly p;
    p.c_[{{atom, 1}}] = 1;
    return p;
}

Poly Poly::plus(const Poly& other) const {
    Poly out = *this;
    for (const auto& [m, co] : other.c_) {
        uint64_t& slot = out.c_[m];
        slot = sat_add(slot, co);
    }
    return out;
}

static Poly::Monomial mul_monomials(const Poly::Monomial& a, const Poly::Monomial& b) {
    Poly::Monomial out;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
            out.push_back(a[i++]);
        } else if (i == a.size() || b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

Poly Poly::times(const Poly& other) const {
    Poly out;
    for (const auto& [ma, ca] : c_) {
        for (const auto& [mb, cb] : other.c_) {
            Monomial m = mul_monomials(ma, mb);
            uint64_t& slot = out.c_[m];
            slot = sat_add(slot, sat_mul(ca, cb));
        }
    }
    return out;
}

bool Poly::is_constant() const {
    return c_.empty() || (c_.size() == 1 && c_.begin()->first.empty());
}

uint64_t Poly::constant_term() const {
    auto it = c_.find({});
    return it == c_.end() ? 0 : it->second;
}

uint64_t Poly::coeff_var(const std::string& atom) const {
    auto it = c_.find(Monomial{{atom, 1}});
    return it == c_.end() ? 0 : it->second;
}

static std::string monomial_to_string(const Poly::Monomial& m, uint64_t co) {
    std::ostringstream os;
    if (m.empty()) {
        os << co;
        return os.str();
    }
    bool first = true;
    if (co != 1) {
        os << co;
        first = false;
    }
    for (const auto& [atom, exp] : m) {
        if (!first) os << "*";
        first = false;
        os << atom;
        if (exp > 1) os << "^" << exp;
    }
    return os.str();
}

std::string Poly::to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, co] : c_) {
        if (!first) os << " + ";
        first = false;
        os << monomial_to_string(m, co);
    }
    return os.str();
}

bool Poly::dominates(const Poly& other, uint64_t constantSlack) const {
    return !first_undominated(other, constantSlack).has_value();
}

std::optional<std::string> Poly::first_undominated(const Poly& other, uint64_t slack) const {
    if (slack > 0 && constant_term() < sat_add(other.constant_term(), slack)) {
        return monomial_to_string({}, other.constant_term());
    }
    for (const auto& [m, co] : other.c_) {
        auto it = c_.find(m);
        uint64_t mine = it == c_.end() ? 0 : it->second;
        if (mine < co) return monomial_to_string(m, co);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// symbolic evaluation

namespace {

struct CertifyAbort {
    std::string reason;
};

using SymFun = std::function<Poly(const Poly&)>;

struct SymValue {
    std::optional<Poly> poly;
    SymFun fun;
};

Poly sym_eval(const CsExprPtr& e, const std::vector<SymValue>& env) {
    switch (e->kind()) {
        case CsKind::Const:
            return Poly::constant(e->value());
        case CsKind::Arg: {
            const SymValue& v = env.at(static_cast<size_t>(e->index()));
            if (!v.poly) throw CertifyAbort{"function binder used as a number"};
            return *v.poly;
        }
        case CsKind::Add:
            return sym_eval(e->a(), env).plus(sym_eval(e->b(), env));
        case CsKind::Mul:
            return sym_eval(e->a(), env).times(sym_eval(e->b(), env));
        case CsKind::Max:
            throw CertifyAbort{"expression uses max, outside the polynomial fragment"};
        case CsKind::Monus:
            throw CertifyAbort{"expression uses monus, outside the polynomial fragment"};
        case CsKind::Pow:
            throw CertifyAbort{"expression uses pow, outside the polynomial fragment"};
        case CsKind::FApp: {
            Poly arg = sym_eval(e->a(), env);
            const SymValue& v = env.at(static_cast<size_t>(e->index()));
            if (!v.fun) throw CertifyAbort{"number binder applied as a function"};
            return v.fun(arg);
        }
    }
    throw std::logic_error("unhandled expression kind");
}

struct SymCtx {
    const CsInterp* interp;
    const Strs* strs;

    const CsLambda& size_of(const std::string& sym) const {
        auto it = interp->sizes.find(sym);
        if (it == interp->sizes.end())
            throw CertifyAbort{"no size interpretation for symbol " + sym};
        return it->second;
    }
    const CsLambda& cost_of(const std::string& sym) const {
        auto it = interp->costs.find(sym);
        if (it == interp->costs.end())
            throw CertifyAbort{"no cost interpretation for symbol " + sym};
        return it->second;
    }
    bool is_oracle(const std::string& sym) const {
        return strs->sig.has_symbol(sym) && strs->sig.symbol(sym).kind == SymbolKind::Oracle;
    }
};

Poly sym_size_poly(const TermPtr& t, const SymCtx& ctx);
SymFun sym_size_fun(const TermPtr& t, const SymCtx& ctx);
Poly sym_cost_poly(const TermPtr& t, const SymCtx& ctx);
SymFun sym_cost_fun(const TermPtr& t, const SymCtx& ctx);

// size of a base-type term as a polynomial over rule-variable atoms
Poly sym_size_poly(const TermPtr& t, const SymCtx& ctx) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() == TermKind::Var) {
        if (args.empty()) return Poly::var(head->name());
        if (args.size() == 1)
            return Poly::var(head->name() + ".size(" + sym_size_poly(args[0], ctx).to_string() + ")");
        throw CertifyAbort{"variable " + head->name() + " applied to more than one argument"};
    }
    if (ctx.is_oracle(head->name()))
        throw CertifyAbort{"oracle symbol " + head->name() + " in a certified term"};
    const CsLambda& lam = ctx.size_of(head->name());
    if (lam.binders.size() != args.size())
        throw CertifyAbort{"partial application of " + head->name() + " at base type"};
    std::vector<SymValue> env;
    for (const TermPtr& a : args) {
        if (a->type()->is_base())
            env.push_back(SymValue{sym_size_poly(a, ctx), nullptr});
        else
            env.push_back(SymValue{std::nullopt, sym_size_fun(a, ctx)});
    }
    return sym_eval(lam.body, env);
}

// size of an order-1 term as a symbolic unary function
SymFun sym_size_fun(const TermPtr& t, const SymCtx& ctx) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() == TermKind::Var) {
        if (!args.empty())
            throw CertifyAbort{"higher-order variable application is not supported symbolically"};
        std::string name = head->name();
        return [name](const Poly& p) { return Poly::var(name + ".size(" + p.to_string() + ")"); };
    }
    if (ctx.is_oracle(head->name()))
        throw CertifyAbort{"oracle symbol " + head->name() + " in a certified term"};
    const CsLambda& lam = ctx.size_of(head->name());
    if (lam.binders.size() != args.size() + 1)
        throw CertifyAbort{"partial application of " + head->name() +
                           " missing more than one argument"};
    auto env = std::make_shared<std::vector<SymValue>>();
    for (const TermPtr& a : args) {
        if (a->type()->is_base())
            env->push_back(SymValue{sym_size_poly(a, ctx), nullptr});
        else
            env->push_back(SymValue{std::nullopt, sym_size_fun(a, ctx)});
    }
    if (lam.binders.back().kind != BinderKind::Number)
        throw CertifyAbort{"partially applied " + head->name() +
                           " expects a function as its final argument"};
    CsLambda body = lam;
    return [body, env](const Poly& p) {
        std::vector<SymValue> full = *env;
        full.push_back(SymValue{p, nullptr});
        return sym_eval(body.body, full);
    };
}

// cost of a base-type, non-variable term as a polynomial
Poly sym_cost_poly(const TermPtr& t, const SymCtx& ctx) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() == TermKind::Var) {
        if (args.size() == 1)
            return Poly::var(head->name() + ".cost(" + sym_size_poly(args[0], ctx).to_string() + ")");
        if (args.empty())
            throw CertifyAbort{"cost of a bare base-type variable is undefined"};
        throw CertifyAbort{"variable " + head->name() + " applied to more than one argument"};
    }
    if (ctx.is_oracle(head->name()))
        throw CertifyAbort{"oracle symbol " + head->name() + " in a certified term"};
    const CsLambda& lam = ctx.cost_of(head->name());
    std::vector<SymValue> env;
    for (const TermPtr& a : args) {
        if (a->type()->is_base()) {
            env.push_back(SymValue{sym_size_poly(a, ctx), nullptr});
        } else {
            env.push_back(SymValue{std::nullopt, sym_cost_fun(a, ctx)});
            env.push_back(SymValue{std::nullopt, sym_size_fun(a, ctx)});
        }
    }
    if (lam.binders.size() != env.size())
        throw CertifyAbort{"partial application of " + head->name() + " at base type"};
    return sym_eval(lam.body, env);
}

// cost of an order-1 term as a symbolic unary function of its argument's size
SymFun sym_cost_fun(const TermPtr& t, const SymCtx& ctx) {
    TermPtr head = spine_head(t);
    std::vector<TermPtr> args = spine_args(t);
    if (head->kind() == TermKind::Var) {
        if (!args.empty())
            throw CertifyAbort{"higher-order variable application is not supported symbolically"};
        std::string name = head->name();
        return [name](const Poly& p) { return Poly::var(name + ".cost(" + p.to_string() + ")"); };
    }
    if (ctx.is_oracle(head->name()))
        throw CertifyAbort{"oracle symbol " + head->name() + " in a certified term"};
    const CsLambda& lam = ctx.cost_of(head->name());
    auto env = std::make_shared<std::vector<SymValue>>();
    for (const TermPtr& a : args) {
        if (a->type()->is_base()) {
            env->push_back(SymValue{sym_size_poly(a, ctx), nullptr});
        } else {
            env->push_back(SymValue{std::nullopt, sym_cost_fun(a, ctx)});
            env->push_back(SymValue{std::nullopt, sym_size_fun(a, ctx)});
        }
    }
    if (lam.binders.size() != env->size() + 1)
        throw CertifyAbort{"partially applied " + head->name() +
                           " missing more than one argument"};
    if (lam.binders.back().kind != BinderKind::Number)
        throw CertifyAbort{"partially applied " + head->name() +
                           " expects a function as its final argument"};
    CsLambda body = lam;
    return [body, env](const Poly& p) {
        std::vector<SymValue> full = *env;
        full.push_back(SymValue{p, nullptr});
        return sym_eval(body.body, full);
    };
}

// symbolic total cost: sum of costs over non-variable base-type subterm
// occurrences
Poly sym_totalcost(const TermPtr& t, const SymCtx& ctx) {
    Poly total = Poly::constant(0);
    for (const Position& pos : positions(t)) {
        TermPtr sub = *subterm_at(t, pos);
        if (sub->kind() == TermKind::Var || !sub->type()->is_base()) continue;
        total = total.plus(sym_cost_poly(sub, ctx));
    }
    return total;
}

} // namespace

std::optional<Poly> normalize_fragment(const CsExprPtr& body, const std::vector<Binder>& binders) {
    std::vector<SymValue> env;
    for (const Binder& b : binders) {
        if (b.kind == BinderKind::Number) {
            env.push_back(SymValue{Poly::var(b.name), nullptr});
        } else {
            std::string name = b.name;
            env.push_back(SymValue{
                std::nullopt,
                [name](const Poly& p) { return Poly::var(name + "(" + p.to_string() + ")"); }});
        }
    }
    try {
        return sym_eval(body, env);
    } catch (const CertifyAbort&) {
        return std::nullopt;
    }
}

Verdict certify_rule(const CsInterp& interp, const Strs& strs, size_t ruleIndex) {
    SymCtx ctx{&interp, &strs};
    const Rule& rule = strs.rules.at(ruleIndex);
    try {
        Poly lhsCost = sym_cost_poly(rule.lhs, ctx);
        Poly rhsCost = sym_totalcost(rule.rhs, ctx);
        if (auto bad = lhsCost.first_undominated(rhsCost, 1)) {
            Verdict v;
            v.kind = Verdict::Kind::Unknown;
            v.reason = "cost inequality not established at monomial " + *bad + " (lhs " +
                       lhsCost.to_string() + ", rhs total " + rhsCost.to_string() + ")";
            return v;
        }
        Poly lhsSize = sym_size_poly(rule.lhs, ctx);
        Poly rhsSize = sym_size_poly(rule.rhs, ctx);
        SortDir dir = strs.sig.sort_dir(rule.lhs->type()->base_name());
        const Poly& hi = dir == SortDir::Descending ? lhsSize : rhsSize;
        const Poly& lo = dir == SortDir::Descending ? rhsSize : lhsSize;
        if (auto bad = hi.first_undominated(lo, 0)) {
            Verdict v;
            v.kind = Verdict::Kind::Unknown;
            v.reason = "size inequality not established at monomial " + *bad + " (lhs " +
                       lhsSize.to_string() + ", rhs " + rhsSize.to_string() + ")";
            return v;
        }
        Verdict v;
        v.kind = Verdict::Kind::Certified;
        return v;
    } catch (const CertifyAbort& a) {
        Verdict v;
        v.kind = Verdict::Kind::Unknown;
        v.reason = a.reason;
        return v;
    }
}

} // namespace cstuple
