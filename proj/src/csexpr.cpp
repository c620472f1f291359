#include "cstuple/csexpr.hpp"

#include "expr_parse.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace cstuple {

CsExprPtr CsExpr::constant(uint64_t v) {
    return CsExprPtr(new CsExpr(CsKind::Const, v, -1, nullptr, nullptr));
}
CsExprPtr CsExpr::arg(int index) {
    return CsExprPtr(new CsExpr(CsKind::Arg, 0, index, nullptr, nullptr));
}
CsExprPtr CsExpr::add(CsExprPtr a, CsExprPtr b) {
    return CsExprPtr(new CsExpr(CsKind::Add, 0, -1, std::move(a), std::move(b)));
}
CsExprPtr CsExpr::mul(CsExprPtr a, CsExprPtr b) {
    return CsExprPtr(new CsExpr(CsKind::Mul, 0, -1, std::move(a), std::move(b)));
}
CsExprPtr CsExpr::max(CsExprPtr a, CsExprPtr b) {
    return CsExprPtr(new CsExpr(CsKind::Max, 0, -1, std::move(a), std::move(b)));
}
CsExprPtr CsExpr::monus(CsExprPtr a, CsExprPtr b) {
    return CsExprPtr(new CsExpr(CsKind::Monus, 0, -1, std::move(a), std::move(b)));
}
CsExprPtr CsExpr::pow(CsExprPtr a, CsExprPtr b) {
    return CsExprPtr(new CsExpr(CsKind::Pow, 0, -1, std::move(a), std::move(b)));
}
CsExprPtr CsExpr::fapp(int index, CsExprPtr argument) {
    return CsExprPtr(new CsExpr(CsKind::FApp, 0, index, std::move(argument), nullptr));
}

uint64_t CsExpr::value() const {
    if (kind_ != CsKind::Const) throw std::logic_error("value of non-constant");
    return value_;
}
int CsExpr::index() const {
    if (kind_ != CsKind::Arg && kind_ != CsKind::FApp)
        throw std::logic_error("index of non-variable");
    return index_;
}
const CsExprPtr& CsExpr::a() const {
    if (!a_) throw std::logic_error("no first child");
    return a_;
}
const CsExprPtr& CsExpr::b() const {
    if (!b_) throw std::logic_error("no second child");
    return b_;
}

uint64_t sat_add(uint64_t a, uint64_t b) {
    uint64_t r = a + b;
    if (r < a) return std::numeric_limits<uint64_t>::max();
    return r;
}

uint64_t sat_mul(uint64_t a, uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > std::numeric_limits<uint64_t>::max() / b)
        return std::numeric_limits<uint64_t>::max();
    return a * b;
}

uint64_t sat_pow(uint64_t a, uint64_t b) {
    if (b == 0) return 1;
    if (a == 0) return 0;
    if (a == 1) return 1;
    uint64_t r = 1;
    // a >= 2 saturates within 64 steps
    for (uint64_t k = 0; k < b; ++k) {
        r = sat_mul(r, a);
        if (r == std::numeric_limits<uint64_t>::max()) return r;
    }
    return r;
}

uint64_t eval_cs(const CsExprPtr& e, const std::vector<CsValue>& env) {
    switch (e->kind()) {
    case CsKind::Const: return e->value();
    case CsKind::Arg: {
        size_t i = static_cast<size_t>(e->index());
        if (i >= env.size()) throw std::logic_error("binder index out of range");
        if (!std::holds_alternative<uint64_t>(env[i]))
            throw std::logic_error("function binder used as a number");
        return std::get<uint64_t>(env[i]);
    }
    case CsKind::Add: return sat_add(eval_cs(e->a(), env), eval_cs(e->b(), env));
    case CsKind::Mul: return sat_mul(eval_cs(e->a(), env), eval_cs(e->b(), env));
    case CsKind::Max: return std::max(eval_cs(e->a(), env), eval_cs(e->b(), env));
    case CsKind::Monus: {
        uint64_t x = eval_cs(e->a(), env), y = eval_cs(e->b(), env);
        return x > y ? x - y : 0;
    }
    case CsKind::Pow: return sat_pow(eval_cs(e->a(), env), eval_cs(e->b(), env));
    case CsKind::FApp: {
        size_t i = static_cast<size_t>(e->index());
        if (i >= env.size()) throw std::logic_error("binder index out of range");
        if (!std::holds_alternative<CsFun>(env[i]))
            throw std::logic_error("number binder applied as a function");
        return std::get<CsFun>(env[i])(eval_cs(e->a(), env));
    }
    }
    throw std::logic_error("bad expression kind");
}

bool in_certifiable_fragment(const CsExprPtr& e) {
    switch (e->kind()) {
    case CsKind::Const:
    case CsKind::Arg: return true;
    case CsKind::Add:
    case CsKind::Mul:
        return in_certifiable_fragment(e->a()) && in_certifiable_fragment(e->b());
    case CsKind::FApp: return in_certifiable_fragment(e->a());
    case CsKind::Max:
    case CsKind::Monus:
    case CsKind::Pow: return false;
    }
    return false;
}

namespace {

// precedence: 0 = additive context, 1 = multiplicative context
void print_cs(const CsExprPtr& e, const std::vector<Binder>& binders, int prec,
              std::ostream& os) {
    switch (e->kind()) {
    case CsKind::Const: os << e->value(); return;
    case CsKind::Arg: {
        size_t i = static_cast<size_t>(e->index());
        os << (i < binders.size() ? binders[i].name : "?" + std::to_string(e->index()));
        return;
    }
    case CsKind::Add:
        if (prec > 0) os << '(';
        print_cs(e->a(), binders, 0, os);
        os << " + ";
        print_cs(e->b(), binders, 0, os);
        if (prec > 0) os << ')';
        return;
    case CsKind::Mul:
        print_cs(e->a(), binders, 1, os);
        os << '*';
        print_cs(e->b(), binders, 1, os);
        return;
    case CsKind::Max:
    case CsKind::Monus:
    case CsKind::Pow: {
        os << (e->kind() == CsKind::Max ? "max" : e->kind() == CsKind::Monus ? "monus" : "pow");
        os << '(';
        print_cs(e->a(), binders, 0, os);
        os << ", ";
        print_cs(e->b(), binders, 0, os);
        os << ')';
        return;
    }
    case CsKind::FApp: {
        size_t i = static_cast<size_t>(e->index());
        os << (i < binders.size() ? binders[i].name : "?" + std::to_string(e->index()));
        os << '(';
        print_cs(e->a(), binders, 0, os);
        os << ')';
        return;
    }
    }
}

} // namespace

std::string cs_to_string(const CsExprPtr& e, const std::vector<Binder>& binders) {
    std::ostringstream os;
    print_cs(e, binders, 0, os);
    return os.str();
}

std::string lambda_to_string(const CsLambda& l) {
    if (l.binders.empty()) return cs_to_string(l.body, l.binders);
    std::string s = "\\";
    for (const Binder& b : l.binders) s += b.name + " ";
    s += ". " + cs_to_string(l.body, l.binders);
    return s;
}

// ---------- parsing ----------

namespace {

bool reserved_name(const std::string& n) { return n == "max" || n == "monus" || n == "pow"; }

int binder_index(const std::vector<Binder>& binders, const std::string& name) {
    for (size_t i = 0; i < binders.size(); ++i)
        if (binders[i].name == name) return static_cast<int>(i);
    return -1;
}

CsExprPtr parse_sum(TokCursor& c, const std::vector<Binder>& binders);

CsExprPtr parse_atom(TokCursor& c, const std::vector<Binder>& binders) {
    if (c.peek().kind == TokKind::Int) return CsExpr::constant(c.next().value);
    if (c.accept_punct("(")) {
        CsExprPtr e = parse_sum(c, binders);
        c.expect_punct(")");
        return e;
    }
    if (c.peek().kind != TokKind::Ident) c.fail("expected an expression");
    const Token& id = c.next();
    if (reserved_name(id.text)) {
        c.expect_punct("(");
        CsExprPtr x = parse_sum(c, binders);
        c.expect_punct(",");
        CsExprPtr y = parse_sum(c, binders);
        c.expect_punct(")");
        if (id.text == "max") return CsExpr::max(x, y);
        if (id.text == "monus") return CsExpr::monus(x, y);
        return CsExpr::pow(x, y);
    }
    int idx = binder_index(binders, id.text);
    if (idx < 0)
        throw ParseError("unknown variable " + id.text, id.line, id.col);
    if (binders[idx].kind == BinderKind::Function) {
        if (!c.is_punct("("))
            throw ParseError("function binder " + id.text + " needs an argument", id.line,
                             id.col);
        c.next();
        CsExprPtr arg = parse_sum(c, binders);
        c.expect_punct(")");
        return CsExpr::fapp(idx, arg);
    }
    return CsExpr::arg(idx);
}

CsExprPtr parse_product(TokCursor& c, const std::vector<Binder>& binders) {
    CsExprPtr e = parse_atom(c, binders);
    while (c.accept_punct("*")) e = CsExpr::mul(e, parse_atom(c, binders));
    return e;
}

CsExprPtr parse_sum(TokCursor& c, const std::vector<Binder>& binders) {
    CsExprPtr e = parse_product(c, binders);
    while (c.accept_punct("+")) e = CsExpr::add(e, parse_product(c, binders));
    return e;
}

} // namespace

CsExprPtr parse_cs_expr(TokCursor& c, const std::vector<Binder>& binders) {
    return parse_sum(c, binders);
}

CsLambda parse_cs_lambda(TokCursor& c, const std::vector<BinderKind>& expectedKinds) {
    CsLambda l;
    if (c.accept_punct("\\")) {
        while (!c.is_punct(".")) {
            const Token& id = c.expect_ident();
            if (reserved_name(id.text))
                throw ParseError("'" + id.text + "' is reserved", id.line, id.col);
            if (binder_index(l.binders, id.text) >= 0)
                throw ParseError("duplicate binder " + id.text, id.line, id.col);
            // kind assigned below once the count is known
            l.binders.push_back(Binder{id.text, BinderKind::Number});
        }
        c.expect_punct(".");
    }
    if (l.binders.size() != expectedKinds.size()) {
        const Token& at = c.peek();
        throw ParseError("expected " + std::to_string(expectedKinds.size()) + " binders, got " +
                             std::to_string(l.binders.size()),
                         at.line, at.col);
    }
    for (size_t i = 0; i < expectedKinds.size(); ++i) l.binders[i].kind = expectedKinds[i];
    l.body = parse_cs_expr(c, l.binders);
    return l;
}

} // namespace cstuple
