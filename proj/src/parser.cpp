#include "cstuple/parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <memory>

namespace cstuple {

namespace {

// ---------- types ----------

TypePtr parse_type_toks(TokCursor& c);

TypePtr parse_type_atom(TokCursor& c) {
    if (c.accept_punct("(")) {
        TypePtr t = parse_type_toks(c);
        c.expect_punct(")");
        return t;
    }
    if (c.peek().kind != TokKind::Ident) c.fail("expected type");
    return SimpleType::base(c.next().text);
}

TypePtr parse_type_toks(TokCursor& c) {
    TypePtr a = parse_type_atom(c);
    if (c.accept_punct("->")) return SimpleType::arrow(a, parse_type_toks(c));
    return a;
}

// ---------- untyped terms ----------

struct UTerm;
using UPtr = std::shared_ptr<UTerm>;

struct UTerm {
    enum class K { Name, Num, App };
    K k;
    std::string text; // Name / Num
    UPtr fn, arg;     // App
    int line = 0, col = 0;
};

UPtr uname(std::string text, const Token& at) {
    auto u = std::make_shared<UTerm>();
    u->k = UTerm::K::Name;
    u->text = std::move(text);
    u->line = at.line;
    u->col = at.col;
    return u;
}

UPtr uapp(UPtr f, UPtr a) {
    auto u = std::make_shared<UTerm>();
    u->k = UTerm::K::App;
    u->line = f->line;
    u->col = f->col;
    u->fn = std::move(f);
    u->arg = std::move(a);
    return u;
}

void need_sugar_symbol(const Signature& sig, const std::string& name, const std::string& sugar,
                       const Token& at) {
    if (!sig.has_symbol(name))
        throw ParseError("'" + sugar + "' needs a declared symbol " + name, at.line, at.col);
}

UPtr parse_uterm(TokCursor& c, const Signature& sig);

bool at_atom_start(const TokCursor& c) {
    return c.peek().kind == TokKind::Ident || c.peek().kind == TokKind::Int ||
           c.is_punct("(") || c.is_punct("[");
}

UPtr parse_uatom(TokCursor& c, const Signature& sig) {
    const Token& t = c.peek();
    if (t.kind == TokKind::Ident) {
        c.next();
        auto u = uname(t.text, t);
        return u;
    }
    if (t.kind == TokKind::Int) {
        c.next();
        auto u = uname(t.text, t);
        u->k = UTerm::K::Num;
        return u;
    }
    if (c.accept_punct("(")) {
        UPtr inner = parse_uterm(c, sig);
        c.expect_punct(")");
        return inner;
    }
    if (c.is_punct("[")) {
        Token open = c.next();
        need_sugar_symbol(sig, "nil", "[]", open);
        std::vector<UPtr> items;
        if (!c.is_punct("]")) {
            need_sugar_symbol(sig, "cons", "[...]", open);
            items.push_back(parse_uterm(c, sig));
            while (c.accept_punct(";")) items.push_back(parse_uterm(c, sig));
        }
        c.expect_punct("]");
        UPtr acc = uname("nil", open);
        for (auto it = items.rbegin(); it != items.rend(); ++it)
            acc = uapp(uapp(uname("cons", open), *it), acc);
        return acc;
    }
    c.fail("expected a term");
}

UPtr parse_uapp(TokCursor& c, const Signature& sig) {
    UPtr t = parse_uatom(c, sig);
    while (at_atom_start(c)) t = uapp(t, parse_uatom(c, sig));
    return t;
}

// :: is right-associative and binds tighter than +B
UPtr parse_ucons(TokCursor& c, const Signature& sig) {
    UPtr a = parse_uapp(c, sig);
    if (c.is_punct("::")) {
        Token op = c.next();
        need_sugar_symbol(sig, "cons", "::", op);
        UPtr b = parse_ucons(c, sig);
        return uapp(uapp(uname("cons", op), a), b);
    }
    return a;
}

UPtr parse_uterm(TokCursor& c, const Signature& sig) {
    UPtr a = parse_ucons(c, sig);
    while (c.is_punct("+B")) {
        Token op = c.next();
        need_sugar_symbol(sig, "addB", "+B", op);
        UPtr b = parse_ucons(c, sig);
        a = uapp(uapp(uname("addB", op), a), b);
    }
    return a;
}

// ---------- inference ----------

enum class UnknownIdent { Infer, GroundError, RhsError };

struct InferCtx {
    const Signature* sig;
    std::map<std::string, TypePtr>* env;
    UnknownIdent unknowns;
};

[[noreturn]] void infer_fail(const UTerm& at, const std::string& msg) {
    throw ParseError(msg, at.line, at.col);
}

TermPtr infer_term(const UPtr& u, const TypePtr& expected, InferCtx& ctx);

// consume the argument list against the head's arrow type
TermPtr apply_args(TermPtr head, const std::vector<UPtr>& args, const UTerm& headLoc,
                   const TypePtr& expected, InferCtx& ctx) {
    TypePtr ty = head->type();
    TermPtr t = std::move(head);
    for (const UPtr& a : args) {
        if (ty->is_base())
            infer_fail(*a, "too many arguments to " + to_string(t));
        TermPtr child = infer_term(a, ty->arg(), ctx);
        t = Term::app(t, child);
        ty = ty->result();
    }
    if (expected && !type_equal(ty, expected))
        infer_fail(headLoc,
                   "term has type " + ty->to_string() + ", expected " + expected->to_string());
    return t;
}

TermPtr infer_term(const UPtr& u, const TypePtr& expected, InferCtx& ctx) {
    // decompose the application spine
    std::vector<UPtr> args;
    UPtr headU = u;
    while (headU->k == UTerm::K::App) {
        args.push_back(headU->arg);
        headU = headU->fn;
    }
    std::reverse(args.begin(), args.end());

    if (headU->k == UTerm::K::Num) {
        if (!ctx.sig->has_symbol(headU->text))
            infer_fail(*headU, "undeclared symbol " + headU->text);
        return apply_args(ctx.sig->make_symbol(headU->text), args, *headU, expected, ctx);
    }

    const std::string& name = headU->text;
    if (ctx.sig->has_symbol(name))
        return apply_args(ctx.sig->make_symbol(name), args, *headU, expected, ctx);
    if (ctx.sig->has_sort(name)) infer_fail(*headU, "sort " + name + " used as a term");

    // a variable
    auto it = ctx.env->find(name);
    if (it != ctx.env->end())
        return apply_args(Term::var(name, it->second), args, *headU, expected, ctx);
    switch (ctx.unknowns) {
    case UnknownIdent::GroundError: infer_fail(*headU, "undeclared identifier " + name);
    case UnknownIdent::RhsError: infer_fail(*headU, "variable " + name + " not bound by lhs");
    case UnknownIdent::Infer: break;
    }
    // infer the variable's type from its arguments and the expected type
    std::vector<TermPtr> argTerms;
    std::vector<TypePtr> argTypes;
    for (const UPtr& a : args) {
        TermPtr at = infer_term(a, nullptr, ctx);
        argTypes.push_back(at->type());
        argTerms.push_back(std::move(at));
    }
    if (!expected)
        infer_fail(*headU, "cannot infer type of variable " + name);
    TypePtr vty = expected;
    for (auto rit = argTypes.rbegin(); rit != argTypes.rend(); ++rit)
        vty = SimpleType::arrow(*rit, vty);
    (*ctx.env)[name] = vty;
    return Term::app(Term::var(name, vty), argTerms);
}

} // namespace

TypePtr parse_type(const std::string& text) {
    std::vector<Token> toks = lex_line(text, 1);
    TokCursor c(toks);
    TypePtr t = parse_type_toks(c);
    c.expect_end();
    return t;
}

Strs parse_strs(const std::string& text) {
    std::vector<LexedLine> lines = lex_file(text);
    Strs strs;

    auto wrap = [](const Token& at, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), at.line, at.col);
        }
    };

    // declarations first, so rules may reference symbols declared later
    for (const LexedLine& L : lines) {
        TokCursor c(L.toks);
        const Token& kw = c.peek();
        if (kw.kind != TokKind::Ident) c.fail("expected a directive (sort/cons/fn/rule)");
        if (kw.text == "sort") {
            c.next();
            const Token& name = c.expect_ident();
            SortDir dir = SortDir::Descending;
            if (!c.at_end()) {
                const Token& d = c.expect_ident();
                if (d.text == "asc")
                    dir = SortDir::Ascending;
                else if (d.text == "desc")
                    dir = SortDir::Descending;
                else
                    throw ParseError("expected 'asc' or 'desc'", d.line, d.col);
            }
            c.expect_end();
            wrap(name, [&] { strs.sig.add_sort(name.text, dir); });
        } else if (kw.text == "cons" || kw.text == "fn") {
            c.next();
            const Token& name = c.peek();
            if (name.kind != TokKind::Ident && name.kind != TokKind::Int)
                c.fail("expected symbol name");
            c.next();
            c.expect_punct(":");
            TypePtr ty = parse_type_toks(c);
            c.expect_end();
            SymbolKind kind =
                kw.text == "cons" ? SymbolKind::Constructor : SymbolKind::Defined;
            wrap(name, [&] { strs.sig.add_symbol(name.text, ty, kind); });
        } else if (kw.text == "rule") {
            continue;
        } else {
            c.fail("unknown directive '" + kw.text + "'");
        }
    }

    for (const LexedLine& L : lines) {
        TokCursor c(L.toks);
        if (!c.is_ident("rule")) continue;
        const Token& kw = c.next();
        UPtr lhsU = parse_uterm(c, strs.sig);
        c.expect_punct("->");
        UPtr rhsU = parse_uterm(c, strs.sig);
        c.expect_end();
        std::map<std::string, TypePtr> env;
        InferCtx lhsCtx{&strs.sig, &env, UnknownIdent::Infer};
        TermPtr lhs = infer_term(lhsU, nullptr, lhsCtx);
        InferCtx rhsCtx{&strs.sig, &env, UnknownIdent::RhsError};
        TermPtr rhs = infer_term(rhsU, lhs->type(), rhsCtx);
        wrap(kw, [&] { strs.add_rule(lhs, rhs); });
    }
    return strs;
}

TermPtr parse_ground_term(const std::string& text, const Signature& sig) {
    std::vector<Token> toks = lex_line(text, 1);
    TokCursor c(toks);
    UPtr u = parse_uterm(c, sig);
    c.expect_end();
    std::map<std::string, TypePtr> env;
    InferCtx ctx{&sig, &env, UnknownIdent::GroundError};
    return infer_term(u, nullptr, ctx);
}

TermPtr parse_term_with_vars(const std::string& text, const Signature& sig,
                             const std::map<std::string, TypePtr>& vars) {
    std::vector<Token> toks = lex_line(text, 1);
    TokCursor c(toks);
    UPtr u = parse_uterm(c, sig);
    c.expect_end();
    std::map<std::string, TypePtr> env = vars;
    InferCtx ctx{&sig, &env, UnknownIdent::GroundError};
    return infer_term(u, nullptr, ctx);
}

} // namespace cstuple
