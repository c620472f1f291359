#include "cstuple/term.hpp"

#include <sstream>
#include <stdexcept>

namespace cstuple {

TermPtr Term::var(std::string name, TypePtr type) {
    if (!type) throw std::invalid_argument("variable without type");
    return TermPtr(new Term(TermKind::Var, std::move(name), std::move(type)));
}

TermPtr Term::sym(std::string name, TypePtr type) {
    if (!type) throw std::invalid_argument("symbol without type");
    return TermPtr(new Term(TermKind::Sym, std::move(name), std::move(type)));
}

TermPtr Term::app(TermPtr fn, TermPtr arg) {
    if (!fn || !arg) throw std::invalid_argument("application of null term");
    const TypePtr& ft = fn->type();
    if (ft->is_base())
        throw std::invalid_argument("application head has base type " + ft->to_string());
    if (!type_equal(ft->arg(), arg->type()))
        throw std::invalid_argument("ill-typed application: expected argument of type " +
                                    ft->arg()->to_string() + ", got " + arg->type()->to_string());
    TypePtr rt = ft->result();
    return TermPtr(new Term(std::move(fn), std::move(arg), std::move(rt)));
}

TermPtr Term::app(TermPtr fn, const std::vector<TermPtr>& args) {
    TermPtr t = std::move(fn);
    for (const TermPtr& a : args) t = app(t, a);
    return t;
}

const std::string& Term::name() const {
    if (kind_ == TermKind::App) throw std::logic_error("name of application");
    return name_;
}

const TermPtr& Term::fn() const {
    if (kind_ != TermKind::App) throw std::logic_error("fn of non-application");
    return fn_;
}

const TermPtr& Term::arg() const {
    if (kind_ != TermKind::App) throw std::logic_error("arg of non-application");
    return arg_;
}

const TermPtr& spine_head(const TermPtr& t) {
    const TermPtr* cur = &t;
    while ((*cur)->kind() == TermKind::App) cur = &(*cur)->fn();
    return *cur;
}

std::vector<TermPtr> spine_args(const TermPtr& t) {
    std::vector<TermPtr> rev;
    const TermPtr* cur = &t;
    while ((*cur)->kind() == TermKind::App) {
        rev.push_back((*cur)->arg());
        cur = &(*cur)->fn();
    }
    return std::vector<TermPtr>(rev.rbegin(), rev.rend());
}

size_t node_count(const TermPtr& t) {
    if (t->kind() != TermKind::App) return 1;
    return 1 + node_count(t->fn()) + node_count(t->arg());
}

static void collect_positions(const TermPtr& t, Position& here, std::vector<Position>& out) {
    out.push_back(here);
    if (t->kind() == TermKind::App) {
        here.push_back(1);
        collect_positions(t->fn(), here, out);
        here.back() = 2;
        collect_positions(t->arg(), here, out);
        here.pop_back();
    }
}

std::vector<Position> positions(const TermPtr& t) {
    std::vector<Position> out;
    Position here;
    collect_positions(t, here, out);
    return out;
}

std::optional<TermPtr> subterm_at(const TermPtr& t, const Position& p) {
    TermPtr cur = t;
    for (int step : p) {
        if (cur->kind() != TermKind::App) return std::nullopt;
        if (step == 1)
            cur = cur->fn();
        else if (step == 2)
            cur = cur->arg();
        else
            return std::nullopt;
    }
    return cur;
}

static TermPtr replace_rec(const TermPtr& t, const Position& p, size_t i, const TermPtr& r) {
    if (i == p.size()) return r;
    if (t->kind() != TermKind::App) throw std::out_of_range("position not in term");
    if (p[i] == 1) return Term::app(replace_rec(t->fn(), p, i + 1, r), t->arg());
    if (p[i] == 2) return Term::app(t->fn(), replace_rec(t->arg(), p, i + 1, r));
    throw std::out_of_range("bad position step");
}

TermPtr replace_at(const TermPtr& t, const Position& p, const TermPtr& replacement) {
    return replace_rec(t, p, 0, replacement);
}

bool term_equal(const TermPtr& a, const TermPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind() != b->kind()) return false;
    switch (a->kind()) {
    case TermKind::Var:
    case TermKind::Sym:
        return a->name() == b->name() && type_equal(a->type(), b->type());
    case TermKind::App:
        return term_equal(a->fn(), b->fn()) && term_equal(a->arg(), b->arg());
    }
    return false;
}

bool is_ground(const TermPtr& t) {
    switch (t->kind()) {
    case TermKind::Var: return false;
    case TermKind::Sym: return true;
    case TermKind::App: return is_ground(t->fn()) && is_ground(t->arg());
    }
    return false;
}

static void collect_vars(const TermPtr& t, std::vector<std::pair<std::string, TypePtr>>& out) {
    switch (t->kind()) {
    case TermKind::Var: {
        for (const auto& [n, ty] : out)
            if (n == t->name()) return;
        out.emplace_back(t->name(), t->type());
        return;
    }
    case TermKind::Sym: return;
    case TermKind::App:
        collect_vars(t->fn(), out);
        collect_vars(t->arg(), out);
        return;
    }
}

std::vector<std::pair<std::string, TypePtr>> free_vars(const TermPtr& t) {
    std::vector<std::pair<std::string, TypePtr>> out;
    collect_vars(t, out);
    return out;
}

TermPtr apply_subst(const TermPtr& t, const Subst& s) {
    switch (t->kind()) {
    case TermKind::Var: {
        auto it = s.find(t->name());
        if (it == s.end()) return t;
        if (!type_equal(it->second->type(), t->type()))
            throw std::invalid_argument("substitution changes type of " + t->name());
        return it->second;
    }
    case TermKind::Sym: return t;
    case TermKind::App: {
        TermPtr f = apply_subst(t->fn(), s);
        TermPtr a = apply_subst(t->arg(), s);
        if (f.get() == t->fn().get() && a.get() == t->arg().get()) return t;
        return Term::app(f, a);
    }
    }
    return t;
}

static bool match_rec(const TermPtr& pat, const TermPtr& sub, Subst& out) {
    switch (pat->kind()) {
    case TermKind::Var: {
        if (!type_equal(pat->type(), sub->type())) return false;
        auto [it, inserted] = out.emplace(pat->name(), sub);
        if (!inserted) return term_equal(it->second, sub);
        return true;
    }
    case TermKind::Sym:
        return sub->kind() == TermKind::Sym && sub->name() == pat->name();
    case TermKind::App:
        return sub->kind() == TermKind::App && match_rec(pat->fn(), sub->fn(), out) &&
               match_rec(pat->arg(), sub->arg(), out);
    }
    return false;
}

std::optional<Subst> match_term(const TermPtr& pattern, const TermPtr& subject) {
    Subst s;
    if (!match_rec(pattern, subject, s)) return std::nullopt;
    return s;
}

static bool occurs(const std::string& v, const TermPtr& t) {
    switch (t->kind()) {
    case TermKind::Var: return t->name() == v;
    case TermKind::Sym: return false;
    case TermKind::App: return occurs(v, t->fn()) || occurs(v, t->arg());
    }
    return false;
}

static TermPtr walk(const TermPtr& t, const Subst& s) {
    TermPtr cur = t;
    while (cur->kind() == TermKind::Var) {
        auto it = s.find(cur->name());
        if (it == s.end()) break;
        cur = it->second;
    }
    return cur;
}

static bool unify_rec(TermPtr a, TermPtr b, Subst& s) {
    a = walk(a, s);
    b = walk(b, s);
    if (a->kind() == TermKind::Var) {
        if (b->kind() == TermKind::Var && b->name() == a->name()) return true;
        if (!type_equal(a->type(), b->type())) return false;
        TermPtr bs = apply_subst(b, s);
        if (occurs(a->name(), bs)) return false;
        s[a->name()] = bs;
        // keep earlier bindings fully applied so occurs checks stay accurate
        Subst one{{a->name(), bs}};
        for (auto& [k, v] : s)
            if (k != a->name()) v = apply_subst(v, one);
        return true;
    }
    if (b->kind() == TermKind::Var) return unify_rec(b, a, s);
    if (a->kind() != b->kind()) return false;
    if (a->kind() == TermKind::Sym) return a->name() == b->name();
    return unify_rec(a->fn(), b->fn(), s) && unify_rec(a->arg(), b->arg(), s);
}

std::optional<Subst> unify(const TermPtr& a, const TermPtr& b) {
    if (!type_equal(a->type(), b->type())) return std::nullopt;
    Subst s;
    if (!unify_rec(a, b, s)) return std::nullopt;
    return s;
}

std::string position_to_string(const Position& p) {
    if (p.empty()) return "#";
    std::ostringstream os;
    for (size_t i = 0; i < p.size(); ++i) {
        if (i) os << '.';
        os << p[i];
    }
    return os.str();
}

namespace {

bool is_cons_cell(const TermPtr& t, TermPtr& hd, TermPtr& tl) {
    // fully applied binary symbol "cons"
    if (t->kind() != TermKind::App) return false;
    const TermPtr& f = t->fn();
    if (f->kind() != TermKind::App) return false;
    const TermPtr& h = f->fn();
    if (h->kind() != TermKind::Sym || h->name() != "cons") return false;
    hd = f->arg();
    tl = t->arg();
    return true;
}

bool is_nil(const TermPtr& t) {
    return t->kind() == TermKind::Sym && t->name() == "nil";
}

void print(const TermPtr& t, bool needParens, std::ostream& os);

void print_atom(const TermPtr& t, std::ostream& os) {
    // parenthesize anything that is not a leaf or a bracketed form
    if (is_nil(t)) {
        os << "[]";
        return;
    }
    if (t->kind() == TermKind::App) {
        print(t, true, os);
        return;
    }
    os << t->name();
}

void print(const TermPtr& t, bool needParens, std::ostream& os) {
    TermPtr hd, tl;
    if (is_nil(t)) {
        os << "[]";
        return;
    }
    if (is_cons_cell(t, hd, tl)) {
        if (needParens) os << '(';
        print_atom(hd, os);
        os << " :: ";
        // the tail keeps the infix form unparenthesized only when it is
        // itself a cons cell or nil
        TermPtr h2, t2;
        if (is_nil(tl) || is_cons_cell(tl, h2, t2))
            print(tl, false, os);
        else
            print_atom(tl, os);
        if (needParens) os << ')';
        return;
    }
    if (t->kind() != TermKind::App) {
        os << t->name();
        return;
    }
    if (needParens) os << '(';
    TermPtr h2, t2;
    bool fnIsInfix = is_cons_cell(t->fn(), h2, t2);
    print(t->fn(), fnIsInfix, os);
    // application is left-associative, so only the argument needs parens
    os << ' ';
    print_atom(t->arg(), os);
    if (needParens) os << ')';
}

} // namespace

std::string to_string(const TermPtr& t) {
    std::ostringstream os;
    print(t, false, os);
    return os.str();
}

} // namespace cstuple
