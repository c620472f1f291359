#include "cstuple/sopoly.hpp"

#include "cstuple/parser.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace cstuple {

// ---------------------------------------------------------------------------
// construction and accessors

SoPolyPtr SoPoly::constant(uint64_t v) {
    return SoPolyPtr(new SoPoly(SoKind::Const, v, "", nullptr, nullptr));
}
SoPolyPtr SoPoly::var(std::string name) {
    return SoPolyPtr(new SoPoly(SoKind::Var, 0, std::move(name), nullptr, nullptr));
}
SoPolyPtr SoPoly::add(SoPolyPtr a, SoPolyPtr b) {
    return SoPolyPtr(new SoPoly(SoKind::Add, 0, "", std::move(a), std::move(b)));
}
SoPolyPtr SoPoly::mul(SoPolyPtr a, SoPolyPtr b) {
    return SoPolyPtr(new SoPoly(SoKind::Mul, 0, "", std::move(a), std::move(b)));
}
SoPolyPtr SoPoly::app(std::string fun, SoPolyPtr argument) {
    return SoPolyPtr(new SoPoly(SoKind::App, 0, std::move(fun), std::move(argument), nullptr));
}

uint64_t SoPoly::value() const {
    if (kind_ != SoKind::Const) throw std::logic_error("value() on a non-constant");
    return value_;
}
const std::string& SoPoly::name() const {
    if (kind_ != SoKind::Var && kind_ != SoKind::App)
        throw std::logic_error("name() on an unnamed node");
    return name_;
}
const SoPolyPtr& SoPoly::a() const {
    if (!a_) throw std::logic_error("a() on a leaf");
    return a_;
}
const SoPolyPtr& SoPoly::b() const {
    if (!b_) throw std::logic_error("b() on a non-binary node");
    return b_;
}

// ---------------------------------------------------------------------------
// printing

namespace {

void flatten(const SoPolyPtr& p, SoKind op, std::vector<SoPolyPtr>& out) {
    if (p->kind() == op) {
        flatten(p->a(), op, out);
        flatten(p->b(), op, out);
    } else {
        out.push_back(p);
    }
}

void print(const SoPolyPtr& p, std::ostringstream& os) {
    switch (p->kind()) {
    case SoKind::Const:
        os << p->value();
        return;
    case SoKind::Var:
        os << p->name();
        return;
    case SoKind::App:
        os << p->name() << "(";
        print(p->a(), os);
        os << ")";
        return;
    case SoKind::Add: {
        std::vector<SoPolyPtr> terms;
        flatten(p, SoKind::Add, terms);
        for (size_t i = 0; i < terms.size(); ++i) {
            if (i) os << " + ";
            print(terms[i], os);
        }
        return;
    }
    case SoKind::Mul: {
        std::vector<SoPolyPtr> factors;
        flatten(p, SoKind::Mul, factors);
        for (size_t i = 0; i < factors.size(); ++i) {
            if (i) os << "*";
            bool paren = factors[i]->kind() == SoKind::Add;
            if (paren) os << "(";
            print(factors[i], os);
            if (paren) os << ")";
        }
        return;
    }
    }
}

} // namespace

std::string sopoly_to_string(const SoPolyPtr& p) {
    std::ostringstream os;
    print(p, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// parsing

namespace {

SoPolyPtr parse_expr(TokCursor& c);

SoPolyPtr parse_atom(TokCursor& c) {
    if (c.accept_punct("(")) {
        SoPolyPtr inner = parse_expr(c);
        c.expect_punct(")");
        return inner;
    }
    if (c.peek().kind == TokKind::Int) return SoPoly::constant(c.next().value);
    if (c.peek().kind == TokKind::Ident) {
        std::string name = c.next().text;
        if (c.accept_punct("(")) {
            SoPolyPtr argument = parse_expr(c);
            c.expect_punct(")");
            return SoPoly::app(std::move(name), std::move(argument));
        }
        return SoPoly::var(std::move(name));
    }
    c.fail("expected a polynomial atom");
}

SoPolyPtr parse_term(TokCursor& c) {
    SoPolyPtr p = parse_atom(c);
    while (c.accept_punct("*")) p = SoPoly::mul(std::move(p), parse_atom(c));
    return p;
}

SoPolyPtr parse_expr(TokCursor& c) {
    SoPolyPtr p = parse_term(c);
    while (c.accept_punct("+")) p = SoPoly::add(std::move(p), parse_term(c));
    return p;
}

} // namespace

SoPolyPtr parse_sopoly(const std::string& text) {
    std::vector<LexedLine> lines = lex_file(text);
    if (lines.empty()) throw ParseError("empty polynomial", 1, 1);
    if (lines.size() > 1)
        throw ParseError("a polynomial must fit on one line", lines[1].lineNo, 1);
    TokCursor c(lines[0].toks);
    SoPolyPtr p = parse_expr(c);
    c.expect_end();
    return p;
}

// ---------------------------------------------------------------------------
// evaluation and variable listings

uint64_t eval_sopoly(const SoPolyPtr& p, const SoEnv& env) {
    switch (p->kind()) {
    case SoKind::Const:
        return p->value();
    case SoKind::Var: {
        auto it = env.nums.find(p->name());
        if (it == env.nums.end())
            throw std::invalid_argument("no value for variable " + p->name());
        return it->second;
    }
    case SoKind::Add:
        return sat_add(eval_sopoly(p->a(), env), eval_sopoly(p->b(), env));
    case SoKind::Mul:
        return sat_mul(eval_sopoly(p->a(), env), eval_sopoly(p->b(), env));
    case SoKind::App: {
        auto it = env.funs.find(p->name());
        if (it == env.funs.end())
            throw std::invalid_argument("no function for " + p->name());
        return it->second(eval_sopoly(p->a(), env));
    }
    }
    throw std::logic_error("unhandled polynomial kind");
}

namespace {

void visit_vars(const SoPolyPtr& p, std::set<std::string>& nums, std::set<std::string>& funs) {
    switch (p->kind()) {
    case SoKind::Const:
        return;
    case SoKind::Var:
        nums.insert(p->name());
        return;
    case SoKind::App:
        funs.insert(p->name());
        visit_vars(p->a(), nums, funs);
        return;
    case SoKind::Add:
    case SoKind::Mul:
        visit_vars(p->a(), nums, funs);
        visit_vars(p->b(), nums, funs);
        return;
    }
}

} // namespace

std::set<std::string> sopoly_num_vars(const SoPolyPtr& p) {
    std::set<std::string> nums, funs;
    visit_vars(p, nums, funs);
    return nums;
}

std::set<std::string> sopoly_fun_vars(const SoPolyPtr& p) {
    std::set<std::string> nums, funs;
    visit_vars(p, nums, funs);
    return funs;
}

// ---------------------------------------------------------------------------
// normalization

namespace {

// a flattened product: coeff * factors, factors sorted and keyed by their
// rendering
struct Product {
    uint64_t coeff = 1;
    std::vector<SoPolyPtr> factors;
    std::vector<std::string> keys;

    void take_factor(SoPolyPtr f) {
        keys.push_back(sopoly_to_string(f));
        factors.push_back(std::move(f));
    }
};

int factor_rank(const SoPolyPtr& p) {
    switch (p->kind()) {
    case SoKind::Var: return 0;
    case SoKind::App: return 1;
    default: return 2; // Add; Const and Mul never remain as factors
    }
}

int summand_rank(const Product& pr) {
    if (pr.factors.empty()) return 0; // constant
    if (pr.coeff == 1 && pr.factors.size() == 1)
        return pr.factors[0]->kind() == SoKind::App ? 1 : 2; // App before Var
    return 3;
}

void sort_factors(Product& pr) {
    std::vector<size_t> order(pr.factors.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t l, size_t r) {
        int rl = factor_rank(pr.factors[l]), rr = factor_rank(pr.factors[r]);
        if (rl != rr) return rl < rr;
        return pr.keys[l] < pr.keys[r];
    });
    Product sorted;
    sorted.coeff = pr.coeff;
    for (size_t i : order) {
        sorted.factors.push_back(std::move(pr.factors[i]));
        sorted.keys.push_back(std::move(pr.keys[i]));
    }
    pr = std::move(sorted);
}

SoPolyPtr rebuild(const Product& pr) {
    if (pr.coeff == 0 || pr.factors.empty()) return SoPoly::constant(pr.coeff);
    SoPolyPtr out;
    if (pr.coeff != 1) out = SoPoly::constant(pr.coeff);
    for (const SoPolyPtr& f : pr.factors) out = out ? SoPoly::mul(std::move(out), f) : f;
    return out;
}

std::vector<Product> normalize_sum(const SoPolyPtr& p);

SoPolyPtr rebuild_sum(std::vector<Product> summands) {
    // fold constants, group identical factor lists, order canonically
    uint64_t constant = 0;
    std::vector<Product> grouped;
    for (Product& pr : summands) {
        if (pr.factors.empty()) {
            constant = sat_add(constant, pr.coeff);
            continue;
        }
        bool merged = false;
        for (Product& g : grouped) {
            if (g.keys == pr.keys) {
                g.coeff = sat_add(g.coeff, pr.coeff);
                merged = true;
                break;
            }
        }
        if (!merged) grouped.push_back(std::move(pr));
    }
    grouped.erase(std::remove_if(grouped.begin(), grouped.end(),
                                 [](const Product& g) { return g.coeff == 0; }),
                  grouped.end());
    std::stable_sort(grouped.begin(), grouped.end(), [](const Product& l, const Product& r) {
        int rl = summand_rank(l), rr = summand_rank(r);
        if (rl != rr) return rl < rr;
        if (l.keys != r.keys) return l.keys < r.keys;
        return l.coeff < r.coeff;
    });

    SoPolyPtr out;
    if (constant != 0 || grouped.empty()) out = SoPoly::constant(constant);
    for (const Product& g : grouped) {
        SoPolyPtr term = rebuild(g);
        out = out ? SoPoly::add(std::move(out), std::move(term)) : std::move(term);
    }
    return out;
}

// normalize a node into a flat list of products
std::vector<Product> normalize_sum(const SoPolyPtr& p) {
    switch (p->kind()) {
    case SoKind::Const: {
        Product pr;
        pr.coeff = p->value();
        return {std::move(pr)};
    }
    case SoKind::Var:
    case SoKind::App: {
        Product pr;
        SoPolyPtr node = p;
        if (p->kind() == SoKind::App) {
            SoPolyPtr argument = rebuild_sum(normalize_sum(p->a()));
            node = SoPoly::app(p->name(), std::move(argument));
        }
        pr.take_factor(std::move(node));
        return {std::move(pr)};
    }
    case SoKind::Add: {
        std::vector<SoPolyPtr> terms;
        flatten(p, SoKind::Add, terms);
        std::vector<Product> out;
        for (const SoPolyPtr& t : terms)
            for (Product& pr : normalize_sum(t)) out.push_back(std::move(pr));
        return out;
    }
    case SoKind::Mul: {
        std::vector<SoPolyPtr> rawFactors;
        flatten(p, SoKind::Mul, rawFactors);
        Product pr;
        for (const SoPolyPtr& f : rawFactors) {
            SoPolyPtr nf = rebuild_sum(normalize_sum(f));
            if (nf->kind() == SoKind::Const) {
                pr.coeff = sat_mul(pr.coeff, nf->value());
                continue;
            }
            if (nf->kind() == SoKind::Mul) {
                // a nested product re-emerged from normalization
                std::vector<SoPolyPtr> inner;
                flatten(nf, SoKind::Mul, inner);
                for (const SoPolyPtr& g : inner) {
                    if (g->kind() == SoKind::Const)
                        pr.coeff = sat_mul(pr.coeff, g->value());
                    else
                        pr.take_factor(g);
                }
                continue;
            }
            pr.take_factor(std::move(nf));
        }
        if (pr.coeff == 0) {
            Product zero;
            zero.coeff = 0;
            return {std::move(zero)};
        }
        // distribute a non-trivial constant over a lone sum factor
        if (pr.factors.size() == 1 && pr.factors[0]->kind() == SoKind::Add && pr.coeff != 1) {
            std::vector<Product> inner = normalize_sum(pr.factors[0]);
            for (Product& q : inner) q.coeff = sat_mul(q.coeff, pr.coeff);
            return inner;
        }
        if (pr.factors.size() == 1 && pr.coeff == 1) {
            // a product that collapsed to a single factor; if that factor is
            // a sum, splice it into the surrounding sum
            if (pr.factors[0]->kind() == SoKind::Add) return normalize_sum(pr.factors[0]);
        }
        sort_factors(pr);
        return {std::move(pr)};
    }
    }
    throw std::logic_error("unhandled polynomial kind");
}

} // namespace

SoPolyPtr simplify_sopoly(const SoPolyPtr& p) { return rebuild_sum(normalize_sum(p)); }

// ---------------------------------------------------------------------------
// substitution and the bound constructions

namespace {

SoPolyPtr replace_var(const SoPolyPtr& p, const std::string& name, const SoPolyPtr& repl) {
    switch (p->kind()) {
    case SoKind::Const:
        return p;
    case SoKind::Var:
        return p->name() == name ? repl : p;
    case SoKind::App:
        return SoPoly::app(p->name(), replace_var(p->a(), name, repl));
    case SoKind::Add:
        return SoPoly::add(replace_var(p->a(), name, repl), replace_var(p->b(), name, repl));
    case SoKind::Mul:
        return SoPoly::mul(replace_var(p->a(), name, repl), replace_var(p->b(), name, repl));
    }
    throw std::logic_error("unhandled polynomial kind");
}

} // namespace

SoPolyPtr subst_sopoly(const SoPolyPtr& p, const SoSubstitution& s) {
    switch (p->kind()) {
    case SoKind::Const:
        return p;
    case SoKind::Var: {
        auto it = s.vars.find(p->name());
        return it == s.vars.end() ? p : it->second;
    }
    case SoKind::App: {
        SoPolyPtr argument = subst_sopoly(p->a(), s);
        auto it = s.funs.find(p->name());
        if (it == s.funs.end()) return SoPoly::app(p->name(), std::move(argument));
        return replace_var(it->second.second, it->second.first, argument);
    }
    case SoKind::Add:
        return SoPoly::add(subst_sopoly(p->a(), s), subst_sopoly(p->b(), s));
    case SoKind::Mul:
        return SoPoly::mul(subst_sopoly(p->a(), s), subst_sopoly(p->b(), s));
    }
    throw std::logic_error("unhandled polynomial kind");
}

namespace {

SoPolyPtr strip_fc(const SoPolyPtr& p, const std::string& fc) {
    switch (p->kind()) {
    case SoKind::Const:
    case SoKind::Var:
        return p;
    case SoKind::App:
        if (p->name() == fc) return SoPoly::constant(1);
        return SoPoly::app(p->name(), strip_fc(p->a(), fc));
    case SoKind::Add:
        return SoPoly::add(strip_fc(p->a(), fc), strip_fc(p->b(), fc));
    case SoKind::Mul:
        return SoPoly::mul(strip_fc(p->a(), fc), strip_fc(p->b(), fc));
    }
    throw std::logic_error("unhandled polynomial kind");
}

void collect_fc_args(const SoPolyPtr& p, const std::string& fc, std::vector<SoPolyPtr>& out) {
    switch (p->kind()) {
    case SoKind::Const:
    case SoKind::Var:
        return;
    case SoKind::App:
        if (p->name() == fc) out.push_back(strip_fc(p->a(), fc));
        collect_fc_args(p->a(), fc, out);
        return;
    case SoKind::Add:
    case SoKind::Mul:
        collect_fc_args(p->a(), fc, out);
        collect_fc_args(p->b(), fc, out);
        return;
    }
}

// a fresh binder for lambda bodies, avoiding the construction's own names
const char* kBinder = "_z";

SoPolyPtr affine_body(const SoPolyPtr& mu, const SoPolyPtr& nu, const std::string& fun) {
    // mu * fun(_z) + nu
    return SoPoly::add(SoPoly::mul(mu, SoPoly::app(fun, SoPoly::var(kBinder))), nu);
}

} // namespace

SoPolyPtr build_Q(const SoPolyPtr& P, const std::string& fc) {
    std::vector<SoPolyPtr> args;
    collect_fc_args(P, fc, args);
    SoPolyPtr sum;
    for (SoPolyPtr& a : args) sum = sum ? SoPoly::add(std::move(sum), std::move(a)) : std::move(a);
    if (!sum) sum = SoPoly::constant(0);
    return simplify_sopoly(sum);
}

SoPolyPtr build_B(const SoPolyPtr& P, const SoPolyPtr& mu, const SoPolyPtr& nu,
                  const std::string& fc, const std::string& fs, const std::string& x,
                  const std::string& g, const std::string& y) {
    SoPolyPtr Q = build_Q(P, fc);
    SoSubstitution s;
    s.vars[x] = SoPoly::add(SoPoly::mul(mu, SoPoly::var(y)), nu);
    s.funs[fs] = {kBinder, affine_body(mu, nu, g)};
    return simplify_sopoly(subst_sopoly(Q, s));
}

SoPolyPtr build_B(const SoPolyPtr& P, uint64_t mu, uint64_t nu) {
    return build_B(P, SoPoly::constant(mu), SoPoly::constant(nu));
}

SoPolyPtr build_D(const SoPolyPtr& P, const SoPolyPtr& mu, const SoPolyPtr& nu,
                  const std::string& fc, const std::string& fs, const std::string& x,
                  const std::string& f, const std::string& n) {
    SoSubstitution s;
    s.vars[x] = SoPoly::add(SoPoly::mul(mu, SoPoly::var(n)), nu);
    s.funs[fc] = {kBinder, SoPoly::constant(1)};
    s.funs[fs] = {kBinder, affine_body(mu, nu, f)};
    return simplify_sopoly(subst_sopoly(P, s));
}

SoPolyPtr build_D(const SoPolyPtr& P, uint64_t mu, uint64_t nu) {
    return build_D(P, SoPoly::constant(mu), SoPoly::constant(nu));
}

// ---------------------------------------------------------------------------
// cost lambdas as polynomials

namespace {

std::optional<SoPolyPtr> from_cs(const CsExprPtr& e) {
    switch (e->kind()) {
    case CsKind::Const:
        return SoPoly::constant(e->value());
    case CsKind::Arg:
        if (e->index() != 2) return std::nullopt;
        return SoPoly::var("x");
    case CsKind::FApp: {
        if (e->index() != 0 && e->index() != 1) return std::nullopt;
        auto inner = from_cs(e->a());
        if (!inner) return std::nullopt;
        return SoPoly::app(e->index() == 0 ? "Fc" : "Fs", std::move(*inner));
    }
    case CsKind::Add:
    case CsKind::Mul: {
        auto l = from_cs(e->a());
        auto r = from_cs(e->b());
        if (!l || !r) return std::nullopt;
        return e->kind() == CsKind::Add ? SoPoly::add(std::move(*l), std::move(*r))
                                        : SoPoly::mul(std::move(*l), std::move(*r));
    }
    case CsKind::Max:
    case CsKind::Monus:
    case CsKind::Pow:
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

std::optional<SoPolyPtr> sopoly_from_cost(const CsLambda& lam) {
    if (lam.binders.size() != 3 || lam.binders[0].kind != BinderKind::Function ||
        lam.binders[1].kind != BinderKind::Function || lam.binders[2].kind != BinderKind::Number)
        return std::nullopt;
    auto p = from_cs(lam.body);
    if (!p) return std::nullopt;
    return simplify_sopoly(*p);
}

// ---------------------------------------------------------------------------
// oracle tables

const Word& OracleTable::lookup(const Word& w) const {
    auto it = entries.find(w);
    if (it != entries.end()) return it->second;
    if (fallback) return *fallback;
    throw std::out_of_range("oracle table has no entry for " + word_to_string(w));
}

bool OracleTable::covers(const Word& w) const {
    return fallback.has_value() || entries.count(w) > 0;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

OracleTable parse_otab(const std::string& text) {
    OracleTable out;
    size_t pos = 0;
    int lineNo = 1;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line = nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        if (size_t hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            size_t arrow = line.find("->");
            if (arrow == std::string::npos)
                throw ParseError("expected '<bits> -> <bits>'", lineNo, 1);
            Word key, val;
            try {
                key = parse_word(trim(line.substr(0, arrow)));
                val = parse_word(trim(line.substr(arrow + 2)));
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), lineNo, 1);
            }
            if (!out.entries.emplace(key, val).second)
                throw ParseError("duplicate oracle entry for " + word_to_string(key), lineNo, 1);
        }
        ++lineNo;
    }
    return out;
}

std::string otab_to_string(const OracleTable& t) {
    std::ostringstream os;
    for (const auto& [k, v] : t.entries)
        os << word_to_string(k) << " -> " << word_to_string(v) << "\n";
    return os.str();
}

uint64_t limitsize(const OracleTable& table, const std::vector<Word>& A, uint64_t n) {
    uint64_t best = 0;
    for (const Word& w : A) {
        const Word& answer = table.lookup(w); // membership enforced for every element
        if (w.bits.size() <= n) best = std::max<uint64_t>(best, answer.bits.size());
    }
    return best;
}

uint64_t table_length(const OracleTable& table, uint64_t n) {
    uint64_t best = 0;
    for (const auto& [k, v] : table.entries)
        if (k.bits.size() <= n) best = std::max<uint64_t>(best, v.bits.size());
    return best;
}

} // namespace cstuple
