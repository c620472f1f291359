#include "cstuple/strs.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cstuple {

namespace {

void collect_sorts(const TypePtr& t, std::set<std::string>& out) {
    if (t->is_base()) {
        out.insert(t->base_name());
    } else {
        collect_sorts(t->arg(), out);
        collect_sorts(t->result(), out);
    }
}

} // namespace

void Signature::add_sort(const std::string& name, SortDir dir) {
    if (sorts_.count(name)) throw std::invalid_argument("duplicate sort " + name);
    if (symbols_.count(name))
        throw std::invalid_argument("sort " + name + " clashes with a symbol");
    sorts_[name] = dir;
    sort_order_.push_back(name);
}

void Signature::add_symbol(const std::string& name, TypePtr type, SymbolKind kind) {
    if (symbols_.count(name)) throw std::invalid_argument("duplicate symbol " + name);
    if (sorts_.count(name))
        throw std::invalid_argument("symbol " + name + " clashes with a sort");
    if (!type) throw std::invalid_argument("symbol " + name + " without type");
    std::set<std::string> used;
    collect_sorts(type, used);
    for (const std::string& s : used)
        if (!sorts_.count(s))
            throw std::invalid_argument("symbol " + name + " uses undeclared sort " + s);
    if (type->order() > 2)
        throw std::invalid_argument("symbol " + name + " has order " +
                                    std::to_string(type->order()) + " > 2");
    symbols_[name] = SymbolInfo{std::move(type), kind};
    symbol_order_.push_back(name);
}

bool Signature::has_sort(const std::string& name) const { return sorts_.count(name) > 0; }

SortDir Signature::sort_dir(const std::string& name) const {
    auto it = sorts_.find(name);
    if (it == sorts_.end()) throw std::invalid_argument("unknown sort " + name);
    return it->second;
}

bool Signature::has_symbol(const std::string& name) const { return symbols_.count(name) > 0; }

const SymbolInfo& Signature::symbol(const std::string& name) const {
    auto it = symbols_.find(name);
    if (it == symbols_.end()) throw std::invalid_argument("unknown symbol " + name);
    return it->second;
}

TermPtr Signature::make_symbol(const std::string& name) const {
    return Term::sym(name, symbol(name).type);
}

std::vector<std::string> Signature::constructors_of(const std::string& sort) const {
    std::vector<std::string> out;
    for (const std::string& n : symbol_order_) {
        const SymbolInfo& info = symbols_.at(n);
        if (info.kind == SymbolKind::Constructor && info.type->final_result().base_name() == sort)
            out.push_back(n);
    }
    return out;
}

std::string rule_to_string(const Rule& r) {
    return to_string(r.lhs) + " -> " + to_string(r.rhs);
}

namespace {

void check_var_types(const TermPtr& t, std::map<std::string, TypePtr>& seen) {
    switch (t->kind()) {
    case TermKind::Var: {
        auto [it, inserted] = seen.emplace(t->name(), t->type());
        if (!inserted && !type_equal(it->second, t->type()))
            throw std::invalid_argument("variable " + t->name() + " used at types " +
                                        it->second->to_string() + " and " +
                                        t->type()->to_string());
        return;
    }
    case TermKind::Sym: return;
    case TermKind::App:
        check_var_types(t->fn(), seen);
        check_var_types(t->arg(), seen);
        return;
    }
}

void check_symbols_declared(const TermPtr& t, const Signature& sig) {
    switch (t->kind()) {
    case TermKind::Var: return;
    case TermKind::Sym: {
        if (!sig.has_symbol(t->name()))
            throw std::invalid_argument("undeclared symbol " + t->name());
        if (!type_equal(sig.symbol(t->name()).type, t->type()))
            throw std::invalid_argument("symbol " + t->name() + " used at type " +
                                        t->type()->to_string() + ", declared " +
                                        sig.symbol(t->name()).type->to_string());
        return;
    }
    case TermKind::App:
        check_symbols_declared(t->fn(), sig);
        check_symbols_declared(t->arg(), sig);
        return;
    }
}

} // namespace

void Strs::add_rule(TermPtr lhs, TermPtr rhs) {
    if (!lhs || !rhs) throw std::invalid_argument("null rule side");
    if (!lhs->type()->is_base())
        throw std::invalid_argument("rule lhs has non-base type " + lhs->type()->to_string());
    if (!type_equal(lhs->type(), rhs->type()))
        throw std::invalid_argument("rule sides have different types: " +
                                    lhs->type()->to_string() + " vs " +
                                    rhs->type()->to_string());
    const TermPtr& head = spine_head(lhs);
    if (head->kind() != TermKind::Sym)
        throw std::invalid_argument("rule lhs not headed by a symbol: " + to_string(lhs));
    if (sig.symbol(head->name()).kind != SymbolKind::Defined)
        throw std::invalid_argument("rule lhs headed by non-defined symbol " + head->name());
    check_symbols_declared(lhs, sig);
    check_symbols_declared(rhs, sig);
    std::map<std::string, TypePtr> vars;
    check_var_types(lhs, vars);
    std::map<std::string, TypePtr> all = vars;
    check_var_types(rhs, all);
    for (const auto& [n, ty] : free_vars(rhs))
        if (!vars.count(n))
            throw std::invalid_argument("variable " + n + " not bound by lhs");
    rules.push_back(Rule{std::move(lhs), std::move(rhs)});
}

namespace {

// suffix every variable with primes until it can no longer collide with a
// variable of the other term
TermPtr prime_vars(const TermPtr& t, const std::set<std::string>& avoid) {
    switch (t->kind()) {
    case TermKind::Var: {
        std::string n = t->name();
        do n += '\''; while (avoid.count(n));
        return Term::var(n, t->type());
    }
    case TermKind::Sym: return t;
    case TermKind::App:
        return Term::app(prime_vars(t->fn(), avoid), prime_vars(t->arg(), avoid));
    }
    return t;
}

std::string subst_to_string(const Subst& s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [k, v] : s) {
        if (!first) os << ", ";
        first = false;
        os << k << " -> " << to_string(v);
    }
    os << '}';
    return os.str();
}

std::optional<std::string> repeated_var(const TermPtr& t) {
    std::set<std::string> seen;
    // pre-order walk; report the first name seen twice
    std::vector<TermPtr> work{t};
    while (!work.empty()) {
        TermPtr cur = work.back();
        work.pop_back();
        switch (cur->kind()) {
        case TermKind::Var:
            if (!seen.insert(cur->name()).second) return cur->name();
            break;
        case TermKind::Sym: break;
        case TermKind::App:
            work.push_back(cur->arg());
            work.push_back(cur->fn());
            break;
        }
    }
    return std::nullopt;
}

} // namespace

OrthogonalityReport check_orthogonality(const Strs& strs) {
    OrthogonalityReport rep;
    rep.orthogonal = true;
    for (size_t i = 0; i < strs.rules.size(); ++i) {
        if (auto v = repeated_var(strs.rules[i].lhs)) {
            rep.orthogonal = false;
            rep.violations.push_back({OrthogonalityViolation::Kind::NonLeftLinear, i, i, *v});
        }
    }
    for (size_t i = 0; i < strs.rules.size(); ++i) {
        std::set<std::string> mine;
        for (const auto& [n, ty] : free_vars(strs.rules[i].lhs)) mine.insert(n);
        for (size_t j = i + 1; j < strs.rules.size(); ++j) {
            TermPtr other = prime_vars(strs.rules[j].lhs, mine);
            if (auto u = unify(strs.rules[i].lhs, other)) {
                rep.orthogonal = false;
                rep.violations.push_back(
                    {OrthogonalityViolation::Kind::Overlap, i, j, subst_to_string(*u)});
            }
        }
    }
    return rep;
}

std::string OrthogonalityReport::to_string() const {
    if (orthogonal) return "orthogonal";
    std::ostringstream os;
    for (const auto& v : violations) {
        if (v.kind == OrthogonalityViolation::Kind::NonLeftLinear)
            os << "rule " << v.rule1 << " is not left-linear: variable " << v.detail
               << " repeated\n";
        else
            os << "rules " << v.rule1 << " and " << v.rule2 << " overlap: unifier " << v.detail
               << "\n";
    }
    return os.str();
}

bool is_redex(const Strs& strs, const TermPtr& t) {
    for (const Rule& r : strs.rules)
        if (match_term(r.lhs, t)) return true;
    const TermPtr& head = spine_head(t);
    if (head->kind() == TermKind::Sym && strs.sig.has_symbol(head->name()) &&
        strs.sig.symbol(head->name()).kind == SymbolKind::Oracle) {
        std::vector<TermPtr> args = spine_args(t);
        if (t->type()->is_base() && !args.empty()) {
            for (const TermPtr& a : args)
                if (!decode_word(a)) return false;
            return true;
        }
    }
    return false;
}

bool is_normal_form(const Strs& strs, const TermPtr& t) {
    if (is_redex(strs, t)) return false;
    if (t->kind() == TermKind::App)
        return is_normal_form(strs, t->fn()) && is_normal_form(strs, t->arg());
    return true;
}

Word parse_word(const std::string& s) {
    Word w;
    if (s == "_" || s.empty()) return w;
    for (char c : s) {
        if (c == '0')
            w.bits.push_back(0);
        else if (c == '1')
            w.bits.push_back(1);
        else
            throw std::invalid_argument(std::string("bad word character '") + c + "'");
    }
    return w;
}

std::string word_to_string(const Word& w) {
    if (w.bits.empty()) return "_";
    std::string s;
    for (uint8_t b : w.bits) s += b ? '1' : '0';
    return s;
}

namespace {

void require_word_symbols(const Signature& sig) {
    TypePtr bit = SimpleType::base("bit");
    TypePtr word = SimpleType::base("word");
    TypePtr consTy = SimpleType::arrow(bit, SimpleType::arrow(word, word));
    auto need = [&](const std::string& n, const TypePtr& ty) {
        if (!sig.has_symbol(n) || !type_equal(sig.symbol(n).type, ty))
            throw std::invalid_argument("word encoding needs symbol " + n + " : " +
                                        ty->to_string());
    };
    need("o", bit);
    need("i", bit);
    need("nil", word);
    need("cons", consTy);
}

} // namespace

TermPtr encode_word(const Word& w, const Signature& sig) {
    require_word_symbols(sig);
    TermPtr t = sig.make_symbol("nil");
    TermPtr cons = sig.make_symbol("cons");
    TermPtr o = sig.make_symbol("o");
    TermPtr i = sig.make_symbol("i");
    for (auto it = w.bits.rbegin(); it != w.bits.rend(); ++it)
        t = Term::app(Term::app(cons, *it ? i : o), t);
    return t;
}

std::optional<Word> decode_word(const TermPtr& t) {
    Word w;
    TermPtr cur = t;
    while (true) {
        if (cur->kind() == TermKind::Sym && cur->name() == "nil") return w;
        if (cur->kind() != TermKind::App) return std::nullopt;
        const TermPtr& f = cur->fn();
        if (f->kind() != TermKind::App) return std::nullopt;
        const TermPtr& h = f->fn();
        if (h->kind() != TermKind::Sym || h->name() != "cons") return std::nullopt;
        const TermPtr& bit = f->arg();
        if (bit->kind() != TermKind::Sym) return std::nullopt;
        if (bit->name() == "o")
            w.bits.push_back(0);
        else if (bit->name() == "i")
            w.bits.push_back(1);
        else
            return std::nullopt;
        cur = cur->arg();
    }
}

} // namespace cstuple
