#include "cstuple/graph.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cstuple {

namespace {

std::string vertex_label_text(const TermGraph::Vertex& v) {
    return v.label ? *v.label : std::string("_");
}

} // namespace

void TermGraph::set_root(VertexId v) {
    if (!has(v)) throw std::logic_error("term graph root must be an existing vertex");
    root_ = v;
}

const TermGraph::Vertex& TermGraph::vertex(VertexId v) const {
    auto it = verts_.find(v);
    if (it == verts_.end())
        throw std::logic_error("term graph has no vertex " + std::to_string(v));
    return it->second;
}

VertexId TermGraph::add_vertex(std::optional<std::string> label, std::vector<VertexId> succ,
                               TypePtr type) {
    bool isApp = label && *label == "@";
    if (isApp ? succ.size() != 2 : !succ.empty())
        throw std::logic_error("term graph vertex has the wrong number of successors");
    for (VertexId s : succ)
        if (!has(s)) throw std::logic_error("term graph successor does not exist");
    if (!type) throw std::logic_error("term graph vertex needs a type");
    VertexId id = next_++;
    verts_.emplace(id, Vertex{std::move(label), std::move(succ), std::move(type)});
    return id;
}

void TermGraph::redirect(VertexId from, VertexId to) {
    if (!has(from) || !has(to))
        throw std::logic_error("term graph redirection needs existing vertices");
    if (from == to) return;
    for (auto& [id, v] : verts_)
        for (VertexId& s : v.succ)
            if (s == from) s = to;
    if (root_ == from) root_ = to;
}

void TermGraph::collect_garbage() {
    std::set<VertexId> live;
    std::vector<VertexId> todo{root_};
    while (!todo.empty()) {
        VertexId v = todo.back();
        todo.pop_back();
        if (!live.insert(v).second) continue;
        for (VertexId s : vertex(v).succ) todo.push_back(s);
    }
    for (auto it = verts_.begin(); it != verts_.end();) {
        if (live.count(it->first))
            ++it;
        else
            it = verts_.erase(it);
    }
}

std::vector<VertexId> TermGraph::ids() const {
    std::vector<VertexId> out;
    out.reserve(verts_.size());
    for (const auto& [id, v] : verts_) out.push_back(id);
    return out;
}

namespace {

// Builds the graph of a term bottom-up (children before parents, function
// side before argument side); every position gets its own fresh vertex.
VertexId graph_of_term(TermGraph& g, const TermPtr& t) {
    switch (t->kind()) {
        case TermKind::Var:
            return g.add_vertex(std::nullopt, {}, t->type());
        case TermKind::Sym:
            return g.add_vertex(t->name(), {}, t->type());
        case TermKind::App: {
            VertexId f = graph_of_term(g, t->fn());
            VertexId a = graph_of_term(g, t->arg());
            return g.add_vertex("@", {f, a}, t->type());
        }
    }
    throw std::logic_error("unreachable term kind");
}

// Builds an instance of a rule's right-hand side: fresh vertices for the
// non-variable positions, the matched images for variable positions.
VertexId build_instance(TermGraph& g, const TermPtr& t,
                        const std::map<std::string, VertexId>& varImage) {
    if (t->kind() == TermKind::Var) {
        auto it = varImage.find(t->name());
        if (it == varImage.end())
            throw std::logic_error("right-hand side uses unbound variable " + t->name());
        return it->second;
    }
    if (t->kind() == TermKind::Sym) return g.add_vertex(t->name(), {}, t->type());
    VertexId f = build_instance(g, t->fn(), varImage);
    VertexId a = build_instance(g, t->arg(), varImage);
    return g.add_vertex("@", {f, a}, t->type());
}

void check_left_linear(const TermPtr& pattern, std::set<std::string>& seen) {
    switch (pattern->kind()) {
        case TermKind::Var:
            if (!seen.insert(pattern->name()).second)
                throw std::invalid_argument(
                    "graph rewriting requires left-linear rules; variable " + pattern->name() +
                    " occurs twice in a left-hand side");
            return;
        case TermKind::Sym:
            return;
        case TermKind::App:
            check_left_linear(pattern->fn(), seen);
            check_left_linear(pattern->arg(), seen);
            return;
    }
}

// Walks the pattern over the subject graph, assigning pattern vertex ids in
// the same order to_graph would (children first, function side before
// argument side).  Fills the homomorphism and the variable images; returns
// false on a mismatch.
bool walk_pattern(const TermGraph& g, const TermPtr& pattern, VertexId gv, VertexId& counter,
                  std::map<VertexId, VertexId>& phi,
                  std::map<std::string, VertexId>& varImage) {
    switch (pattern->kind()) {
        case TermKind::Var: {
            VertexId pid = counter++;
            phi[pid] = gv;
            varImage.emplace(pattern->name(), gv);
            return true;
        }
        case TermKind::Sym: {
            const TermGraph::Vertex& v = g.vertex(gv);
            if (!v.label || *v.label != pattern->name()) return false;
            phi[counter++] = gv;
            return true;
        }
        case TermKind::App: {
            const TermGraph::Vertex& v = g.vertex(gv);
            if (!v.label || *v.label != "@") return false;
            if (!walk_pattern(g, pattern->fn(), v.succ[0], counter, phi, varImage)) return false;
            if (!walk_pattern(g, pattern->arg(), v.succ[1], counter, phi, varImage)) return false;
            phi[counter++] = gv;
            return true;
        }
    }
    return false;
}

std::optional<GraphRedex> match_rule_at(const Strs& strs, const TermGraph& g, std::size_t rule,
                                        VertexId gv) {
    const TermPtr& lhs = strs.rules[rule].lhs;
    std::set<std::string> seen;
    check_left_linear(lhs, seen);
    GraphRedex redex;
    redex.vertex = gv;
    redex.rule = rule;
    VertexId counter = 0;
    if (!walk_pattern(g, lhs, gv, counter, redex.phi, redex.varImage)) return std::nullopt;
    return redex;
}

// The spine of an application vertex: head vertex plus argument vertices in
// application order.
void graph_spine(const TermGraph& g, VertexId v, VertexId& head, std::vector<VertexId>& args) {
    const TermGraph::Vertex* cur = &g.vertex(v);
    VertexId curId = v;
    while (cur->label && *cur->label == "@") {
        args.push_back(cur->succ[1]);
        curId = cur->succ[0];
        cur = &g.vertex(curId);
    }
    head = curId;
    std::reverse(args.begin(), args.end());
}

std::optional<GraphRedex> oracle_redex_at(const Strs& strs, const TermGraph& g, VertexId gv) {
    const TermGraph::Vertex& v = g.vertex(gv);
    if (!v.label || *v.label != "@" || !v.type->is_base()) return std::nullopt;
    VertexId head = 0;
    std::vector<VertexId> args;
    graph_spine(g, gv, head, args);
    const TermGraph::Vertex& h = g.vertex(head);
    if (!h.label || *h.label == "@") return std::nullopt;
    if (!strs.sig.has_symbol(*h.label) ||
        strs.sig.symbol(*h.label).kind != SymbolKind::Oracle)
        return std::nullopt;
    std::vector<Word> decoded;
    for (VertexId a : args) {
        auto w = decode_graph_word(g, a);
        if (!w) return std::nullopt;
        decoded.push_back(*w);
    }
    GraphRedex redex;
    redex.vertex = gv;
    redex.oracleSymbol = *h.label;
    redex.query = decoded.empty() ? Word{} : decoded[0];
    return redex;
}

bool find_redex_rec(const Strs& strs, const TermGraph& g, VertexId v,
                    std::set<VertexId>& visited, std::optional<GraphRedex>& out) {
    if (!visited.insert(v).second) return false;
    for (VertexId s : g.vertex(v).succ)
        if (find_redex_rec(strs, g, s, visited, out)) return true;
    for (std::size_t i = 0; i < strs.rules.size(); ++i) {
        if (auto redex = match_rule_at(strs, g, i, v)) {
            out = std::move(redex);
            return true;
        }
    }
    if (auto redex = oracle_redex_at(strs, g, v)) {
        out = std::move(redex);
        return true;
    }
    return false;
}

} // namespace

TermGraph to_graph(const TermPtr& s) {
    TermGraph g;
    g.set_root(graph_of_term(g, s));
    return g;
}

TermPtr from_graph(const TermGraph& g) {
    std::map<VertexId, TermPtr> memo;
    std::function<TermPtr(VertexId)> go = [&](VertexId v) -> TermPtr {
        auto it = memo.find(v);
        if (it != memo.end()) return it->second;
        const TermGraph::Vertex& vx = g.vertex(v);
        TermPtr t;
        if (!vx.label)
            t = Term::var("v" + std::to_string(v), vx.type);
        else if (*vx.label == "@")
            t = Term::app(go(vx.succ[0]), go(vx.succ[1]));
        else
            t = Term::sym(*vx.label, vx.type);
        memo[v] = t;
        return t;
    };
    return go(g.root());
}

std::optional<GraphRedex> find_graph_redex(const Strs& strs, const TermGraph& g) {
    std::optional<GraphRedex> out;
    std::set<VertexId> visited;
    find_redex_rec(strs, g, g.root(), visited, out);
    return out;
}

void contract(const Strs& strs, TermGraph& g, const GraphRedex& redex,
              const OracleBinding* oracles) {
    if (!g.has(redex.vertex))
        throw std::logic_error("graph redex vertex does not exist");
    VertexId target = 0;
    if (redex.is_oracle()) {
        VertexId head = 0;
        std::vector<VertexId> args;
        graph_spine(g, redex.vertex, head, args);
        if (args.size() != 1)
            throw std::invalid_argument("oracle symbol " + redex.oracleSymbol +
                                        " must take exactly one argument");
        if (!oracles || !oracles->count(redex.oracleSymbol))
            throw std::invalid_argument("no oracle table bound to symbol " +
                                        redex.oracleSymbol);
        Word answer = oracles->at(redex.oracleSymbol).lookup(redex.query);
        target = build_instance(g, encode_word(answer, strs.sig), {});
    } else {
        const Rule& rule = strs.rules[*redex.rule];
        target = build_instance(g, rule.rhs, redex.varImage);
    }
    g.redirect(redex.vertex, target);
    g.collect_garbage();
#ifndef NDEBUG
    validate_graph(g);
#endif
}

GraphRunStats normalize_graph(const Strs& strs, const OracleBinding* oracles, TermGraph& g,
                              std::size_t maxSteps) {
    GraphRunStats stats;
    stats.maxNodes = g.size();
    while (stats.steps < maxSteps) {
        auto redex = find_graph_redex(strs, g);
        if (!redex) {
            stats.normalForm = true;
            return stats;
        }
        contract(strs, g, *redex, oracles);
        ++stats.steps;
        if (redex->is_oracle()) ++stats.oracleCalls;
        stats.maxNodes = std::max(stats.maxNodes, g.size());
    }
    stats.normalForm = !find_graph_redex(strs, g).has_value();
    return stats;
}

std::string graph_to_string(const TermGraph& g) {
    std::ostringstream out;
    for (const auto& [id, v] : g.vertices()) {
        out << id << ' ' << vertex_label_text(v);
        for (VertexId s : v.succ) out << ' ' << s;
        if (id == g.root()) out << " *";
        out << '\n';
    }
    return out.str();
}

std::string graph_to_dot(const TermGraph& g) {
    std::ostringstream out;
    out << "digraph termgraph {\n";
    out << "  node [fontname=\"monospace\"];\n";
    for (const auto& [id, v] : g.vertices()) {
        out << "  n" << id << " [label=\"" << vertex_label_text(v) << "\"";
        if (!v.label) out << ", style=dashed";
        if (id == g.root()) out << ", peripheries=2";
        out << "];\n";
        for (std::size_t i = 0; i < v.succ.size(); ++i)
            out << "  n" << id << " -> n" << v.succ[i] << " [label=\"" << (i + 1) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

void validate_graph(const TermGraph& g) {
    if (!g.has(g.root())) throw std::logic_error("term graph root does not exist");
    for (const auto& [id, v] : g.vertices()) {
        bool isApp = v.label && *v.label == "@";
        if (isApp ? v.succ.size() != 2 : !v.succ.empty())
            throw std::logic_error("vertex " + std::to_string(id) +
                                   " has the wrong number of successors");
        if (!v.type) throw std::logic_error("vertex " + std::to_string(id) + " has no type");
        for (VertexId s : v.succ)
            if (!g.has(s))
                throw std::logic_error("vertex " + std::to_string(id) +
                                       " points at a missing vertex");
        if (isApp) {
            const TypePtr& fnType = g.vertex(v.succ[0]).type;
            if (fnType->is_base() || !type_equal(fnType->arg(), g.vertex(v.succ[1]).type) ||
                !type_equal(fnType->result(), v.type))
                throw std::logic_error("vertex " + std::to_string(id) + " is ill-typed");
        }
    }
    // Acyclicity: depth-first search, grey = on the current path.
    std::map<VertexId, int> color;  // 0 white, 1 grey, 2 black
    std::function<void(VertexId)> dfs = [&](VertexId v) {
        int& c = color[v];
        if (c == 1) throw std::logic_error("term graph has a cycle");
        if (c == 2) return;
        c = 1;
        for (VertexId s : g.vertex(v).succ) dfs(s);
        c = 2;
    };
    dfs(g.root());
    std::size_t reachable = 0;
    for (const auto& [id, c] : color)
        if (c == 2) ++reachable;
    if (reachable != g.size())
        throw std::logic_error("term graph has vertices unreachable from the root");
}

std::optional<Word> decode_graph_word(const TermGraph& g, VertexId v) {
    Word w;
    VertexId cur = v;
    for (std::size_t guard = 0; guard <= g.size(); ++guard) {
        const TermGraph::Vertex& vx = g.vertex(cur);
        if (vx.label && *vx.label == "nil") return w;
        if (!vx.label || *vx.label != "@") return std::nullopt;
        const TermGraph::Vertex& f = g.vertex(vx.succ[0]);
        if (!f.label || *f.label != "@") return std::nullopt;
        const TermGraph::Vertex& h = g.vertex(f.succ[0]);
        if (!h.label || *h.label != "cons") return std::nullopt;
        const TermGraph::Vertex& bit = g.vertex(f.succ[1]);
        if (!bit.label) return std::nullopt;
        if (*bit.label == "o")
            w.bits.push_back(0);
        else if (*bit.label == "i")
            w.bits.push_back(1);
        else
            return std::nullopt;
        cur = vx.succ[1];
    }
    return std::nullopt;
}

} // namespace cstuple
