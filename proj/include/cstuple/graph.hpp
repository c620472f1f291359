#pragma once

// Term graphs: dag-shared representations of terms, with innermost graph
// rewriting.  Sharing makes duplicating rules cheap: a rewrite step copies
// vertex references instead of subterms, so runs whose term-level sizes grow
// exponentially stay polynomial at the graph level.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstuple/rewrite.hpp"
#include "cstuple/strs.hpp"
#include "cstuple/term.hpp"
#include "cstuple/type.hpp"

namespace cstuple {

using VertexId = std::size_t;

// A term graph: finite set of vertices with a partial labeling and a root.
//  - a labeled vertex carries either a symbol name or "@" (application);
//  - succ(v) has length 2 exactly when label(v) == "@" (function side first,
//    argument side second) and length 0 otherwise;
//  - an unlabeled vertex stands for a variable (its name is forgotten);
//  - the graph is acyclic and every vertex is reachable from the root.
// Each vertex also records the simple type of the subterm it unravels to,
// so graphs can be converted back to well-typed terms.
class TermGraph {
public:
    struct Vertex {
        std::optional<std::string> label;  // symbol name or "@"; nullopt = variable
        std::vector<VertexId> succ;        // size 2 iff label == "@"
        TypePtr type;
    };

    VertexId root() const { return root_; }
    void set_root(VertexId v);

    std::size_t size() const { return verts_.size(); }
    bool has(VertexId v) const { return verts_.count(v) != 0; }
    const Vertex& vertex(VertexId v) const;

    // Adds a vertex with a fresh id (never reused within this graph).
    VertexId add_vertex(std::optional<std::string> label, std::vector<VertexId> succ,
                        TypePtr type);

    // Replaces every edge into `from` by an edge into `to`; if `from` is the
    // root, `to` becomes the root.  Vertices are not removed.
    void redirect(VertexId from, VertexId to);

    // Removes every vertex not reachable from the root.
    void collect_garbage();

    // Vertex ids in increasing order.
    std::vector<VertexId> ids() const;

    const std::map<VertexId, Vertex>& vertices() const { return verts_; }

private:
    std::map<VertexId, Vertex> verts_;
    VertexId root_ = 0;
    VertexId next_ = 0;
};

// A redex inside a term graph: either a rule redex (rule index plus the
// homomorphism from the rule's left-hand-side graph into the subject) or an
// oracle call site (fully applied oracle symbol whose argument decodes to a
// word).
struct GraphRedex {
    VertexId vertex = 0;                 // image of the pattern root
    std::optional<std::size_t> rule;     // index into Strs::rules; nullopt = oracle
    // Homomorphism: pattern vertex id (of to_graph(lhs)) -> subject vertex id.
    std::map<VertexId, VertexId> phi;
    // Images of the pattern's variable vertices, keyed by variable name.
    std::map<std::string, VertexId> varImage;
    std::string oracleSymbol;            // set iff rule == nullopt
    Word query;                          // set iff rule == nullopt

    bool is_oracle() const { return !rule.has_value(); }
};

struct GraphRunStats {
    std::size_t steps = 0;
    std::size_t oracleCalls = 0;
    std::size_t maxNodes = 0;    // largest vertex count seen (start included)
    bool normalForm = false;     // false when the step budget ran out first
};

// Converts a term to its tree-shaped term graph: one vertex per position,
// applications labeled "@", variables unlabeled (their names are forgotten).
TermGraph to_graph(const TermPtr& s);

// Unravels a graph back to a term.  Every unlabeled vertex becomes a fresh
// variable, one per vertex, so two edges into the same unlabeled vertex yield
// two occurrences of the same variable.  Shared labeled vertices are expanded
// at every occurrence (the result is the unraveled tree).
TermPtr from_graph(const TermGraph& g);

// Finds the innermost redex: a redex at a vertex none of whose proper
// reachable descendants admits one.  Ties are broken by depth-first successor
// order from the root (function side before argument side), and each vertex
// is considered once however often it is shared.  Rules are tried in
// declaration order, oracle call sites after the rules.  Rule left-hand
// sides must be left-linear.
std::optional<GraphRedex> find_graph_redex(const Strs& strs, const TermGraph& g);

// Contracts one redex in place:
//  - building: one fresh vertex per non-variable position of the rule's
//    right-hand side, wired to the variable images for variable positions
//    (an oracle step instead builds the encoded answer as fresh, unshared
//    vertices);
//  - redirection: edges into the redex vertex move to the built root, or to
//    the variable's image when the right-hand side is a bare variable;
//  - garbage collection: vertices unreachable from the (possibly redirected)
//    root are removed.
// Oracle steps look the answer up in `oracles` (throws std::invalid_argument
// when no table is bound, propagates std::out_of_range from the table).
void contract(const Strs& strs, TermGraph& g, const GraphRedex& redex,
              const OracleBinding* oracles = nullptr);

// Rewrites the graph in place to normal form, or until maxSteps contractions
// have been applied.  normalForm reports whether a redex-free graph was
// reached within the budget.
GraphRunStats normalize_graph(const Strs& strs, const OracleBinding* oracles,
                              TermGraph& g, std::size_t maxSteps = kDefaultMaxSteps);

// One vertex per line: "<id> <label|_> <succ ids...>", the root line ends
// with " *"; lines are ordered by id.
std::string graph_to_string(const TermGraph& g);

// DOT rendering (digraph; the root is drawn with a double border, edges are
// ordered function side = 1, argument side = 2).
std::string graph_to_dot(const TermGraph& g);

// Checks structural invariants (successor arities, edge targets, typing of
// the root path, acyclicity, root reachability); throws std::logic_error on
// the first violation.
void validate_graph(const TermGraph& g);

// Reads a word encoding (nil / cons / o / i, shared vertices allowed)
// starting at `v`; nullopt if the subgraph is not a word encoding.
std::optional<Word> decode_graph_word(const TermGraph& g, VertexId v);

} // namespace cstuple
