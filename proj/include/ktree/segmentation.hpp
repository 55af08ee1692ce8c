#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ktree/core.hpp"

// Adjacency discovery between black leaves, connected-component labeling
// and segment-forest extraction.

namespace ktree {

enum class Metric { d1, dinf };

// Per-axis descent indicator for the mirror search. Neutral keeps the two
// blocks aligned, Symmetric faces block1 left of block2, Antisymmetric the
// reverse.
enum class Symmetry : std::uint8_t { neutral, symmetric, antisymmetric };

using SymmetryVector = std::vector<Symmetry>;

struct AdjacencyGraph {
    // leaf identity is the left/right path string from the root
    std::vector<std::string> cells;                 // black leaves, discovery order
    std::set<std::pair<int, int>> edges;            // index pairs, first < second
    std::map<const Node*, int> index;

    int degree(int cell) const {
        int d = 0;
        for (const auto& e : edges)
            if (e.first == cell || e.second == cell) ++d;
        return d;
    }
};

namespace detail {

struct AdjacencySearch {
    Metric metric;
    int k, depth;
    std::map<const Node*, std::string> paths;  // black leaves only
    AdjacencyGraph* graph;

    void index_leaves(const Node* n, std::string& path) {
        if (n->terminal()) {
            if (n->color == Color::black) {
                paths.emplace(n, path);
                graph->index.emplace(n, static_cast<int>(graph->cells.size()));
                graph->cells.push_back(path);
            }
            return;
        }
        path.push_back('l');
        index_leaves(n->left.get(), path);
        path.back() = 'r';
        index_leaves(n->right.get(), path);
        path.pop_back();
    }

    void record(const Node* a, const Node* b) {
        if (!is_black(a) || !is_black(b)) return;
        int ia = graph->index.at(a);
        int ib = graph->index.at(b);
        if (ia == ib) return;
        graph->edges.insert({std::min(ia, ib), std::max(ia, ib)});
    }

    // Mirror descent over a facing pair of blocks. At each level the
    // state entry of the level's axis selects the child pairs that can
    // still hold adjacent cells; d1 drops the diagonal-generating moves.
    void pair_search(const Node* a, const Node* b, SymmetryVector state, int level) {
        if (is_white(a) || is_white(b)) return;
        if ((a->terminal() && b->terminal()) || level == depth) {
            if (a->terminal() && b->terminal()) record(a, b);
            return;
        }
        int axis = level % k;
        switch (state[axis]) {
            case Symmetry::neutral: {
                pair_search(child(a, Side::left), child(b, Side::left), state, level + 1);
                pair_search(child(a, Side::right), child(b, Side::right), state, level + 1);
                if (metric == Metric::dinf) {
                    SymmetryVector s = state;
                    s[axis] = Symmetry::antisymmetric;
                    pair_search(child(a, Side::right), child(b, Side::left), s, level + 1);
                    s[axis] = Symmetry::symmetric;
                    pair_search(child(a, Side::left), child(b, Side::right), std::move(s), level + 1);
                }
                break;
            }
            case Symmetry::symmetric:
                pair_search(child(a, Side::right), child(b, Side::left), std::move(state), level + 1);
                break;
            case Symmetry::antisymmetric:
                pair_search(child(a, Side::left), child(b, Side::right), std::move(state), level + 1);
                break;
        }
    }

    // every internal node seeds one facing pair across its median
    void scan(const Node* n, int level) {
        if (n->terminal() || level == depth) return;
        SymmetryVector state(k, Symmetry::neutral);
        state[level % k] = Symmetry::symmetric;
        pair_search(n->left.get(), n->right.get(), std::move(state), level + 1);
        scan(n->left.get(), level + 1);
        scan(n->right.get(), level + 1);
    }
};

}  // namespace detail

// Two black leaves are adjacent iff some unit-cell pair across them is at
// grid distance 1 under the chosen metric (Manhattan for d1, Chebyshev
// for dinf).
inline AdjacencyGraph search_adjacencies(const Tree& t, Metric metric, int k, int r) {
    AdjacencyGraph g;
    detail::AdjacencySearch s{metric, k, k * r, {}, &g};
    std::string path;
    s.index_leaves(t.root(), path);
    s.scan(t.root(), 0);
    return g;
}

// Tree whose black leaves carry dense integer labels >= 1; equal labels
// mean same connected component.
struct LabeledTree {
    Tree tree;
    int count = 0;
};

namespace detail {

inline void collect_black_leaves(Node* n, std::vector<Node*>& out) {
    if (n->terminal()) {
        if (n->color == Color::black) out.push_back(n);
        return;
    }
    collect_black_leaves(n->left.get(), out);
    collect_black_leaves(n->right.get(), out);
}

}  // namespace detail

// Queue flooding over the adjacency relation: each undiscovered black leaf
// in depth-first order seeds a new component and its bucket drains the
// neighbors transitively.
inline LabeledTree label_components(const Tree& t, Metric metric, int k, int r) {
    LabeledTree lt{t, 0};
    AdjacencyGraph g = search_adjacencies(lt.tree, metric, k, r);
    std::vector<Node*> leaves;
    detail::collect_black_leaves(lt.tree.root(), leaves);
    std::vector<std::vector<int>> nbr(leaves.size());
    std::map<const Node*, int> idx;
    for (std::size_t i = 0; i < leaves.size(); ++i) idx[leaves[i]] = static_cast<int>(i);
    for (const auto& e : g.edges) {
        nbr[e.first].push_back(e.second);
        nbr[e.second].push_back(e.first);
    }
    std::vector<int> label(leaves.size(), 0);
    for (std::size_t seed = 0; seed < leaves.size(); ++seed) {
        if (label[seed]) continue;
        ++lt.count;
        std::deque<int> bucket{static_cast<int>(seed)};
        label[seed] = lt.count;
        while (!bucket.empty()) {
            int cur = bucket.front();
            bucket.pop_front();
            for (int nb : nbr[cur])
                if (!label[nb]) {
                    label[nb] = lt.count;
                    bucket.push_back(nb);
                }
        }
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i]->value = label[i];
    return lt;
}

namespace detail {

inline std::unique_ptr<Node> extract_component_rec(const Node* n, int label) {
    if (!n->terminal()) {
        return union_subtrees(extract_component_rec(n->left.get(), label),
                              extract_component_rec(n->right.get(), label));
    }
    bool match = n->annotated() && std::any_cast<int>(n->value) == label;
    return make_tree(match ? Color::black : Color::white);
}

}  // namespace detail

// Canonical tree of exactly the cells carrying `label`.
inline Tree extract_component(const LabeledTree& lt, int label, int /*k*/, int /*r*/) {
    return Tree(detail::extract_component_rec(lt.tree.root(), label));
}

inline std::vector<Tree> segment_forest(const LabeledTree& lt, int count, int k, int r) {
    std::vector<Tree> forest;
    forest.reserve(count);
    for (int l = 1; l <= count; ++l) forest.push_back(extract_component(lt, l, k, r));
    return forest;
}

}  // namespace ktree
