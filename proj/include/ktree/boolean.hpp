#pragma once

#include "ktree/core.hpp"

// Set algebra on trees at a caller-chosen output precision. Parallel
// descent past terminals uses the self-child rule; a non-terminal node
// reached at the depth limit counts as black (uppermost hull), so results
// at decreasing precision nest into one another.

namespace ktree {

namespace detail {

template <typename LeafRule>
std::unique_ptr<Node> unary_op(const Node* n, int level, int depth, LeafRule rule) {
    if (!n->terminal() && level != depth) {
        return union_subtrees(unary_op(n->left.get(), level + 1, depth, rule),
                              unary_op(n->right.get(), level + 1, depth, rule));
    }
    return make_tree(rule(is_white(n)) ? Color::black : Color::white);
}

template <typename LeafRule>
std::unique_ptr<Node> binary_op(const Node* a, const Node* b, int level, int depth, LeafRule rule) {
    if ((!a->terminal() || !b->terminal()) && level != depth) {
        return union_subtrees(
            binary_op(child(a, Side::left), child(b, Side::left), level + 1, depth, rule),
            binary_op(child(a, Side::right), child(b, Side::right), level + 1, depth, rule));
    }
    return make_tree(rule(is_white(a), is_white(b)) ? Color::black : Color::white);
}

// Unbounded structural union, for internal passes whose operands are
// already aligned finite trees.
inline std::unique_ptr<Node> union_unbounded(const Node* a, const Node* b) {
    if (!a->terminal() || !b->terminal()) {
        if (is_black(a) || is_black(b)) return make_tree(Color::black);
        return union_subtrees(union_unbounded(child(a, Side::left), child(b, Side::left)),
                              union_unbounded(child(a, Side::right), child(b, Side::right)));
    }
    return make_tree((is_white(a) && is_white(b)) ? Color::white : Color::black);
}

}  // namespace detail

// Copy truncated/renormalized to precision r: gray at the limit goes black.
inline Tree assert_tree(const Tree& t, int k, int r) {
    return Tree(detail::unary_op(t.root(), 0, k * r, [](bool w) { return !w; }));
}

inline Tree not_tree(const Tree& t, int k, int r) {
    return Tree(detail::unary_op(t.root(), 0, k * r, [](bool w) { return w; }));
}

inline Tree tree_union(const Tree& a, const Tree& b, int k, int r) {
    return Tree(detail::binary_op(a.root(), b.root(), 0, k * r,
                                  [](bool wa, bool wb) { return !(wa && wb); }));
}

inline Tree tree_intersect(const Tree& a, const Tree& b, int k, int r) {
    return Tree(detail::binary_op(a.root(), b.root(), 0, k * r,
                                  [](bool wa, bool wb) { return !wa && !wb; }));
}

inline Tree tree_xor(const Tree& a, const Tree& b, int k, int r) {
    return Tree(detail::binary_op(a.root(), b.root(), 0, k * r,
                                  [](bool wa, bool wb) { return wa != wb; }));
}

inline Tree tree_diff(const Tree& a, const Tree& b, int k, int r) {
    return Tree(detail::binary_op(a.root(), b.root(), 0, k * r,
                                  [](bool wa, bool wb) { return !wa && wb; }));
}

}  // namespace ktree
