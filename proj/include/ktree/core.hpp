#pragma once

#include <any>
#include <cassert>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>

// Canonical binary region trees emulating 2^k-trees.
//
// A tree is either a terminal node carrying a color (white = empty set,
// black = full set at the node's scale) or an internal node with two
// children. Level l (0-based from the root) halves the space along axis
// (l mod k); a path of length k*r addresses one cell of the grid
// {0..2^r-1}^k.

namespace ktree {

enum class Color : std::uint8_t { white = 0, black = 1 };

struct Node {
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;
    Color color = Color::white;  // meaningful for terminals only
    std::any value;              // optional annotation, absent by default

    Node() = default;
    explicit Node(Color c) : color(c) {}

    bool terminal() const { return !left; }
    bool annotated() const { return value.has_value(); }
};

inline bool is_white(const Node* n) { return n->terminal() && n->color == Color::white; }
inline bool is_black(const Node* n) { return n->terminal() && n->color == Color::black; }

enum class Side : std::uint8_t { left = 0, right = 1 };

// Descent below a terminal is well-defined: a terminal acts as its own
// child on either side, so traversals at mismatched precisions never fail.
inline const Node* child(const Node* n, Side s) {
    if (n->terminal()) return n;
    return s == Side::left ? n->left.get() : n->right.get();
}

inline std::unique_ptr<Node> make_tree(Color c) { return std::make_unique<Node>(c); }

// Splits a terminal into an internal node with two iso-colored terminal
// children. The result is not canonical; the caller recolors or merges.
inline void fission(Node* n) {
    if (!n->terminal()) throw std::logic_error("fission: node is not terminal");
    n->left = std::make_unique<Node>(n->color);
    n->right = std::make_unique<Node>(n->color);
}

// Collapses an internal node whose children are terminal, unannotated and
// iso-colored. No-op otherwise.
inline void merge(Node* n) {
    if (n->terminal()) return;
    Node* l = n->left.get();
    Node* r = n->right.get();
    if (l->terminal() && r->terminal() && l->color == r->color &&
        !l->annotated() && !r->annotated()) {
        n->color = l->color;
        n->left.reset();
        n->right.reset();
    }
}

// Grafts two subtrees under a fresh node and merges once at the new root.
inline std::unique_ptr<Node> union_subtrees(std::unique_ptr<Node> l, std::unique_ptr<Node> r) {
    auto n = std::make_unique<Node>();
    n->left = std::move(l);
    n->right = std::move(r);
    merge(n.get());
    return n;
}

inline std::unique_ptr<Node> copy_tree(const Node* n) {
    auto c = std::make_unique<Node>(n->color);
    if (!n->terminal()) {
        c->left = copy_tree(n->left.get());
        c->right = copy_tree(n->right.get());
    }
    c->value = n->value;
    return c;
}

inline std::size_t node_count(const Node* n) {
    if (n->terminal()) return 1;
    return 1 + node_count(n->left.get()) + node_count(n->right.get());
}

inline bool structurally_equal(const Node* a, const Node* b) {
    if (a->terminal() != b->terminal()) return false;
    if (a->terminal()) return a->color == b->color;
    return structurally_equal(a->left.get(), b->left.get()) &&
           structurally_equal(a->right.get(), b->right.get());
}

// Bottom-up merge pass restoring canonical form after in-place edits.
inline void canonicalize(Node* n) {
    if (n->terminal()) return;
    canonicalize(n->left.get());
    canonicalize(n->right.get());
    merge(n);
}

// Replaces the subtree at n by a terminal of the given color.
inline void recolor(Node* n, Color c) {
    n->left.reset();
    n->right.reset();
    n->color = c;
    n->value.reset();
}

inline void clear_annotations(Node* n) {
    n->value.reset();
    if (!n->terminal()) {
        clear_annotations(n->left.get());
        clear_annotations(n->right.get());
    }
}

// Expands every terminal down to the target binary depth. The result is
// not canonical; used by granular passes that need unit-cell leaves.
inline void develop(Node* n, int depth) {
    if (depth == 0) return;
    if (n->terminal()) fission(n);
    develop(n->left.get(), depth - 1);
    develop(n->right.get(), depth - 1);
}

// Value-semantics owner. Copies are deep; moves are cheap.
class Tree {
  public:
    Tree() : root_(make_tree(Color::white)) {}
    explicit Tree(Color c) : root_(make_tree(c)) {}
    explicit Tree(std::unique_ptr<Node> r) : root_(std::move(r)) {
        if (!root_) throw std::logic_error("Tree: null root");
    }

    Tree(const Tree& o) : root_(copy_tree(o.root_.get())) {}
    Tree& operator=(const Tree& o) {
        if (this != &o) root_ = copy_tree(o.root_.get());
        return *this;
    }
    Tree(Tree&&) noexcept = default;
    Tree& operator=(Tree&&) noexcept = default;

    const Node* root() const { return root_.get(); }
    Node* root() { return root_.get(); }
    std::unique_ptr<Node> release() { return std::move(root_); }

    std::size_t size() const { return node_count(root_.get()); }

    friend bool operator==(const Tree& a, const Tree& b) {
        return structurally_equal(a.root(), b.root());
    }
    friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

  private:
    std::unique_ptr<Node> root_;
};

}  // namespace ktree
