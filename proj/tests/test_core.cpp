#include <catch2/catch_amalgamated.hpp>

#include "ktree/builder.hpp"
#include "ktree/core.hpp"
#include "oracles.hpp"

using namespace ktree;

TEST_CASE("terminal colors and predicates") {
    Tree w(Color::white), b(Color::black);
    CHECK(is_white(w.root()));
    CHECK(is_black(b.root()));
    CHECK(w.root()->terminal());
    CHECK_FALSE(w.root()->annotated());
}

TEST_CASE("self-child rule on terminals") {
    Tree b(Color::black);
    CHECK(child(b.root(), Side::left) == b.root());
    CHECK(child(b.root(), Side::right) == b.root());
}

TEST_CASE("fission then merge is the identity") {
    Tree b(Color::black);
    fission(b.root());
    CHECK_FALSE(b.root()->terminal());
    CHECK(is_black(b.root()->left.get()));
    merge(b.root());
    CHECK(is_black(b.root()));
}

TEST_CASE("fission rejects internal nodes") {
    Tree b(Color::black);
    fission(b.root());
    CHECK_THROWS_AS(fission(b.root()), std::logic_error);
}

TEST_CASE("merge refuses annotated children") {
    Tree b(Color::black);
    fission(b.root());
    b.root()->left->value = 7;
    merge(b.root());
    CHECK_FALSE(b.root()->terminal());
    clear_annotations(b.root());
    merge(b.root());
    CHECK(b.root()->terminal());
}

TEST_CASE("merge refuses mixed colors") {
    Tree t(Color::white);
    fission(t.root());
    recolor(t.root()->left.get(), Color::black);
    merge(t.root());
    CHECK_FALSE(t.root()->terminal());
}

TEST_CASE("union_subtrees merges iso-colored terminals") {
    auto n = union_subtrees(make_tree(Color::black), make_tree(Color::black));
    CHECK(is_black(n.get()));
    auto m = union_subtrees(make_tree(Color::white), make_tree(Color::black));
    CHECK_FALSE(m->terminal());
}

TEST_CASE("canonicalize collapses redundant structure bottom-up") {
    Tree t(Color::white);
    develop(t.root(), 3);
    CHECK(node_count(t.root()) == 15);
    canonicalize(t.root());
    CHECK(t.root()->terminal());
    CHECK(is_white(t.root()));
}

TEST_CASE("develop reaches the requested depth") {
    Tree t(Color::black);
    develop(t.root(), 4);
    CHECK(node_count(t.root()) == (1u << 5) - 1);
}

TEST_CASE("node_count bound 2^(kr+1)-1") {
    std::mt19937 rng(12345);
    for (int k = 1; k <= 3; ++k)
        for (int r = 1; r <= 3; ++r)
            for (int it = 0; it < 20; ++it) {
                Tree t = oracle::random_tree(k, r, rng);
                CHECK(node_count(t.root()) <= (std::size_t{1} << (k * r + 1)) - 1);
            }
}

TEST_CASE("canonical build never leaves mergeable siblings") {
    std::mt19937 rng(777);
    auto canonical = [](const Node* n) {
        struct {
            bool operator()(const Node* n) const {
                if (n->terminal()) return true;
                const Node *l = n->left.get(), *r = n->right.get();
                if (l->terminal() && r->terminal() && l->color == r->color && !l->annotated() &&
                    !r->annotated())
                    return false;
                return (*this)(l) && (*this)(r);
            }
        } chk;
        return chk(n);
    };
    for (int it = 0; it < 50; ++it) {
        Tree t = oracle::random_tree(2, 3, rng);
        CHECK(canonical(t.root()));
    }
}

TEST_CASE("Tree value semantics") {
    Tree a(Color::white);
    a = add_int_vector(std::move(a), {1, 0}, 2, 1);
    Tree b = a;
    b = add_int_vector(std::move(b), {0, 1}, 2, 1);
    CHECK(a != b);
    Tree c = a;
    CHECK(c == a);
}

TEST_CASE("structural equality distinguishes colors and shapes") {
    Tree w(Color::white), b(Color::black);
    CHECK(w != b);
    Tree t(Color::white);
    fission(t.root());
    recolor(t.root()->right.get(), Color::black);
    CHECK(t != w);
    CHECK(t != b);
}
