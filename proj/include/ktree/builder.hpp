#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ktree/core.hpp"

// Tree construction from integer and real vectors, including inductive-limit
// growth of the modeled hypercube.

namespace ktree {

using IntVector = std::vector<std::uint64_t>;
using RealVector = std::vector<double>;

// Per-axis [min,max) bounds of the hypercube a tree models. Kept as
// external metadata, never stored inside the tree.
struct RefBox {
    std::vector<double> min;
    std::vector<double> max;

    static RefBox unit(int k) {
        RefBox b;
        b.min.assign(k, 0.0);
        b.max.assign(k, 1.0);
        return b;
    }

    int dims() const { return static_cast<int>(min.size()); }

    double span(int axis) const { return max[axis] - min[axis]; }

    bool contains(const RealVector& v) const {
        for (int i = 0; i < dims(); ++i)
            if (v[i] < min[i] || v[i] >= max[i]) return false;
        return true;
    }

    bool operator==(const RefBox& o) const { return min == o.min && max == o.max; }
};

namespace detail {

inline void add_int_rec(Node* n, const IntVector& v, int k, int r, int level) {
    if (level == k * r) {
        recolor(n, Color::black);
        return;
    }
    int axis = level % k;
    int bit_index = r - 1 - level / k;  // MSB first
    bool go_right = (v[axis] >> bit_index) & 1u;
    if (n->terminal()) {
        if (n->color == Color::black) return;  // already full
        fission(n);
    }
    add_int_rec(go_right ? n->right.get() : n->left.get(), v, k, r, level + 1);
    merge(n);
}

}  // namespace detail

// Blackens the cell addressed by v in the grid {0..2^r-1}^k. Descent at
// level l consumes the most significant unconsumed bit of coordinate
// (l mod k); bit 0 goes left, bit 1 goes right.
inline Tree add_int_vector(Tree t, const IntVector& v, int k, int r) {
    if (static_cast<int>(v.size()) != k) throw std::invalid_argument("add_int_vector: dimension mismatch");
    for (auto c : v)
        if (r < 64 && c >> r) throw std::out_of_range("add_int_vector: coordinate out of range");
    detail::add_int_rec(t.root(), v, k, r, 0);
    return t;
}

// Real coordinates in [0,1)^k; a coordinate exactly on a cell midpoint
// goes right (strict less goes left), matching floor(v * 2^r).
inline Tree add_real_vector(Tree t, const RealVector& v, int k, int r) {
    if (static_cast<int>(v.size()) != k) throw std::invalid_argument("add_real_vector: dimension mismatch");
    for (double x : v)
        if (!(x >= 0.0 && x < 1.0)) throw std::out_of_range("add_real_vector: coordinate outside [0,1)");
    std::vector<double> lo(k, 0.0), hi(k, 1.0);
    struct Rec {
        std::vector<double>&lo, &hi;
        const RealVector& v;
        int depth, k;
        void operator()(Node* n, int level) {
            if (level == depth || is_black(n)) {
                recolor(n, Color::black);
                return;
            }
            int axis = level % k;
            double mid = (lo[axis] + hi[axis]) / 2.0;
            bool go_right = !(v[axis] < mid);
            double saved = go_right ? lo[axis] : hi[axis];
            (go_right ? lo[axis] : hi[axis]) = mid;
            if (n->terminal()) fission(n);
            (*this)(go_right ? n->right.get() : n->left.get(), level + 1);
            (go_right ? lo[axis] : hi[axis]) = saved;
            merge(n);
        }
    } rec{lo, hi, v, k * r, k};
    rec(t.root(), 0);
    return t;
}

inline bool contains(const Tree& t, const IntVector& v, int k, int r) {
    if (static_cast<int>(v.size()) != k) throw std::invalid_argument("contains: dimension mismatch");
    const Node* n = t.root();
    for (int level = 0; level < k * r && !n->terminal(); ++level) {
        int axis = level % k;
        int bit_index = r - 1 - level / k;
        bool go_right = (v[axis] >> bit_index) & 1u;
        n = child(n, go_right ? Side::right : Side::left);
    }
    return !is_white(n);
}

// Smallest box of span 2^m times the input span containing both `box` and
// `v`, built by repeated doubling: each round every axis doubles, downward
// when the coordinate lies below the box and upward otherwise, so the old
// box is always one 2^k-ant of the new one.
inline RefBox grow_bounds(RefBox box, const RealVector& v) {
    int k = box.dims();
    if (static_cast<int>(v.size()) != k) throw std::invalid_argument("grow_bounds: dimension mismatch");
    for (int i = 1; i < k; ++i)
        if (box.span(i) != box.span(0)) throw std::invalid_argument("grow_bounds: box is not a cube");
    for (double x : v)
        if (!std::isfinite(x)) throw std::invalid_argument("grow_bounds: non-finite coordinate");
    int iter = 0;
    while (!box.contains(v)) {
        if (++iter > 1080) throw std::runtime_error("grow_bounds: vector beyond representable growth");
        double span = box.span(0);
        for (int i = 0; i < k; ++i) {
            if (v[i] < box.min[i])
                box.min[i] -= span;
            else
                box.max[i] += span;
        }
    }
    return box;
}

namespace detail {

inline std::unique_ptr<Node> extend_rec(std::unique_ptr<Node> t, RefBox cur, const RefBox& old, int k,
                                         int level) {
    if (cur == old) return t;
    int axis = level % k;
    double mid = (cur.min[axis] + cur.max[axis]) / 2.0;
    bool old_left;
    if (old.max[axis] <= mid)
        old_left = true;
    else if (old.min[axis] >= mid)
        old_left = false;
    else
        throw std::invalid_argument("extend_tree: boxes not nested on a power-of-2 grid");
    (old_left ? cur.max[axis] : cur.min[axis]) = mid;
    auto inner = extend_rec(std::move(t), std::move(cur), old, k, level + 1);
    if (old_left) return union_subtrees(std::move(inner), make_tree(Color::white));
    return union_subtrees(make_tree(Color::white), std::move(inner));
}

}  // namespace detail

// Re-roots t (built over `old`) inside `grown`, wrapping it in internal
// levels with white siblings so the black set keeps its position.
inline Tree extend_tree(Tree t, const RefBox& old, const RefBox& grown, int k) {
    if (old.dims() != k || grown.dims() != k) throw std::invalid_argument("extend_tree: dimension mismatch");
    if (old == grown) return t;
    double ratio = grown.span(0) / old.span(0);
    double m = std::log2(ratio);
    if (!(ratio > 1.0) || m != std::floor(m))
        throw std::invalid_argument("extend_tree: span ratio is not a power of 2");
    return Tree(detail::extend_rec(t.release(), grown, old, k, 0));
}

inline std::pair<Tree, RefBox> add_with_growth(Tree t, RefBox box, const RealVector& v, int k, int r) {
    RefBox grown = grow_bounds(box, v);
    if (!(grown == box)) t = extend_tree(std::move(t), box, grown, k);
    RealVector u(k);
    for (int i = 0; i < k; ++i) u[i] = (v[i] - grown.min[i]) / grown.span(i);
    t = add_real_vector(std::move(t), u, k, r);
    return {std::move(t), std::move(grown)};
}

}  // namespace ktree
