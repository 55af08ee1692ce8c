#pragma once

#include <stdexcept>
#include <vector>

#include "ktree/boolean.hpp"
#include "ktree/core.hpp"

// Axis-parallel slice extraction and insertion. A slice of codimension c
// lives in the k-c free axes; the fixed coordinates are themselves given
// as a tree of dimension c, so multi-position slabs are handled in one call.

namespace ktree {

// flags[i] true marks axis i+1 as a slice axis (fixed coordinate).
using AxesMask = std::vector<bool>;

namespace detail {

inline std::unique_ptr<Node> extract_slice_rec(const Node* space, const Node* coord, const AxesMask& mask,
                                               int k, int level, int depth) {
    if (is_white(space) || is_white(coord)) return make_tree(Color::white);
    if (level == depth || (space->terminal() && coord->terminal()))
        return make_tree(Color::black);  // both non-white here
    int axis = level % k;
    if (mask[axis]) {
        // slice axis: union over the coord positions, no output level
        auto l = extract_slice_rec(child(space, Side::left), child(coord, Side::left), mask, k,
                                   level + 1, depth);
        auto r = extract_slice_rec(child(space, Side::right), child(coord, Side::right), mask, k,
                                   level + 1, depth);
        return union_unbounded(l.get(), r.get());
    }
    // free axis: one output level, coord unchanged
    return union_subtrees(
        extract_slice_rec(child(space, Side::left), coord, mask, k, level + 1, depth),
        extract_slice_rec(child(space, Side::right), coord, mask, k, level + 1, depth));
}

inline void insert_slice_rec(Node* space, const Node* slice, const Node* coord, const AxesMask& mask,
                             int k, int level, int depth) {
    if (is_white(slice) || is_white(coord)) return;
    if (is_black(space)) return;  // already full here
    if (level == depth) {
        recolor(space, Color::black);
        return;
    }
    if (space->terminal()) fission(space);
    int axis = level % k;
    const Node* sl_l = mask[axis] ? slice : child(slice, Side::left);
    const Node* sl_r = mask[axis] ? slice : child(slice, Side::right);
    const Node* co_l = mask[axis] ? child(coord, Side::left) : coord;
    const Node* co_r = mask[axis] ? child(coord, Side::right) : coord;
    insert_slice_rec(space->left.get(), sl_l, co_l, mask, k, level + 1, depth);
    insert_slice_rec(space->right.get(), sl_r, co_r, mask, k, level + 1, depth);
    merge(space);
}

inline int count_fixed(const AxesMask& mask) {
    int c = 0;
    for (bool f : mask) c += f ? 1 : 0;
    return c;
}

}  // namespace detail

// Black set of the result: { free coords | exists fixed in coord such that
// the interleaved point is in space }. Output dimension is k - c.
inline Tree extract_slice(const Tree& space, int k, const Tree& coord, int c, const AxesMask& mask,
                          int r) {
    if (static_cast<int>(mask.size()) != k || detail::count_fixed(mask) != c)
        throw std::invalid_argument("extract_slice: mask/codimension mismatch");
    auto out = detail::extract_slice_rec(space.root(), coord.root(), mask, k, 0, k * r);
    return Tree(std::move(out));
}

// Unions the cylinder {fixed in coord} x {free in slice} into space.
inline Tree insert_slice(Tree space, const Tree& slice, int d, const Tree& coord, int c,
                         const AxesMask& mask, int r) {
    int k = static_cast<int>(mask.size());
    if (d + c != k || detail::count_fixed(mask) != c)
        throw std::invalid_argument("insert_slice: dimension mismatch");
    detail::insert_slice_rec(space.root(), slice.root(), coord.root(), mask, k, 0, k * r);
    return space;
}

}  // namespace ktree
