#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ktree/boolean.hpp"
#include "ktree/core.hpp"

// Polytopes as homographic images of the unit hypercube (2^k vertices, 2k
// faces), their rasterization into trees, homographic transformation of
// trees, and the axis-parallel auxiliary transforms (symmetry, hidden-part
// removal, orthographic projection).

namespace ktree {

// Absolute tolerance on hyperplane evaluations; ties classify
// boundary-touching blocks conservatively.
inline constexpr double eps_geom = 9.094947017729282e-13;  // 2^-40

// Homogeneous covector of length k+1; value at affine x is
// sum(coeffs[i] * x[i]) + coeffs[k].
struct Hyperplane {
    std::vector<double> coeffs;

    double eval(const std::vector<double>& x) const {
        double v = coeffs.back();
        for (std::size_t i = 0; i < x.size(); ++i) v += coeffs[i] * x[i];
        return v;
    }
};

// Vertex index bit j gives the side along axis j+1 (bit 0 <-> axis 1), so
// halving along axis a pairs vertices at stride 2^(a-1). Vertices are kept
// in homogeneous coordinates (k reals plus a positive weight): the
// butterfly half-sum of two homogeneous vertices is then the inverse image
// of the output-space midpoint even for projective transforms.
struct Polytope {
    int k = 0;
    std::vector<std::vector<double>> vertices;  // 2^k rows of k+1 homogeneous reals
    std::vector<Hyperplane> lower;              // k faces, inside is >= 0
    std::vector<Hyperplane> upper;              // k faces, inside is <= 0
};

struct HomogeneousMatrix {
    int k = 0;
    std::vector<double> m;  // (k+1)^2 row-major

    static HomogeneousMatrix identity(int k) {
        HomogeneousMatrix h;
        h.k = k;
        h.m.assign((k + 1) * (k + 1), 0.0);
        for (int i = 0; i <= k; ++i) h.m[i * (k + 2)] = 1.0;
        return h;
    }

    double& at(int row, int col) { return m[row * (k + 1) + col]; }
    double at(int row, int col) const { return m[row * (k + 1) + col]; }
};

inline HomogeneousMatrix multiply(const HomogeneousMatrix& a, const HomogeneousMatrix& b) {
    int n = a.k + 1;
    HomogeneousMatrix c = HomogeneousMatrix::identity(a.k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += a.at(i, l) * b.at(l, j);
            c.at(i, j) = s;
        }
    return c;
}

// Gauss-Jordan with partial pivoting.
inline HomogeneousMatrix invert(const HomogeneousMatrix& a) {
    int n = a.k + 1;
    std::vector<double> w(a.m);
    HomogeneousMatrix inv = HomogeneousMatrix::identity(a.k);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::fabs(w[row * n + col]) > std::fabs(w[piv * n + col])) piv = row;
        if (std::fabs(w[piv * n + col]) < 1e-14) throw std::invalid_argument("invert: singular matrix");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(w[piv * n + j], w[col * n + j]);
                std::swap(inv.m[piv * n + j], inv.m[col * n + j]);
            }
        double d = w[col * n + col];
        for (int j = 0; j < n; ++j) {
            w[col * n + j] /= d;
            inv.m[col * n + j] /= d;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            double f = w[row * n + col];
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                w[row * n + j] -= f * w[col * n + j];
                inv.m[row * n + j] -= f * inv.m[col * n + j];
            }
        }
    }
    return inv;
}

inline Polytope unit_polytope(int k) {
    Polytope p;
    p.k = k;
    std::size_t nv = std::size_t{1} << k;
    p.vertices.resize(nv, std::vector<double>(k + 1, 1.0));
    for (std::size_t i = 0; i < nv; ++i)
        for (int a = 0; a < k; ++a) p.vertices[i][a] = (i >> a) & 1u ? 1.0 : 0.0;
    p.lower.resize(k);
    p.upper.resize(k);
    for (int a = 0; a < k; ++a) {
        p.lower[a].coeffs.assign(k + 1, 0.0);
        p.lower[a].coeffs[a] = 1.0;  // x_a >= 0
        p.upper[a].coeffs.assign(k + 1, 0.0);
        p.upper[a].coeffs[a] = 1.0;
        p.upper[a].coeffs[k] = -1.0;  // x_a <= 1
    }
    return p;
}

struct PlanePosition {
    bool all_on;      // every vertex within eps of the plane
    bool all_nonpos;  // no vertex strictly on the positive side
    bool all_nonneg;  // no vertex strictly on the negative side
};

inline PlanePosition position_vs_hyperplane(const Polytope& p, const Hyperplane& h, int k) {
    PlanePosition pos{true, true, true};
    for (const auto& v : p.vertices) {
        double val = 0.0;
        for (int i = 0; i <= k; ++i) val += h.coeffs[i] * v[i];
        val /= v[k];  // weights are positive; comparisons match the affine value
        if (std::fabs(val) > eps_geom) pos.all_on = false;
        if (val > eps_geom) pos.all_nonpos = false;
        if (val < -eps_geom) pos.all_nonneg = false;
    }
    return pos;
}

struct ConvexRelation {
    bool intersects;
    bool p1_in_p2;
    bool p2_in_p1;
};

// Face/vertex separation test for two convex polytopes sharing the
// 2^k-vertex / 2k-face structure. A face whose opposite polytope lies
// entirely on the strict outside refutes intersection; inclusion needs
// every vertex inside-or-on every face. Inclusion flags are cleared when
// there is no intersection.
inline ConvexRelation intersect_convex(const Polytope& p1, const Polytope& p2, int k) {
    ConvexRelation rel{true, true, true};
    auto scan = [&](const Polytope& faces_of, const Polytope& verts_of, bool& verts_inside) {
        for (int a = 0; a < k; ++a) {
            PlanePosition lo = position_vs_hyperplane(verts_of, faces_of.lower[a], k);
            if (!lo.all_on) {
                if (!lo.all_nonneg) verts_inside = false;
                if (lo.all_nonpos) rel.intersects = false;
            }
            PlanePosition hi = position_vs_hyperplane(verts_of, faces_of.upper[a], k);
            if (!hi.all_on) {
                if (!hi.all_nonpos) verts_inside = false;
                if (hi.all_nonneg) rel.intersects = false;
            }
        }
    };
    scan(p2, p1, rel.p1_in_p2);
    scan(p1, p2, rel.p2_in_p1);
    if (!rel.intersects) {
        rel.p1_in_p2 = false;
        rel.p2_in_p1 = false;
    }
    return rel;
}

// Butterfly split of the vertex list along a 1-based axis: each pair
// (i, i + stride) keeps its own end and gets the pair midpoint on the
// other slot.
inline std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>> split_vertices(
    const Polytope& p, int k, int axis) {
    std::size_t nv = p.vertices.size();
    std::size_t stride = std::size_t{1} << (axis - 1);
    auto left = p.vertices;
    auto right = p.vertices;
    for (std::size_t i = 0; i < nv; ++i) {
        if (i & stride) continue;
        std::size_t j = i + stride;
        for (int a = 0; a <= k; ++a) {
            double mid = (p.vertices[i][a] + p.vertices[j][a]) / 2.0;
            left[j][a] = mid;
            right[i][a] = mid;
        }
    }
    return {std::move(left), std::move(right)};
}

struct FaceSplit {
    std::vector<Hyperplane> left_lower, left_upper, right_lower, right_upper;
};

// The median face is the half-sum of the lower and upper covectors along
// the split axis; other axes are copied.
inline FaceSplit split_faces(const std::vector<Hyperplane>& lower, const std::vector<Hyperplane>& upper,
                             int axis) {
    FaceSplit fs{lower, upper, lower, upper};
    int a = axis - 1;
    Hyperplane median;
    median.coeffs.resize(lower[a].coeffs.size());
    for (std::size_t i = 0; i < median.coeffs.size(); ++i)
        median.coeffs[i] = (lower[a].coeffs[i] + upper[a].coeffs[i]) / 2.0;
    fs.left_upper[a] = median;
    fs.right_lower[a] = median;
    return fs;
}

inline std::pair<Polytope, Polytope> split_polytope(const Polytope& p, int axis) {
    auto [vl, vr] = split_vertices(p, p.k, axis);
    FaceSplit fs = split_faces(p.lower, p.upper, axis);
    Polytope l{p.k, std::move(vl), std::move(fs.left_lower), std::move(fs.left_upper)};
    Polytope r{p.k, std::move(vr), std::move(fs.right_lower), std::move(fs.right_upper)};
    return {std::move(l), std::move(r)};
}

namespace detail {

inline std::unique_ptr<Node> polytope_tree_rec(const Polytope& target, const Polytope& block, int k,
                                               int level, int depth) {
    ConvexRelation rel = intersect_convex(block, target, k);
    if (rel.intersects && !rel.p1_in_p2 && level != depth) {
        int axis = level % k + 1;
        auto [bl, br] = split_polytope(block, axis);
        return union_subtrees(polytope_tree_rec(target, bl, k, level + 1, depth),
                              polytope_tree_rec(target, br, k, level + 1, depth));
    }
    bool black = rel.p1_in_p2 || (level == depth && rel.intersects);
    return make_tree(black ? Color::black : Color::white);
}

}  // namespace detail

// Recursive halving of the unit hypercube against p: included blocks go
// black, disjoint ones white, boundary blocks are developed down to depth
// k*r where the uppermost hull makes them black.
inline Tree polytope_tree(const Polytope& p, int k, int r) {
    return Tree(detail::polytope_tree_rec(p, unit_polytope(k), k, 0, k * r));
}

// The transform polytope of a homography m: vertices are the inverse
// images of the unit-cube corners (with homogeneous normalization), faces
// the unit-cube covectors composed with m. A corner with near-zero weight
// is a vertex at infinity and is rejected.
inline Polytope transform_polytope_of(const HomogeneousMatrix& m, int k) {
    HomogeneousMatrix inv = invert(m);
    Polytope p = unit_polytope(k);
    bool any_pos = false, any_neg = false;
    for (auto& v : p.vertices) {
        std::vector<double> h(k + 1, 0.0);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j) h[i] += inv.at(i, j) * v[j];
        if (std::fabs(h[k]) < eps_geom)
            throw std::domain_error("transform_polytope_of: vertex at infinity");
        (h[k] > 0 ? any_pos : any_neg) = true;
        v = std::move(h);
    }
    if (any_pos && any_neg)
        throw std::domain_error("transform_polytope_of: cube straddles the horizon plane");
    if (any_neg)
        for (auto& v : p.vertices)
            for (auto& x : v) x = -x;
    auto compose = [&](Hyperplane& f) {
        std::vector<double> c(k + 1, 0.0);
        for (int j = 0; j <= k; ++j)
            for (int i = 0; i <= k; ++i) c[j] += f.coeffs[i] * m.at(i, j);
        f.coeffs = std::move(c);
    };
    for (auto& f : p.lower) compose(f);
    for (auto& f : p.upper) compose(f);
    return p;
}

namespace detail {

// Scatters one black source block into the output tree: the output cube is
// halved in sync with the transform-polytope piece (its inverse image), so
// a piece inside the block blackens the whole output node.
inline void scatter_block(Node* out, const Polytope& piece, const Polytope& block, int k, int level,
                          int depth) {
    if (is_black(out)) return;
    ConvexRelation rel = intersect_convex(piece, block, k);
    if (!rel.intersects) return;
    if (level != depth && !rel.p1_in_p2) {
        int axis = level % k + 1;
        auto [pl, pr] = split_polytope(piece, axis);
        if (out->terminal()) fission(out);
        scatter_block(out->left.get(), pl, block, k, level + 1, depth);
        scatter_block(out->right.get(), pr, block, k, level + 1, depth);
        merge(out);
        return;
    }
    recolor(out, Color::black);
}

inline void transform_analyze(const Node* src, const Node* polybt, Node* out, const Polytope& block,
                              const Polytope& transform_poly, int k, int level, int depth_analysis,
                              int depth_build) {
    if (is_white(src) || is_white(polybt)) return;
    if (level != depth_analysis && (!src->terminal() || !polybt->terminal())) {
        int axis = level % k + 1;
        auto [bl, br] = split_polytope(block, axis);
        transform_analyze(child(src, Side::left), child(polybt, Side::left), out, bl, transform_poly,
                          k, level + 1, depth_analysis, depth_build);
        transform_analyze(child(src, Side::right), child(polybt, Side::right), out, br, transform_poly,
                          k, level + 1, depth_analysis, depth_build);
        return;
    }
    // black source block meeting the transform polytope
    scatter_block(out, transform_poly, block, k, 0, depth_build);
}

// Fast variant: each output node carries its polytope piece so repeated
// scatters do not re-split from the root.
struct PieceTag {
    Polytope piece;
};

inline const Polytope& piece_of(Node* n) { return std::any_cast<const PieceTag&>(n->value).piece; }

inline void scatter_block_fast(Node* out, const Polytope& block, int k, int level, int depth) {
    if (is_black(out)) return;
    const Polytope& piece = piece_of(out);
    ConvexRelation rel = intersect_convex(piece, block, k);
    if (!rel.intersects) return;
    if (level != depth && !rel.p1_in_p2) {
        int axis = level % k + 1;
        if (out->terminal()) {
            fission(out);
            auto [pl, pr] = split_polytope(piece, axis);
            out->left->value = PieceTag{std::move(pl)};
            out->right->value = PieceTag{std::move(pr)};
        }
        scatter_block_fast(out->left.get(), block, k, level + 1, depth);
        scatter_block_fast(out->right.get(), block, k, level + 1, depth);
        if (!out->terminal() && out->left->terminal() && out->right->terminal() &&
            out->left->color == out->right->color) {
            // devaluate the children, then merge
            out->left->value.reset();
            out->right->value.reset();
            merge(out);
        }
        return;
    }
    Polytope keep = piece;  // recolor drops the annotation with the node
    recolor(out, Color::black);
    out->value = PieceTag{std::move(keep)};
}

inline void transform_analyze_fast(const Node* src, const Node* polybt, Node* out,
                                   const Polytope& block, int k, int level, int depth_analysis,
                                   int depth_build) {
    if (is_white(src) || is_white(polybt)) return;
    if (level != depth_analysis && (!src->terminal() || !polybt->terminal())) {
        int axis = level % k + 1;
        auto [bl, br] = split_polytope(block, axis);
        transform_analyze_fast(child(src, Side::left), child(polybt, Side::left), out, bl, k,
                               level + 1, depth_analysis, depth_build);
        transform_analyze_fast(child(src, Side::right), child(polybt, Side::right), out, br, k,
                               level + 1, depth_analysis, depth_build);
        return;
    }
    scatter_block_fast(out, block, k, 0, depth_build);
}

}  // namespace detail

// Image tree of t under the homography described by its transform
// polytope p. The analysis phase walks t in parallel with the rasterized
// polytope, so only blocks actually concerned by the transform are
// scattered into the output.
inline Tree homographic_transform(const Tree& t, const Polytope& p, int k, int r_analysis,
                                  int r_build) {
    Tree polybt = polytope_tree(p, k, r_analysis);
    Tree out(Color::white);
    detail::transform_analyze(t.root(), polybt.root(), out.root(), unit_polytope(k), p, k, 0,
                              k * r_analysis, k * r_build);
    canonicalize(out.root());
    return out;
}

inline Tree homographic_transform(const Tree& t, const Polytope& p, int k, int r) {
    return homographic_transform(t, p, k, r, r);
}

inline Tree homographic_transform_fast(const Tree& t, const HomogeneousMatrix& m, int k,
                                       int r_analysis, int r_build) {
    Polytope p = transform_polytope_of(m, k);
    Tree polybt = polytope_tree(p, k, r_analysis);
    Tree out(Color::white);
    out.root()->value = detail::PieceTag{p};
    detail::transform_analyze_fast(t.root(), polybt.root(), out.root(), unit_polytope(k), k, 0,
                                   k * r_analysis, k * r_build);
    clear_annotations(out.root());
    canonicalize(out.root());
    return out;
}

inline Tree homographic_transform_fast(const Tree& t, const HomogeneousMatrix& m, int k, int r) {
    return homographic_transform_fast(t, m, k, r, r);
}

namespace detail {

inline std::unique_ptr<Node> symmetry_rec(const Node* n, const std::vector<bool>& flags, int k,
                                          int level, int depth) {
    if (n->terminal() || level == depth)
        return make_tree(is_white(n) ? Color::white : Color::black);
    auto l = symmetry_rec(n->left.get(), flags, k, level + 1, depth);
    auto r = symmetry_rec(n->right.get(), flags, k, level + 1, depth);
    if (flags[level % k]) return union_subtrees(std::move(r), std::move(l));
    return union_subtrees(std::move(l), std::move(r));
}

}  // namespace detail

// Reflects the set along each flagged axis (children swapped at the levels
// of those axes). Applying the same flags twice is the identity.
inline Tree symmetry_tree(const Tree& t, const std::vector<bool>& flags, int k, int r) {
    if (static_cast<int>(flags.size()) != k)
        throw std::invalid_argument("symmetry_tree: flags dimension mismatch");
    return Tree(detail::symmetry_rec(t.root(), flags, k, 0, k * r));
}

namespace detail {

// Hidden-part removal threads an occluder mask (a tree over the k-1 free
// axes) left-to-right through every level of the elimination axis: a cell
// survives only if its line is still unmasked, then masks it.
struct HiddenRemover {
    int k, elim;  // elim is 0-based
    int depth;

    std::pair<std::unique_ptr<Node>, std::unique_ptr<Node>> run(const Node* n, int level,
                                                                std::unique_ptr<Node> mask) {
        if (is_white(n) || is_black(mask.get()))
            return {make_tree(Color::white), std::move(mask)};
        if (level == depth) {
            if (!is_white(mask.get())) return {make_tree(Color::white), std::move(mask)};
            return {make_tree(Color::black), make_tree(Color::black)};
        }
        int axis = level % k;
        if (axis == elim) {
            auto [lres, m1] = run(child(n, Side::left), level + 1, std::move(mask));
            auto [rres, m2] = run(child(n, Side::right), level + 1, std::move(m1));
            return {union_subtrees(std::move(lres), std::move(rres)), std::move(m2)};
        }
        auto mask_l = copy_tree(child(mask.get(), Side::left));
        auto mask_r = copy_tree(child(mask.get(), Side::right));
        auto [lres, m1] = run(child(n, Side::left), level + 1, std::move(mask_l));
        auto [rres, m2] = run(child(n, Side::right), level + 1, std::move(mask_r));
        return {union_subtrees(std::move(lres), std::move(rres)),
                union_subtrees(std::move(m1), std::move(m2))};
    }
};

}  // namespace detail

// For every line of cells along elim_axis (1-based), only the black cell
// with the smallest coordinate survives.
inline Tree remove_hidden(const Tree& t, int elim_axis, int k, int r) {
    if (elim_axis < 1 || elim_axis > k) throw std::out_of_range("remove_hidden: axis out of range");
    detail::HiddenRemover hr{k, elim_axis - 1, k * r};
    auto [res, mask] = hr.run(t.root(), 0, make_tree(Color::white));
    (void)mask;
    return Tree(std::move(res));
}

namespace detail {

inline std::unique_ptr<Node> project_rec(const Node* n, int view, int k, int level, int depth) {
    if (n->terminal() || level == depth)
        return make_tree(is_white(n) ? Color::white : Color::black);
    auto l = project_rec(n->left.get(), view, k, level + 1, depth);
    auto r = project_rec(n->right.get(), view, k, level + 1, depth);
    if (level % k == view) return union_unbounded(l.get(), r.get());
    return union_subtrees(std::move(l), std::move(r));
}

}  // namespace detail

// Orthographic projection along view_axis (1-based): the children at every
// level of that axis are unioned, producing a tree of dimension k-1.
inline Tree project(const Tree& t, int view_axis, int k, int r) {
    if (view_axis < 1 || view_axis > k) throw std::out_of_range("project: axis out of range");
    return Tree(detail::project_rec(t.root(), view_axis - 1, k, 0, k * r));
}

}  // namespace ktree
