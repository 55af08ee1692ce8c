#pragma once

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ktree/builder.hpp"
#include "ktree/core.hpp"
#include "ktree/metric.hpp"
#include "ktree/moments.hpp"

// Supervised recognition: spectral classification by attribute-vector
// lookup in a learned attribute-space tree, and correlative classification
// by minimal XOR-mass against per-label unions of Eigen trees.

namespace ktree {

inline constexpr int r_learn_default = 6;

using LabelSet = std::set<std::string>;

// Full normalization pipeline of one shape: moments, centering, inertial
// frame, Eigen tree.
inline EigenFrame eigen_frame_of(const Tree& t, int k, int r,
                                 ScalePolicy policy = ScalePolicy::sqrt_inertia) {
    return normalize_moments(center_moments(tree_moments(t, k, r), k), k, policy);
}

inline Tree eigen_tree_of(const Tree& t, int k, int r,
                          ScalePolicy policy = ScalePolicy::sqrt_inertia) {
    return eigen_tree(t, eigen_frame_of(t, k, r, policy), k, r);
}

// 2k-1 pose-independent measures: the trailing eigenvalues relative to the
// principal one, then the asymmetries scaled by lambda1^(3/2) so the vector
// is also size-independent.
inline std::vector<double> attributes_of(const EigenFrame& f, int k) {
    double l1 = f.eigenvalues.at(0);
    if (!(l1 > 0.0)) throw std::domain_error("attributes_of: degenerate principal inertia");
    std::vector<double> v;
    v.reserve(2 * k - 1);
    for (int i = 1; i < k; ++i) v.push_back(f.eigenvalues[i] / l1);
    double s = std::pow(l1, 1.5);
    for (int i = 0; i < k; ++i) v.push_back(f.asymmetries[i] / s);
    return v;
}

// Attribute-space tree of dimension 2k-1; each training vector's unit cell
// is black and carries the set of label ids seen there.
struct SpectralBase {
    int dims = 0;
    int r = r_learn_default;
    RefBox box;
    Tree tree;
    std::vector<std::string> labels;  // id = position

    int label_id(const std::string& name) {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == name) return static_cast<int>(i);
        labels.push_back(name);
        return static_cast<int>(labels.size()) - 1;
    }
};

namespace detail {

using LabelIdSet = std::set<int>;

inline void spectral_insert(Node* n, const std::vector<double>& u, int dims, int level, int depth,
                            std::vector<double>& lo, std::vector<double>& hi, int label) {
    if (level == depth) {
        if (!is_black(n)) {
            recolor(n, Color::black);
            n->value = LabelIdSet{};
        }
        std::any_cast<LabelIdSet&>(n->value).insert(label);
        return;
    }
    if (n->terminal()) fission(n);  // black leaves live at full depth only
    int axis = level % dims;
    double mid = (lo[axis] + hi[axis]) / 2.0;
    bool go_right = !(u[axis] < mid);
    double& bound = go_right ? lo[axis] : hi[axis];
    double saved = bound;
    bound = mid;
    spectral_insert(go_right ? n->right.get() : n->left.get(), u, dims, level + 1, depth, lo, hi,
                    label);
    bound = saved;
    merge(n);  // no-op while annotated leaves are present
}

}  // namespace detail

inline SpectralBase spectral_learn(
    const std::vector<std::pair<std::string, std::vector<double>>>& samples, int dims,
    int r_learn = r_learn_default) {
    if (dims < 1) throw std::invalid_argument("spectral_learn: bad attribute dimension");
    SpectralBase base;
    base.dims = dims;
    base.r = r_learn;
    base.box = RefBox::unit(dims);
    for (const auto& [label, v] : samples) {
        if (static_cast<int>(v.size()) != dims)
            throw std::invalid_argument("spectral_learn: attribute dimension mismatch");
        base.box = grow_bounds(std::move(base.box), v);
    }
    for (const auto& [label, v] : samples) {
        int id = base.label_id(label);
        std::vector<double> u(dims), lo(dims, 0.0), hi(dims, 1.0);
        for (int i = 0; i < dims; ++i) u[i] = (v[i] - base.box.min[i]) / base.box.span(i);
        detail::spectral_insert(base.tree.root(), u, dims, 0, dims * r_learn, lo, hi, id);
    }
    return base;
}

// Label set of the cell holding v; empty when v is outside the learned box
// or its cell is white.
inline LabelSet spectral_classify(const SpectralBase& base, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != base.dims)
        throw std::invalid_argument("spectral_classify: attribute dimension mismatch");
    if (!base.box.contains(v)) return {};
    std::vector<double> u(base.dims), lo(base.dims, 0.0), hi(base.dims, 1.0);
    for (int i = 0; i < base.dims; ++i) u[i] = (v[i] - base.box.min[i]) / base.box.span(i);
    const Node* n = base.tree.root();
    int depth = base.dims * base.r;
    for (int level = 0; level < depth && !n->terminal(); ++level) {
        int axis = level % base.dims;
        double mid = (lo[axis] + hi[axis]) / 2.0;
        bool go_right = !(u[axis] < mid);
        (go_right ? lo[axis] : hi[axis]) = mid;
        n = child(n, go_right ? Side::right : Side::left);
    }
    LabelSet out;
    if (is_black(n) && n->annotated())
        for (int id : std::any_cast<const detail::LabelIdSet&>(n->value))
            out.insert(base.labels.at(id));
    return out;
}

// Per-label union of the Eigen trees of the label's training examples.
// Label order (for tie-breaking) is first-seen order.
struct CorrelativeBase {
    int k = 0;
    int r = r_learn_default;
    ScalePolicy policy = ScalePolicy::sqrt_inertia;
    std::vector<std::pair<std::string, Tree>> classes;

    Tree* find(const std::string& label) {
        for (auto& [name, t] : classes)
            if (name == label) return &t;
        return nullptr;
    }
    const Tree* find(const std::string& label) const {
        for (const auto& [name, t] : classes)
            if (name == label) return &t;
        return nullptr;
    }
};

inline CorrelativeBase correlative_learn(const std::vector<std::pair<std::string, Tree>>& samples,
                                         int k, int r,
                                         ScalePolicy policy = ScalePolicy::sqrt_inertia) {
    CorrelativeBase base;
    base.k = k;
    base.r = r;
    base.policy = policy;
    for (const auto& [label, t] : samples) {
        Tree e = eigen_tree_of(t, k, r, policy);
        if (Tree* cls = base.find(label))
            *cls = tree_union(*cls, e, k, r);
        else
            base.classes.emplace_back(label, std::move(e));
    }
    return base;
}

struct Classification {
    std::string label;
    double score = 0.0;
    std::vector<std::pair<std::string, double>> scores;  // all labels, base order
};

// The best-correlated label is the one whose union differs from the query's
// Eigen tree by the least mass; ties keep the earliest label.
inline Classification correlative_classify(const CorrelativeBase& base, const Tree& t, int k,
                                           int r) {
    if (base.classes.empty()) throw std::invalid_argument("correlative_classify: empty base");
    Tree q = eigen_tree_of(t, k, r, base.policy);  // throws on zero-mass query
    Classification out;
    bool first = true;
    for (const auto& [label, cls] : base.classes) {
        double s = hausdorff(q, cls, k, r);
        out.scores.emplace_back(label, s);
        if (first || s < out.score) {
            out.label = label;
            out.score = s;
            first = false;
        }
    }
    return out;
}

}  // namespace ktree
