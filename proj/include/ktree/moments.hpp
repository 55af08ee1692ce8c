#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "ktree/core.hpp"
#include "ktree/geometry.hpp"

// Generalized moments of a tree up to total order 3, centering, inertia
// normalization and Eigen-tree generation.

namespace ktree {

inline constexpr double eps_mass = 1e-15;
inline constexpr double eps_num = 1e-9;

// Multi-index key: sorted axis numbers in 1..k, 0 for unused slots, so
// (i, j, m) with i <= j <= m. M(X_2 X_1) and M(X_1 X_2) share one entry.
using MomentKey = std::array<int, 3>;

inline MomentKey moment_key(int i, int j = 0, int m = 0) {
    MomentKey key{i, j, m};
    std::sort(key.begin(), key.end());
    return key;
}

struct MomentList {
    int k = 0;
    std::map<MomentKey, double> entries;

    double operator()(int i, int j = 0, int m = 0) const { return entries.at(moment_key(i, j, m)); }
    double& at(int i, int j = 0, int m = 0) { return entries[moment_key(i, j, m)]; }

    // all sorted multi-indices of total order <= 3 for dimension k
    static std::vector<MomentKey> keys(int k) {
        std::vector<MomentKey> out;
        out.push_back({0, 0, 0});
        for (int i = 1; i <= k; ++i) out.push_back({0, 0, i});
        for (int i = 1; i <= k; ++i)
            for (int j = i; j <= k; ++j) out.push_back({0, i, j});
        for (int i = 1; i <= k; ++i)
            for (int j = i; j <= k; ++j)
                for (int m = j; m <= k; ++m) out.push_back({i, j, m});
        return out;
    }
};

// Moments of the unit hypercube: every entry is the product of 1/(n_i+1)
// over the axis multiplicities.
inline MomentList unit_moments(int k) {
    MomentList ml;
    ml.k = k;
    for (const auto& key : MomentList::keys(k)) {
        double v = 1.0;
        for (int axis = 1; axis <= k; ++axis) {
            int n = 0;
            for (int s : key) n += (s == axis) ? 1 : 0;
            v /= n + 1;
        }
        ml.entries[key] = v;
    }
    return ml;
}

// Moments of the half-block along split_axis, from the binomial identity
// M_child(f) = 1/2 * M_parent(f((X_c + x)/2 on axis c)) where x is the
// parent's min (left child) or max (right child) along that axis.
inline MomentList child_moments(const MomentList& parent, int split_axis, double boundary_x, int k) {
    MomentList out;
    out.k = k;
    for (const auto& key : MomentList::keys(k)) {
        int nc = 0;
        std::vector<int> others;
        for (int s : key)
            if (s == split_axis)
                ++nc;
            else if (s != 0)
                others.push_back(s);
        static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
        double v = 0.0;
        double xpow = 1.0;  // boundary_x^(nc-m), built from m = nc downward
        for (int m = nc; m >= 0; --m) {
            MomentKey pk{0, 0, 0};
            int slot = 0;
            for (int s : others) pk[slot++] = s;
            for (int t = 0; t < m; ++t) pk[slot++] = split_axis;
            std::sort(pk.begin(), pk.end());
            v += binom[nc][m] * xpow * parent.entries.at(pk);
            xpow *= boundary_x;
        }
        out.entries[key] = v / (2 << nc);  // 1/2 * 1/2^nc
    }
    return out;
}

// Exact integral of each monomial over the black region: block moments are
// propagated top-down through child_moments and accumulated over the black
// leaves (uppermost hull at the depth limit).
inline MomentList tree_moments(const Tree& t, int k, int r) {
    MomentList acc;
    acc.k = k;
    for (const auto& key : MomentList::keys(k)) acc.entries[key] = 0.0;
    std::vector<double> lo(k, 0.0), hi(k, 1.0);
    int depth = k * r;
    struct Rec {
        std::vector<double>&lo, &hi;
        int k, depth;
        MomentList& acc;
        void operator()(const Node* n, const MomentList& block, int level) {
            if (is_white(n)) return;
            if (n->terminal() || level == depth) {
                for (auto& [key, v] : acc.entries) v += block.entries.at(key);
                return;
            }
            int axis = level % k;
            double mid = (lo[axis] + hi[axis]) / 2.0;
            MomentList lb = child_moments(block, axis + 1, lo[axis], k);
            MomentList rb = child_moments(block, axis + 1, hi[axis], k);
            double saved_hi = hi[axis];
            hi[axis] = mid;
            (*this)(n->left.get(), lb, level + 1);
            hi[axis] = saved_hi;
            double saved_lo = lo[axis];
            lo[axis] = mid;
            (*this)(n->right.get(), rb, level + 1);
            lo[axis] = saved_lo;
        }
    } rec{lo, hi, k, depth, acc};
    rec(t.root(), unit_moments(k), 0);
    return acc;
}

struct CenteredMoments {
    int k = 0;
    double hypervolume = 0.0;
    std::vector<double> center;              // k
    std::vector<double> covariance;          // k*k row-major, order-2 centered / mass
    std::map<MomentKey, double> third;       // order-3 centered / mass

    double cov(int i, int j) const { return covariance[i * k + j]; }
};

inline CenteredMoments center_moments(const MomentList& m, int k) {
    double vol = m(0);
    if (!(vol > eps_mass)) throw std::domain_error("center_moments: zero-mass tree");
    CenteredMoments c;
    c.k = k;
    c.hypervolume = vol;
    c.center.resize(k);
    for (int i = 1; i <= k; ++i) c.center[i - 1] = m(i) / vol;
    const auto& g = c.center;
    c.covariance.assign(k * k, 0.0);
    for (int i = 1; i <= k; ++i)
        for (int j = i; j <= k; ++j) {
            double v = m(i, j) - g[j - 1] * m(i) - g[i - 1] * m(j) + g[i - 1] * g[j - 1] * vol;
            v /= vol;
            c.covariance[(i - 1) * k + (j - 1)] = v;
            c.covariance[(j - 1) * k + (i - 1)] = v;
        }
    for (int i = 1; i <= k; ++i)
        for (int j = i; j <= k; ++j)
            for (int l = j; l <= k; ++l) {
                double v = m(i, j, l) - g[l - 1] * m(i, j) - g[j - 1] * m(i, l) - g[i - 1] * m(j, l) +
                           g[j - 1] * g[l - 1] * m(i) + g[i - 1] * g[l - 1] * m(j) +
                           g[i - 1] * g[j - 1] * m(l) - g[i - 1] * g[j - 1] * g[l - 1] * vol;
                c.third[{i, j, l}] = v / vol;
            }
    return c;
}

// Cyclic Jacobi sweeps for a small symmetric matrix; a is overwritten with
// the diagonalized form, v accumulates the rotations (columns are the
// eigenvectors).
inline void jacobi_eigen(std::vector<double>& a, std::vector<double>& v, int n) {
    v.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (std::sqrt(2.0 * off) < 1e-12) return;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (apq == 0.0) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double cs = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * cs;
                for (int i = 0; i < n; ++i) {
                    double aip = a[i * n + p], aiq = a[i * n + q];
                    a[i * n + p] = cs * aip - sn * aiq;
                    a[i * n + q] = sn * aip + cs * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    double api = a[p * n + i], aqi = a[q * n + i];
                    a[p * n + i] = cs * api - sn * aqi;
                    a[q * n + i] = sn * api + cs * aqi;
                }
                for (int i = 0; i < n; ++i) {
                    double vip = v[i * n + p], viq = v[i * n + q];
                    v[i * n + p] = cs * vip - sn * viq;
                    v[i * n + q] = sn * vip + cs * viq;
                }
            }
    }
    throw std::runtime_error("jacobi_eigen: no convergence");
}

enum class ScalePolicy { sqrt_inertia, linear_inertia, annex };

struct EigenFrame {
    int k = 0;
    std::vector<double> rotation;     // k*k, columns are eigenvectors, eigenvalues descending
    std::vector<double> eigenvalues;  // nonincreasing
    std::vector<double> asymmetries;  // rotated third moments, sign-fixed >= 0
    std::vector<double> center;
    double scale = 1.0;

    double rot(int row, int col) const { return rotation[row * k + col]; }
};

// Symmetric eigendecomposition of the covariance; the third moments are
// rotated into the eigenbasis and any axis with negative asymmetry has its
// eigenvector negated. Sign ambiguity at zero asymmetry is fixed by making
// the eigenvector's largest-magnitude entry positive.
inline EigenFrame normalize_moments(const CenteredMoments& c, int k,
                                    ScalePolicy policy = ScalePolicy::sqrt_inertia) {
    for (double x : c.covariance)
        if (!std::isfinite(x)) throw std::domain_error("normalize_moments: non-finite covariance");
    EigenFrame f;
    f.k = k;
    f.center = c.center;
    std::vector<double> a = c.covariance;
    std::vector<double> v;
    jacobi_eigen(a, v, k);
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x * k + x] > a[y * k + y]; });
    f.eigenvalues.resize(k);
    f.rotation.assign(k * k, 0.0);
    for (int col = 0; col < k; ++col) {
        f.eigenvalues[col] = a[order[col] * k + order[col]];
        for (int row = 0; row < k; ++row) f.rotation[row * k + col] = v[row * k + order[col]];
    }
    auto third_at = [&](int i, int j, int m) { return c.third.at(moment_key(i + 1, j + 1, m + 1)); };
    f.asymmetries.resize(k);
    for (int col = 0; col < k; ++col) {
        double s = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int m = 0; m < k; ++m)
                    s += f.rot(i, col) * f.rot(j, col) * f.rot(m, col) * third_at(i, j, m);
        if (s < -eps_num) {
            for (int row = 0; row < k; ++row) f.rotation[row * k + col] = -f.rot(row, col);
            s = -s;
        } else if (std::fabs(s) <= eps_num) {
            int big = 0;
            for (int row = 1; row < k; ++row)
                if (std::fabs(f.rot(row, col)) > std::fabs(f.rot(big, col))) big = row;
            if (f.rot(big, col) < 0.0)
                for (int row = 0; row < k; ++row) f.rotation[row * k + col] = -f.rot(row, col);
            s = std::fabs(s);
        }
        f.asymmetries[col] = s;
    }
    double l1 = f.eigenvalues[0];
    if (!(l1 > 0.0)) throw std::domain_error("normalize_moments: degenerate principal inertia");
    switch (policy) {
        case ScalePolicy::sqrt_inertia:
            // the full cube (inertia 1/12 per axis) is a fixed point
            f.scale = std::sqrt(1.0 / (12.0 * l1));
            break;
        case ScalePolicy::linear_inertia:
            f.scale = 1.0 / l1;
            break;
        case ScalePolicy::annex:
            f.scale = 1.0 / (6.0 * l1);
            break;
    }
    return f;
}

// Homogeneous matrix of the displacement into the Eigen frame:
// y = 0.5 + scale * V^T * (x - center).
inline HomogeneousMatrix eigen_displacement(const EigenFrame& f) {
    int k = f.k;
    HomogeneousMatrix m = HomogeneousMatrix::identity(k);
    for (int i = 0; i < k; ++i) {
        double t = 0.5;
        for (int j = 0; j < k; ++j) {
            m.at(i, j) = f.scale * f.rot(j, i);  // V^T
            t -= f.scale * f.rot(j, i) * f.center[j];
        }
        m.at(i, k) = t;
    }
    return m;
}

// Re-expresses t in its inertial reference frame: centered at the cube
// center, rotated to principal axes, scaled by the frame's policy, then
// reflected along any axis whose asymmetry is negative.
inline Tree eigen_tree(const Tree& t, const EigenFrame& frame, int k, int r_analysis, int r_build) {
    if (!(frame.eigenvalues.empty() ? false : frame.eigenvalues[0] > 0.0))
        throw std::domain_error("eigen_tree: degenerate frame");
    HomogeneousMatrix m = eigen_displacement(frame);
    Tree out = homographic_transform_fast(t, m, k, r_analysis, r_build);
    std::vector<bool> flags(k);
    bool any = false;
    for (int i = 0; i < k; ++i) {
        flags[i] = frame.asymmetries[i] < -eps_num;
        any = any || flags[i];
    }
    if (any) out = symmetry_tree(out, flags, k, r_build);
    return out;
}

inline Tree eigen_tree(const Tree& t, const EigenFrame& frame, int k, int r) {
    return eigen_tree(t, frame, k, r, r);
}

}  // namespace ktree
