#pragma once

#include <cstdint>
#include <stdexcept>

#include "ktree/boolean.hpp"
#include "ktree/core.hpp"

// Hypervolume (mass) and the XOR-mass distance between trees. Masses are
// accumulated as exact integer multiples of 2^-depth so that distance
// identities hold without floating error.

namespace ktree {

// Nonnegative dyadic rational num / 2^shift, kept normalized.
struct Dyadic {
    unsigned __int128 num = 0;
    int shift = 0;

    void normalize() {
        while (shift > 0 && (num & 1u) == 0 && num != 0) {
            num >>= 1;
            --shift;
        }
        if (num == 0) shift = 0;
    }

    static Dyadic one_over_pow2(int p) {
        Dyadic d;
        d.num = 1;
        d.shift = p;
        return d;
    }

    Dyadic& operator+=(Dyadic o) {
        int s = shift > o.shift ? shift : o.shift;
        if (s > 120) throw std::overflow_error("Dyadic: depth beyond exact range");
        num <<= (s - shift);
        num += o.num << (s - o.shift);
        shift = s;
        normalize();
        return *this;
    }

    double to_double() const {
        // shift <= 120 keeps the conversion in long double range; masses of
        // interest are sums of few distinct powers so the value is exact
        // whenever it fits 53 mantissa bits.
        long double v = static_cast<long double>(num);
        for (int i = 0; i < shift; ++i) v /= 2.0L;
        return static_cast<double>(v);
    }

    friend bool operator==(const Dyadic& a, const Dyadic& b) {
        return a.num == b.num && a.shift == b.shift;
    }
};

namespace detail {

inline void mass_rec(const Node* n, int level, int depth, Dyadic& acc) {
    if (n->terminal()) {
        if (n->color == Color::black) acc += Dyadic::one_over_pow2(level);
        return;
    }
    if (level == depth) {
        acc += Dyadic::one_over_pow2(level);  // gray at the limit counts full
        return;
    }
    mass_rec(n->left.get(), level + 1, depth, acc);
    mass_rec(n->right.get(), level + 1, depth, acc);
}

}  // namespace detail

inline Dyadic mass_exact(const Tree& t, int k, int r) {
    Dyadic acc;
    detail::mass_rec(t.root(), 0, k * r, acc);
    return acc;
}

inline double mass(const Tree& t, int k, int r) { return mass_exact(t, k, r).to_double(); }

inline Dyadic hausdorff_exact(const Tree& a, const Tree& b, int k, int r) {
    return mass_exact(tree_xor(a, b, k, r), k, r);
}

// d(A, B) as the measure of the symmetric difference at precision r.
inline double hausdorff(const Tree& a, const Tree& b, int k, int r) {
    return hausdorff_exact(a, b, k, r).to_double();
}

}  // namespace ktree
