#include <catch2/catch_amalgamated.hpp>

#include "ktree/metric.hpp"
#include "oracles.hpp"

using namespace ktree;

TEST_CASE("dyadic accumulation stays normalized") {
    Dyadic d;
    d += Dyadic::one_over_pow2(3);
    d += Dyadic::one_over_pow2(3);  // 1/4
    CHECK(d == Dyadic::one_over_pow2(2));
    d += Dyadic::one_over_pow2(2);  // 1/2
    d += Dyadic::one_over_pow2(1);  // 1
    CHECK(d.num == 1);
    CHECK(d.shift == 0);
    CHECK(d.to_double() == 1.0);
}

TEST_CASE("mass of terminals") {
    CHECK(mass(Tree(Color::white), 3, 4) == 0.0);
    CHECK(mass(Tree(Color::black), 3, 4) == 1.0);
}

TEST_CASE("mass matches the voxel count") {
    std::mt19937 rng(2001);
    for (int k = 1; k <= 3; ++k)
        for (int r = 1; r <= 3; ++r)
            for (int it = 0; it < 20; ++it) {
                auto g = oracle::random_voxels(k, r, rng);
                Tree t = oracle::voxels_to_tree(g);
                CHECK(mass(t, k, r) == oracle::mass_of(g));
            }
}

TEST_CASE("gray at the precision limit counts black") {
    Tree t(Color::white);
    t = add_int_vector(std::move(t), {1, 1}, 2, 2);  // one cell of 16
    CHECK(mass(t, 2, 2) == 1.0 / 16);
    CHECK(mass(t, 2, 1) == 1.0 / 4);  // its quadrant at r=1
}

TEST_CASE("distance identity d(A,B) = m(A) + m(B) - 2 m(A and B)") {
    std::mt19937 rng(2002);
    for (int it = 0; it < 500; ++it) {
        int k = 1 + it % 3, r = 1 + it % 3;
        Tree a = oracle::random_tree(k, r, rng), b = oracle::random_tree(k, r, rng);
        Dyadic lhs = hausdorff_exact(a, b, k, r);
        Dyadic rhs = mass_exact(a, k, r);
        rhs += mass_exact(b, k, r);
        Dyadic twice = mass_exact(tree_intersect(a, b, k, r), k, r);
        // lhs + 2*inter == m(A) + m(B), exactly
        Dyadic sum = lhs;
        sum += twice;
        sum += twice;
        CHECK(sum == rhs);
    }
}

TEST_CASE("distance axioms on random triples") {
    std::mt19937 rng(2003);
    int k = 2, r = 3;
    for (int it = 0; it < 50; ++it) {
        Tree a = oracle::random_tree(k, r, rng), b = oracle::random_tree(k, r, rng),
             c = oracle::random_tree(k, r, rng);
        double ab = hausdorff(a, b, k, r), ba = hausdorff(b, a, k, r);
        CHECK(ab == ba);
        CHECK(hausdorff(a, a, k, r) == 0.0);
        CHECK(ab <= hausdorff(a, c, k, r) + hausdorff(c, b, k, r));
        if (a != b) CHECK(ab > 0.0);
    }
}
