#include <catch2/catch_amalgamated.hpp>

#include "ktree/builder.hpp"
#include "ktree/metric.hpp"
#include "oracles.hpp"

using namespace ktree;

TEST_CASE("single integer vector blackens exactly its cell") {
    Tree t(Color::white);
    t = add_int_vector(std::move(t), {1, 2}, 2, 2);
    for (std::uint64_t x = 0; x < 4; ++x)
        for (std::uint64_t y = 0; y < 4; ++y)
            CHECK(contains(t, {x, y}, 2, 2) == (x == 1 && y == 2));
}

TEST_CASE("integer build matches the voxel oracle") {
    std::mt19937 rng(42);
    for (int k = 1; k <= 3; ++k)
        for (int r = 1; r <= 3; ++r) {
            auto g = oracle::random_voxels(k, r, rng);
            Tree t(Color::white);
            for (std::size_t i = 0; i < g.cells.size(); ++i)
                if (g.cells[i]) t = add_int_vector(std::move(t), g.coords(i), k, r);
            CHECK(oracle::tree_to_voxels(t, k, r) == g);
        }
}

TEST_CASE("insertion order does not matter") {
    std::mt19937 rng(43);
    auto g = oracle::random_voxels(2, 3, rng);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.cells[i]) order.push_back(i);
    Tree a(Color::white), b(Color::white);
    for (auto i : order) a = add_int_vector(std::move(a), g.coords(i), 2, 3);
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) b = add_int_vector(std::move(b), g.coords(i), 2, 3);
    CHECK(a == b);
}

TEST_CASE("out-of-range coordinates are rejected") {
    Tree t(Color::white);
    CHECK_THROWS_AS(add_int_vector(std::move(t), {4, 0}, 2, 2), std::out_of_range);
    Tree u(Color::white);
    CHECK_THROWS_AS(add_int_vector(std::move(u), {0}, 2, 2), std::invalid_argument);
}

TEST_CASE("real vectors quantize by floor(v * 2^r)") {
    std::mt19937 rng(44);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        int k = 1 + it % 3, r = 1 + it % 4;
        RealVector v(k);
        for (auto& x : v) x = std::min(uni(rng), 0.999999);
        Tree t(Color::white);
        t = add_real_vector(std::move(t), v, k, r);
        IntVector cell(k);
        for (int i = 0; i < k; ++i) cell[i] = std::uint64_t(std::floor(v[i] * std::exp2(r)));
        CHECK(contains(t, cell, k, r));
        CHECK(mass(t, k, r) == std::exp2(-double(k * r)));
    }
}

TEST_CASE("exact midpoint goes right") {
    Tree t(Color::white);
    t = add_real_vector(std::move(t), {0.5}, 1, 1);
    CHECK(contains(t, IntVector{1}, 1, 1));
    CHECK_FALSE(contains(t, IntVector{0}, 1, 1));
}

TEST_CASE("real coordinates outside [0,1) are rejected") {
    Tree t(Color::white);
    CHECK_THROWS_AS(add_real_vector(std::move(t), {1.0}, 1, 2), std::out_of_range);
    Tree u(Color::white);
    CHECK_THROWS_AS(add_real_vector(std::move(u), {-0.1}, 1, 2), std::out_of_range);
}

TEST_CASE("grow_bounds doubles away from the data") {
    RefBox b = RefBox::unit(1);
    RefBox g = grow_bounds(b, {-0.25});
    CHECK(g.min[0] == -1.0);
    CHECK(g.max[0] == 1.0);
}

TEST_CASE("grow_bounds equalizes spans across axes") {
    RefBox b = RefBox::unit(2);
    RefBox g = grow_bounds(b, {1.5, 0.2});
    CHECK(g.min == std::vector<double>{0.0, 0.0});
    CHECK(g.max == std::vector<double>{2.0, 2.0});
}

TEST_CASE("grow_bounds keeps a containing box untouched") {
    RefBox b = RefBox::unit(3);
    CHECK(grow_bounds(b, {0.1, 0.9, 0.5}) == b);
}

TEST_CASE("grow_bounds result contains box and vector with power-of-2 span") {
    std::mt19937 rng(45);
    std::uniform_real_distribution<double> uni(-100.0, 100.0);
    for (int it = 0; it < 200; ++it) {
        int k = 1 + it % 3;
        RefBox b = RefBox::unit(k);
        RealVector v(k);
        for (auto& x : v) x = uni(rng);
        RefBox g = grow_bounds(b, v);
        CHECK(g.contains(v));
        for (int i = 0; i < k; ++i) {
            CHECK(g.min[i] <= b.min[i]);
            CHECK(g.max[i] >= b.max[i]);
            CHECK(g.span(i) == g.span(0));
        }
        double m = std::log2(g.span(0));
        CHECK(m == std::floor(m));
    }
}

TEST_CASE("extend_tree keeps the black set in place") {
    Tree t(Color::white);
    t = add_real_vector(std::move(t), {0.25, 0.75}, 2, 2);
    RefBox old = RefBox::unit(2);
    RefBox grown = grow_bounds(old, {-0.5, 0.0});  // [-1,1]^2
    Tree e = extend_tree(t, old, grown, 2);
    // the old cell [0.25,0.5)x[0.75,1) sits inside the extended tree at a
    // depth 2 levels lower; check by point membership after renormalizing
    RealVector p{0.3, 0.8};
    RealVector u(2);
    for (int i = 0; i < 2; ++i) u[i] = (p[i] - grown.min[i]) / grown.span(i);
    Tree probe(Color::white);
    probe = add_real_vector(std::move(probe), u, 2, 3);
    CHECK(tree_intersect(e, probe, 2, 3) == probe);
    CHECK(mass(e, 2, 4) == mass(t, 2, 2) / 4.0);  // area preserved, box 4x larger
}

TEST_CASE("extend_tree rejects non-nested boxes") {
    Tree t(Color::black);
    RefBox old = RefBox::unit(1);
    RefBox bad;
    bad.min = {0.3};
    bad.max = {2.3};
    CHECK_THROWS_AS(extend_tree(t, old, bad, 1), std::invalid_argument);
}

TEST_CASE("add_with_growth absorbs outside points") {
    Tree t(Color::white);
    RefBox box = RefBox::unit(2);
    auto [t1, b1] = add_with_growth(std::move(t), box, {0.2, 0.3}, 2, 3);
    auto [t2, b2] = add_with_growth(std::move(t1), b1, {1.7, -0.4}, 2, 3);
    CHECK(b2.contains({0.2, 0.3}));
    CHECK(b2.contains({1.7, -0.4}));
    for (RealVector p : {RealVector{0.2, 0.3}, RealVector{1.7, -0.4}}) {
        RealVector u(2);
        for (int i = 0; i < 2; ++i) u[i] = (p[i] - b2.min[i]) / b2.span(i);
        IntVector cell(2);
        for (int i = 0; i < 2; ++i) cell[i] = std::uint64_t(std::floor(u[i] * 8));
        CHECK(contains(t2, cell, 2, 3));
    }
}
