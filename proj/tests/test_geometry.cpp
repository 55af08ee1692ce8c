#include <catch2/catch_amalgamated.hpp>

#include "ktree/geometry.hpp"
#include "ktree/metric.hpp"
#include "oracles.hpp"

using namespace ktree;

namespace {

// polytope of the axis-aligned box [lo, hi]: matrix mapping the box to the
// unit cube
HomogeneousMatrix box_to_cube(const std::vector<double>& lo, const std::vector<double>& hi) {
    int k = int(lo.size());
    HomogeneousMatrix m = HomogeneousMatrix::identity(k);
    for (int i = 0; i < k; ++i) {
        m.at(i, i) = 1.0 / (hi[i] - lo[i]);
        m.at(i, k) = -lo[i] / (hi[i] - lo[i]);
    }
    return m;
}

}  // namespace

TEST_CASE("matrix inverse round trip") {
    std::mt19937 rng(4001);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    for (int it = 0; it < 50; ++it) {
        int k = 1 + it % 3;
        HomogeneousMatrix m = HomogeneousMatrix::identity(k);
        for (int i = 0; i < k; ++i) {
            m.at(i, i) = 1.0 + std::fabs(uni(rng));
            m.at(i, k) = uni(rng);
        }
        HomogeneousMatrix p = multiply(m, invert(m));
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j)
                CHECK(std::fabs(p.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("aligned boxes with 2^-r corners rasterize exactly") {
    std::mt19937 rng(4002);
    for (int it = 0; it < 40; ++it) {
        int k = 1 + it % 3, r = 2;
        std::uint64_t side = 1u << r;
        std::vector<double> lo(k), hi(k);
        std::vector<std::uint64_t> clo(k), chi(k);
        for (int i = 0; i < k; ++i) {
            clo[i] = rng() % (side - 1);
            chi[i] = clo[i] + 1 + rng() % (side - clo[i] - 1);
            lo[i] = double(clo[i]) / side;
            hi[i] = double(chi[i]) / side;
        }
        Polytope p = transform_polytope_of(box_to_cube(lo, hi), k);
        Tree t = polytope_tree(p, k, r);
        auto g = oracle::tree_to_voxels(t, k, r);
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            auto c = g.coords(i);
            bool inside = true;
            for (int a = 0; a < k; ++a) inside = inside && c[a] >= clo[a] && c[a] < chi[a];
            CHECK(g.cells[i] == inside);
        }
    }
}

TEST_CASE("rotated square rasterizes within a perimeter-bounded error") {
    // square of side 0.5 centered at (0.5, 0.5), rotated 30 degrees
    int k = 2, r = 6;
    double a = 30.0 * std::acos(-1.0) / 180.0;
    double c = std::cos(a), s = std::sin(a);
    // maps the square to the unit cube: rotate back about center then scale
    HomogeneousMatrix rot = HomogeneousMatrix::identity(k);
    rot.at(0, 0) = c;
    rot.at(0, 1) = s;
    rot.at(0, 2) = 0.5 - 0.5 * c - 0.5 * s;
    rot.at(1, 0) = -s;
    rot.at(1, 1) = c;
    rot.at(1, 2) = 0.5 + 0.5 * s - 0.5 * c;
    HomogeneousMatrix sc = box_to_cube({0.25, 0.25}, {0.75, 0.75});
    Polytope p = transform_polytope_of(multiply(sc, rot), k);
    Tree t = polytope_tree(p, k, r);
    // dense 4x supersampled reference mass of the square
    double w = std::exp2(-r);
    double err = 0.0;
    auto g = oracle::tree_to_voxels(t, k, r);
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        auto cc = g.coords(i);
        int in = 0;
        for (int sx = 0; sx < 4; ++sx)
            for (int sy = 0; sy < 4; ++sy) {
                double x = (cc[0] + (sx + 0.5) / 4) * w, y = (cc[1] + (sy + 0.5) / 4) * w;
                double u = c * (x - 0.5) + s * (y - 0.5), v = -s * (x - 0.5) + c * (y - 0.5);
                if (std::fabs(u) <= 0.25 && std::fabs(v) <= 0.25) ++in;
            }
        double frac = in / 16.0;
        err += std::fabs((g.cells[i] ? 1.0 : 0.0) - frac) * w * w;
    }
    CHECK(err <= 8.0 * 2.0 * w);  // 8 * perimeter * cell width
}

TEST_CASE("identity transform reproduces the tree") {
    std::mt19937 rng(4003);
    for (int it = 0; it < 20; ++it) {
        int k = 1 + it % 3, r = 2;
        Tree t = oracle::random_tree(k, r, rng);
        HomogeneousMatrix id = HomogeneousMatrix::identity(k);
        CHECK(homographic_transform_fast(t, id, k, r) == assert_tree(t, k, r));
        CHECK(homographic_transform(t, transform_polytope_of(id, k), k, r) == assert_tree(t, k, r));
    }
}

TEST_CASE("one-cell translations match the voxel permutation") {
    std::mt19937 rng(4004);
    int k = 2;
    for (int r = 1; r <= 4; ++r)
        for (int it = 0; it < 8; ++it) {
            auto g = oracle::random_voxels(k, r, rng);
            Tree t = oracle::voxels_to_tree(g);
            int axis = it % 2;
            double step = std::exp2(-r);
            HomogeneousMatrix tr = HomogeneousMatrix::identity(k);
            tr.at(axis, k) = step;
            Tree out = homographic_transform_fast(t, tr, k, r);
            oracle::VoxelGrid expect(k, r);
            for (std::size_t i = 0; i < g.cells.size(); ++i) {
                if (!g.cells[i]) continue;
                auto c = g.coords(i);
                c[axis] += 1;
                if (c[axis] < g.side()) expect.cells[expect.index(c)] = true;
            }
            CHECK(oracle::tree_to_voxels(out, k, r) == expect);
        }
}

TEST_CASE("quarter-turn rotations match the voxel permutation") {
    std::mt19937 rng(4005);
    int k = 2;
    for (int r = 1; r <= 4; ++r)
        for (int it = 0; it < 8; ++it) {
            auto g = oracle::random_voxels(k, r, rng);
            Tree t = oracle::voxels_to_tree(g);
            // (x, y) -> (1 - y, x), about the cube center
            HomogeneousMatrix rot = HomogeneousMatrix::identity(k);
            rot.at(0, 0) = 0;
            rot.at(0, 1) = -1;
            rot.at(0, 2) = 1;
            rot.at(1, 0) = 1;
            rot.at(1, 1) = 0;
            rot.at(1, 2) = 0;
            Tree out = homographic_transform_fast(t, rot, k, r);
            oracle::VoxelGrid expect(k, r);
            for (std::size_t i = 0; i < g.cells.size(); ++i) {
                if (!g.cells[i]) continue;
                auto c = g.coords(i);
                expect.cells[expect.index({g.side() - 1 - c[1], c[0]})] = true;
            }
            CHECK(oracle::tree_to_voxels(out, k, r) == expect);
        }
}

TEST_CASE("fast and reference transforms agree on random similarities") {
    std::mt19937 rng(4006);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int k = 2, r = 3;
    for (int it = 0; it < 50; ++it) {
        Tree t = oracle::random_tree(k, r, rng);
        double a = uni(rng) * 2 * std::acos(-1.0);
        double s = 0.5 + uni(rng);
        HomogeneousMatrix m = HomogeneousMatrix::identity(k);
        m.at(0, 0) = s * std::cos(a);
        m.at(0, 1) = -s * std::sin(a);
        m.at(1, 0) = s * std::sin(a);
        m.at(1, 1) = s * std::cos(a);
        m.at(0, 2) = uni(rng) - 0.3;
        m.at(1, 2) = uni(rng) - 0.3;
        Tree fast = homographic_transform_fast(t, m, k, r);
        Tree slow = homographic_transform(t, transform_polytope_of(m, k), k, r);
        CHECK(fast == slow);
    }
}

TEST_CASE("symmetry is an involution matching the voxel flip") {
    std::mt19937 rng(4007);
    for (int it = 0; it < 30; ++it) {
        int k = 1 + it % 3, r = 2;
        auto g = oracle::random_voxels(k, r, rng);
        Tree t = oracle::voxels_to_tree(g);
        std::vector<bool> flags(k);
        for (int i = 0; i < k; ++i) flags[i] = rng() % 2;
        Tree s = symmetry_tree(t, flags, k, r);
        CHECK(symmetry_tree(s, flags, k, r) == t);
        auto gs = oracle::tree_to_voxels(s, k, r);
        for (std::size_t i = 0; i < g.cells.size(); ++i) {
            auto c = g.coords(i);
            for (int a = 0; a < k; ++a)
                if (flags[a]) c[a] = g.side() - 1 - c[a];
            CHECK(gs.cells[gs.index(c)] == bool(g.cells[i]));
        }
    }
}

TEST_CASE("remove_hidden keeps the nearest cell of each line") {
    std::mt19937 rng(4008);
    for (int it = 0; it < 30; ++it) {
        int k = 2, r = 3;
        auto g = oracle::random_voxels(k, r, rng);
        Tree t = oracle::voxels_to_tree(g);
        int elim = 1 + int(rng() % 2);
        Tree vis = remove_hidden(t, elim, k, r);
        auto gv = oracle::tree_to_voxels(vis, k, r);
        int a = elim - 1, o = 1 - a;
        for (std::uint64_t line = 0; line < g.side(); ++line) {
            bool seen = false;
            for (std::uint64_t depth = 0; depth < g.side(); ++depth) {
                std::vector<std::uint64_t> c(2);
                c[a] = depth;
                c[o] = line;
                bool black = g.cells[g.index(c)];
                bool keep = black && !seen;
                seen = seen || black;
                CHECK(gv.cells[gv.index(c)] == keep);
            }
        }
    }
}

TEST_CASE("projection matches the voxel OR") {
    std::mt19937 rng(4009);
    for (int it = 0; it < 30; ++it) {
        int k = 2 + it % 2, r = 2;
        auto g = oracle::random_voxels(k, r, rng);
        Tree t = oracle::voxels_to_tree(g);
        int view = 1 + int(rng() % k);
        Tree pr = project(t, view, k, r);
        auto gp = oracle::tree_to_voxels(pr, k - 1, r);
        for (std::size_t i = 0; i < gp.cells.size(); ++i) {
            auto pc = gp.coords(i);
            bool any = false;
            for (std::uint64_t d = 0; d < g.side(); ++d) {
                std::vector<std::uint64_t> c(k);
                int pi = 0;
                for (int axis = 0; axis < k; ++axis)
                    c[axis] = (axis == view - 1) ? d : pc[pi++];
                any = any || g.cells[g.index(c)];
            }
            CHECK(gp.cells[i] == any);
        }
    }
}

TEST_CASE("projective transform with nontrivial weight row") {
    // x' = x / (1 + 0.5 x): keeps [0,1] inside [0, 2/3]
    int k = 1, r = 4;
    HomogeneousMatrix m = HomogeneousMatrix::identity(k);
    m.at(1, 0) = 0.5;
    Tree full(Color::black);
    Tree out = homographic_transform_fast(full, m, k, r);
    double got = mass(out, k, r);
    CHECK(got >= 2.0 / 3.0 - 1e-9);
    CHECK(got <= 2.0 / 3.0 + 2 * std::exp2(-r));
}

TEST_CASE("degenerate matrices are rejected") {
    HomogeneousMatrix z = HomogeneousMatrix::identity(2);
    z.at(0, 0) = 0;
    z.at(1, 1) = 0;
    z.at(0, 1) = 0;
    z.at(1, 0) = 0;
    CHECK_THROWS_AS(invert(z), std::invalid_argument);
}
