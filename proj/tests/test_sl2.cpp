#include <gtest/gtest.h>

#include <cmath>

#include <tsf/tsf.hpp>

#include "oracles.hpp"

using namespace tsf;

namespace {

GroupElement random_det1(Stream& rng, double range) {
    for (;;) {
        GroupElement g{rng.uniform(-range, range), rng.uniform(-range, range), rng.uniform(-range, range),
                       rng.uniform(-range, range)};
        double d = g.det();
        if (std::abs(d) < 1e-3) continue;
        if (d < 0) {  // flip a column to make the determinant positive
            g.a12 = -g.a12;
            g.a22 = -g.a22;
            d = -d;
        }
        const double s = 1.0 / std::sqrt(d);
        return {g.a11 * s, g.a12 * s, g.a21 * s, g.a22 * s};
    }
}

TranslationSurface unit_torus() { return catalog_surface("torus"); }

}  // namespace

TEST(Generator, AZeroIsIdentity) { EXPECT_EQ(generator(Generator::A, 0).max_abs_diff({}), 0.0); }

TEST(Generator, QuarterRotation) {
    const auto r = generator(Generator::R, pi / 2);
    EXPECT_LT(r.max_abs_diff({0, -1, 1, 0}), 1e-15);
}

TEST(Generator, UTimesA) {
    const auto g = generator(Generator::U, 1) * generator(Generator::A, std::log(2.0));
    // ((1,1),(0,1)) ((2,0),(0,1/2)) = ((2,1/2),(0,1/2))
    EXPECT_LT(g.max_abs_diff({2, 0.5, 0, 0.5}), 1e-15);
}

TEST(Kak, Identity) {
    const auto k = kak({});
    EXPECT_EQ(k.theta1, 0.0);
    EXPECT_EQ(k.t, 0.0);
    EXPECT_EQ(k.theta2, 0.0);
}

TEST(Kak, A3) {
    const auto k = kak(a_t(3));
    EXPECT_NEAR(k.theta1, 0.0, 1e-12);
    EXPECT_NEAR(k.t, 3.0, 1e-12);
    EXPECT_NEAR(k.theta2, 0.0, 1e-12);
}

TEST(Kak, U1SingularValueOracle) {
    const auto k = kak(u_s(1));
    const double sv = oracle::top_singular_value(1, 1, 0, 1);
    EXPECT_NEAR(sv, std::sqrt((3 + std::sqrt(5.0)) / 2), 1e-14);
    EXPECT_NEAR(std::exp(k.t), sv, 1e-12);
    EXPECT_LT(k.compose().max_abs_diff(u_s(1)), 1e-12);
}

TEST(Kak, PureRotationPutsEverythingInTheta1) {
    const auto k = kak(r_theta(2.0));
    EXPECT_EQ(k.t, 0.0);
    EXPECT_EQ(k.theta2, 0.0);
    EXPECT_NEAR(k.theta1, 2.0, 1e-12);
}

TEST(Kak, RoundTripOnRandomMatrices) {
    Stream rng(5);
    for (int i = 0; i < 1000; ++i) {
        const GroupElement g = random_det1(rng, 10);
        const auto k = kak(g);
        EXPECT_GE(k.t, 0.0);
        EXPECT_GE(k.theta1, 0.0);
        EXPECT_LT(k.theta1, two_pi);
        EXPECT_GE(k.theta2, 0.0);
        EXPECT_LT(k.theta2, two_pi);
        EXPECT_LT(k.compose().max_abs_diff(g), 1e-9) << i;
        EXPECT_NEAR(std::exp(k.t), oracle::top_singular_value(g.a11, g.a12, g.a21, g.a22), 1e-9 * std::exp(k.t));
    }
}

TEST(Act, IdentityKeepsTorus) {
    const auto s = unit_torus();
    const auto m = act({}, s);
    EXPECT_EQ(m.polygons[0].vertices, s.polygons[0].vertices);
}

TEST(Act, AtGivesRectangle) {
    const auto m = act(a_t(0.5), unit_torus());
    EXPECT_NEAR(norm(m.polygons[0].edge(0)), std::exp(0.5), 1e-14);
    EXPECT_NEAR(norm(m.polygons[0].edge(1)), std::exp(-0.5), 1e-14);
}

TEST(Act, RotationKeepsSystoleAndArea) {
    const auto s = normalize_area(catalog_surface("octagon"));
    const auto m = act(r_theta(0.37), s);
    EXPECT_NEAR(area(m), area(s), 1e-12);
    EXPECT_NEAR(systole(m), systole(s), 1e-9);
}

TEST(Act, IsAGroupAction) {
    Stream rng(17);
    for (const auto& name : {"torus", "octagon", "l-origami"}) {
        const auto s = catalog_surface(name);
        for (int i = 0; i < 20; ++i) {
            const auto g1 = random_det1(rng, 2), g2 = random_det1(rng, 2);
            const auto a = periods(act(g2 * g1, s));
            const auto b = periods(act(g2, act(g1, s)));
            ASSERT_EQ(a.k(), b.k());
            for (int j = 0; j < a.k(); ++j) {
                EXPECT_NEAR(a.columns[j].x, b.columns[j].x, 1e-9);
                EXPECT_NEAR(a.columns[j].y, b.columns[j].y, 1e-9);
            }
        }
    }
}

TEST(RequireSl2, RejectsWrongDeterminant) {
    EXPECT_THROW(require_sl2({2, 0, 0, 1}), validation_error);
    EXPECT_NO_THROW(require_sl2(u_s(3) * a_t(2)));
}

// ---- torus_reduce

TEST(TorusReduce, SquareTorusUnchanged) {
    const auto [s, rec] = torus_reduce(unit_torus());
    EXPECT_EQ(rec.matrix, (IntMat2{1, 0, 0, 1}));
    const auto [c1, c2] = torus_periods(s);
    EXPECT_NEAR(c1.x, 1, 1e-15);
    EXPECT_NEAR(c1.y, 0, 1e-15);
    EXPECT_NEAR(c2.x, 0, 1e-15);
    EXPECT_NEAR(c2.y, 1, 1e-15);
}

TEST(TorusReduce, A3GivesSystoleEMinus3) {
    const auto x = act(a_t(3), unit_torus());
    const auto [s, rec] = torus_reduce(x);
    const auto [c1, c2] = torus_periods(s);
    const auto [v1, v2] = torus_periods(x);
    EXPECT_NEAR(norm(c1), oracle::shortest_vector({v1.x, v1.y}, {v2.x, v2.y}, 50), 1e-15);
    EXPECT_NEAR(norm(c1), std::exp(-3.0), 1e-15);
    EXPECT_EQ(std::abs(rec.matrix.det()), 1);
    EXPECT_EQ(rec.matrix.det(), 1);
}

TEST(TorusReduce, U5ReturnsToSquare) {
    const auto [s, rec] = torus_reduce(act(u_s(5), unit_torus()));
    EXPECT_EQ(rec.matrix, (IntMat2{1, -5, 0, 1}));
    const auto [c1, c2] = torus_periods(s);
    EXPECT_NEAR(c1.x, 1, 1e-12);
    EXPECT_NEAR(c1.y, 0, 1e-12);
    EXPECT_NEAR(c2.x, 0, 1e-12);
    EXPECT_NEAR(c2.y, 1, 1e-12);
}

TEST(TorusReduce, RecordMapsOldBasisToNew) {
    Stream rng(8);
    for (int i = 0; i < 200; ++i) {
        const auto x = act(random_det1(rng, 4), unit_torus());
        const auto [v1, v2] = torus_periods(x);
        const auto [s, rec] = torus_reduce(x);
        const auto [c1, c2] = torus_periods(s);
        const auto& m = rec.matrix;
        const Vec2 n1 = v1 * static_cast<double>(m.m11) + v2 * static_cast<double>(m.m21);
        const Vec2 n2 = v1 * static_cast<double>(m.m12) + v2 * static_cast<double>(m.m22);
        EXPECT_NEAR(n1.x, c1.x, 1e-9);
        EXPECT_NEAR(n1.y, c1.y, 1e-9);
        EXPECT_NEAR(n2.x, c2.x, 1e-9);
        EXPECT_NEAR(n2.y, c2.y, 1e-9);
        EXPECT_EQ(std::abs(m.det()), 1);
        EXPECT_NEAR(norm(c1), oracle::shortest_vector({v1.x, v1.y}, {v2.x, v2.y}, 60), 1e-9);
        EXPECT_GT(cross(c1, c2), 0.0);
        // reduced: |dot| <= |c1|^2 / 2 and |c2| >= |c1|
        EXPECT_LE(std::abs(dot(c1, c2)), 0.5 * norm2(c1) + 1e-9);
        EXPECT_GE(norm(c2), norm(c1) - 1e-12);
    }
}

TEST(TorusReduce, CocycleComposesAlongPaths) {
    Stream rng(31);
    for (int i = 0; i < 100; ++i) {
        const auto g1 = random_det1(rng, 3), g2 = random_det1(rng, 3);
        const auto x = unit_torus();
        const auto [y, r1] = torus_reduce(act(g1, x));
        const auto [z, r2] = torus_reduce(act(g2, y));
        const auto [direct, r12] = torus_reduce(act(g2, act(g1, x)));
        EXPECT_EQ(r1.matrix * r2.matrix, r12.matrix) << i;
    }
}

TEST(TorusReduce, DegenerateLatticeRejected) {
    EXPECT_THROW(reduce_lattice({1, 0}, {2, 1e-14}), validation_error);
}

TEST(TorusReduce, RejectsHigherGenus) { EXPECT_THROW(torus_reduce(catalog_surface("octagon")), validation_error); }
