#include <gtest/gtest.h>

#include <numeric>

#include <tsf/tsf.hpp>

#include "oracles.hpp"

using namespace tsf;

namespace {

const char* polygon_names[] = {"square-billiard", "right-isosceles", "triangle-pi5", "triangle-pi8"};

RationalPolygon polygon(const std::string& name) { return std::get<RationalPolygon>(catalog_load(name)); }

// Order of the group generated by the linear parts of the edge reflections, by closing
// 2x2 matrices numerically.
std::size_t reflection_group_order(const RationalPolygon& q) {
    using M = std::array<double, 4>;
    std::vector<M> gens;
    for (std::size_t i = 0; i < q.vertices.size(); ++i) {
        const Vec2 e = q.vertices[(i + 1) % q.vertices.size()] - q.vertices[i];
        const double a = std::atan2(e.y, e.x);
        gens.push_back({std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a)});
    }
    auto mul = [](const M& x, const M& y) {
        return M{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]};
    };
    auto same = [](const M& x, const M& y) {
        for (int k = 0; k < 4; ++k)
            if (std::abs(x[k] - y[k]) > 1e-9) return false;
        return true;
    };
    std::vector<M> elems{{1, 0, 0, 1}};
    for (std::size_t k = 0; k < elems.size() && elems.size() < 10000; ++k)
        for (const auto& g : gens) {
            const M h = mul(elems[k], g);
            if (std::none_of(elems.begin(), elems.end(), [&](const M& e) { return same(e, h); })) elems.push_back(h);
        }
    return elems.size();
}

// Zero orders from the angles alone: a vertex of angle (p/q) pi becomes N/q cone points of
// angle 2 pi p on the unfolding (N = lcm of the q's).
std::vector<int> stratum_from_angles(const RationalPolygon& q) {
    long long N = 1;
    for (auto a : q.angles) N = std::lcm(N, a.q);
    std::vector<int> alpha;
    for (auto a : q.angles)
        if (a.p > 1)
            for (long long k = 0; k < N / a.q; ++k) alpha.push_back(static_cast<int>(a.p - 1));
    std::sort(alpha.rbegin(), alpha.rend());
    return alpha;
}

// N(e^s) on the unfolded unit square: cylinders of the 2Z^2 torus, one per +- primitive class
long long square_count(double T) {
    return static_cast<long long>(oracle::primitive_in_disk({2, 0}, {0, 2}, T, static_cast<long long>(T) + 2).size());
}

}  // namespace

TEST(ParsePolygon, RoundTrip) {
    for (const auto& name : polygon_names) {
        const auto q = polygon(name);
        const auto r = parse_polygon(write_polygon(q));
        ASSERT_EQ(r.vertices.size(), q.vertices.size());
        for (std::size_t i = 0; i < q.vertices.size(); ++i) {
            EXPECT_EQ(r.vertices[i].x, q.vertices[i].x);
            EXPECT_EQ(r.vertices[i].y, q.vertices[i].y);
            EXPECT_EQ(r.angles[i].p, q.angles[i].p);
            EXPECT_EQ(r.angles[i].q, q.angles[i].q);
        }
    }
}

TEST(ParsePolygon, Errors) {
    EXPECT_THROW(parse_polygon("format poly 1\nvertex 0 0\nvertex 1 0\nvertex 0 1\nangles 1/2 2/8 1/4\n"), parse_error);
    EXPECT_THROW(parse_polygon("format poly 1\nvertex 0 0\nvertex 1 0\nvertex 0 1\nangles 1/2 1/4\n"), parse_error);
    EXPECT_THROW(parse_polygon("format poly 1\nvertex 0 0\nvertex 1 0\nvertex 0 1\n"), parse_error);
    EXPECT_THROW(parse_polygon("format poly 1\nvertex 0 0\nvertex 1 0\nvertex 0 1\nangles 1/2 1/4 x\n"), parse_error);
}

TEST(Unfold, SquareIsTheDoubledTorus) {
    const auto s = unfold(polygon("square-billiard"));
    EXPECT_EQ(s.polygons.size(), 4u);
    EXPECT_NEAR(area(s), 4.0, 1e-12);
    EXPECT_EQ(stratum_of(s).genus, 1);
    const auto [v1, v2] = torus_periods(s);
    EXPECT_NEAR(systole(s), oracle::shortest_vector({v1.x, v1.y}, {v2.x, v2.y}, 10), 1e-12);
    EXPECT_NEAR(systole(s), 2.0, 1e-12);
    EXPECT_NEAR(std::abs(cross(v1, v2)), 4.0, 1e-12);
}

TEST(Unfold, RightIsosceles) {
    const auto q = polygon("right-isosceles");
    const auto s = unfold(q);
    EXPECT_EQ(s.polygons.size(), 8u);
    std::vector<oracle::P> pts;
    for (auto v : q.vertices) pts.push_back({v.x, v.y});
    EXPECT_NEAR(area(s), 8 * oracle::shoelace(pts), 1e-12);
    EXPECT_NEAR(area(s), 4.0, 1e-12);
    EXPECT_EQ(stratum_of(s).genus, 1);
}

TEST(Unfold, StrataFromConeAngles) {
    for (const auto& name : polygon_names) {
        const auto q = polygon(name);
        EXPECT_EQ(stratum_of(unfold(q)).alpha, stratum_from_angles(q)) << name;
    }
    EXPECT_EQ(stratum_from_angles(polygon("triangle-pi5")), std::vector<int>{2});
    EXPECT_EQ(stratum_of(unfold(polygon("triangle-pi5"))).genus, 2);
}

TEST(Unfold, ValidClosedSurfaces) {
    for (const auto& name : polygon_names) {
        const auto s = unfold(polygon(name));
        EXPECT_TRUE(validate_surface(s).valid()) << name;
    }
}

TEST(Unfold, GroupOrderIsTwiceLcm) {
    for (const auto& name : polygon_names) {
        const auto q = polygon(name);
        long long N = 1;
        for (auto a : q.angles) N = std::lcm(N, a.q);
        EXPECT_EQ(reflection_group_order(q), static_cast<std::size_t>(2 * N)) << name;
        EXPECT_EQ(unfolding_copies(q), static_cast<std::size_t>(2 * N)) << name;
    }
}

TEST(Unfold, IrrationalAngleRejected) {
    // 3-4-5 triangle declared with angles that do not fit its geometry
    const auto q = parse_polygon("format poly 1\nvertex 0 0\nvertex 4 0\nvertex 0 3\nangles 1/2 1/5 3/10\n");
    EXPECT_THROW(unfold(q), validation_error);
}

TEST(Unfold, GroupCapGuard) { EXPECT_THROW(unfold(polygon("triangle-pi8"), 8), cap_exceeded); }

TEST(BilliardCount, SquareExamples) {
    const auto q = polygon("square-billiard");
    EXPECT_EQ(square_count(1.9), 0);
    EXPECT_EQ(billiard_count(q, 1.9), 0);
    EXPECT_EQ(square_count(2.0), 2);
    EXPECT_EQ(billiard_count(q, 2.0), 2);
}

TEST(BilliardCount, SquareMatchesLatticeOracle) {
    const auto q = polygon("square-billiard");
    for (double T : {3.0, 4.5, 10.0, 25.0, 60.0}) EXPECT_EQ(billiard_count(q, T), square_count(T)) << T;
}

TEST(BilliardCount, MonotoneInT) {
    for (const auto& name : polygon_names) {
        const auto w = cylinder_waists(unfold(polygon(name)), 40.0);
        long long prev = 0;
        for (double T = 1.0; T <= 40.0; T += 1.0) {
            const long long n = count_at_most(w, T);
            EXPECT_GE(n, prev) << name;
            prev = n;
        }
    }
}

TEST(CesaroSv, MatchesDirectIntegrationOfTheOracleCount) {
    const auto series = cesaro_sv(polygon("square-billiard"), 5.0, 50);
    ASSERT_EQ(series.points.size(), 50u);
    // trapezoid rule on the same grid, written out against the lattice count
    const double h = 0.1;
    double acc = 0.0;
    double prev = static_cast<double>(square_count(1.0));
    for (int i = 1; i <= 50; ++i) {
        const double s = i * h;
        const double cur = static_cast<double>(square_count(std::exp(s))) * std::exp(-2 * s);
        acc += 0.5 * h * (prev + cur);
        prev = cur;
        EXPECT_NEAR(series.points[static_cast<std::size_t>(i - 1)].t, s, 1e-12);
        EXPECT_NEAR(series.points[static_cast<std::size_t>(i - 1)].value, acc / s, 1e-12) << i;
    }
}

TEST(CesaroSv, SquareConstantFromLatticeCount) {
    // N(T) on 2Z^2 grows like 3 T^2 / (4 pi); the measured ratio at large T agrees with it
    const double c = 3.0 / (4.0 * pi);
    const double T = 3000.0;
    EXPECT_NEAR(static_cast<double>(square_count(T)) / (T * T), c, 1e-3);
    const auto series = cesaro_sv(polygon("square-billiard"), 7.0, 70);
    EXPECT_NEAR(series.points.back().value, c, 0.05 * c);
}

TEST(CesaroSv, TorusSurfaceInput) {
    const auto series = cesaro_sv(catalog_surface("torus"), 7.0, 70);
    EXPECT_NEAR(series.points.back().value, 3.0 / pi, 0.05 * 3.0 / pi);
}

TEST(CesaroSv, ShortRangeIsWellFormed) {
    for (const auto& name : polygon_names) {
        const auto series = cesaro_sv(polygon(name), 0.5, 10);
        ASSERT_EQ(series.points.size(), 10u);
        EXPECT_EQ(series.kind, CountSeries::Kind::cesaro);
        for (std::size_t i = 0; i < series.points.size(); ++i) {
            if (i) {
                EXPECT_GT(series.points[i].t, series.points[i - 1].t);
            }
            EXPECT_TRUE(std::isfinite(series.points[i].value));
            EXPECT_GE(series.points[i].value, 0.0);
        }
    }
}

TEST(CesaroSv, RejectsTooFewSteps) {
    EXPECT_THROW(cesaro_sv(polygon("square-billiard"), 3.0, 9), validation_error);
    EXPECT_THROW(cesaro_sv(polygon("square-billiard"), 0.0, 20), validation_error);
}

TEST(CesaroSv, SmoothsTheRawSeries) {
    const double t_max = 5.0;
    const int steps = 50;
    for (const auto& name : polygon_names) {
        const auto w = cylinder_waists(unfold(polygon(name)), std::exp(t_max));
        const auto ces = cesaro_from_waists(w, t_max, steps);
        const auto raw = normalized_from_waists(w, t_max, steps);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < ces.points.size(); ++i)
            if (ces.points[i].t >= t_max / 2) {
                a.push_back(ces.points[i].value);
                b.push_back(raw.points[i].value);
            }
        EXPECT_LT(sample_variance(a), sample_variance(b)) << name;
    }
}
