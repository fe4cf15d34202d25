#include <gtest/gtest.h>

#include <set>

#include <tsf/tsf.hpp>

#include "oracles.hpp"

using namespace tsf;

namespace {

Origami make(const std::string& h, const std::string& v, int n) {
    return parse_origami("format origami 1\nsquares " + std::to_string(n) + "\nh " + h + "\nv " + v + "\n");
}

Origami apply(const Origami& o, const std::string& word) {
    Origami r = o;
    for (char c : word) r = origami_act(c == 'S' ? ModularGen::S : ModularGen::T, r);
    return r;
}

std::multiset<std::pair<long long, long long>> holonomies(const TranslationSurface& s, double L) {
    std::multiset<std::pair<long long, long long>> out;
    for (const auto& sc : saddle_connections(s, L))
        out.insert({std::llround(sc.holonomy.x * 1e8), std::llround(sc.holonomy.y * 1e8)});
    return out;
}

std::vector<Origami> random_origamis(int count, int n, std::uint64_t seed) {
    std::vector<Origami> out;
    Stream rng(seed);
    while (static_cast<int>(out.size()) < count) {
        Origami o;
        o.n = n;
        o.h = identity_perm(n);
        o.v = identity_perm(n);
        for (int i = n - 1; i > 0; --i) {
            std::swap(o.h[i], o.h[static_cast<int>(rng.uniform() * (i + 1))]);
            std::swap(o.v[i], o.v[static_cast<int>(rng.uniform() * (i + 1))]);
        }
        if (is_transitive(o)) out.push_back(o);
    }
    return out;
}

}  // namespace

TEST(ParseOrigami, Catalog) {
    const auto o = std::get<Origami>(catalog_load("l-origami"));
    EXPECT_EQ(o.n, 3);
    EXPECT_EQ(o.h, (Perm{1, 0, 2}));
    EXPECT_EQ(o.v, (Perm{2, 1, 0}));
    EXPECT_EQ(parse_origami(write_origami(o)), o);
}

TEST(ParseOrigami, Errors) {
    EXPECT_THROW(make("(1 2", "(1)", 2), parse_error);
    EXPECT_THROW(make("(1 4)", "(1)", 3), parse_error);
    EXPECT_THROW(make("(1 2)(2 3)", "(1)", 3), parse_error);
    EXPECT_THROW(make("(1)(2)", "(1)(2)", 2), validation_error);  // disconnected
}

TEST(OrigamiAct, TOnTorusIsTrivial) {
    const auto o = make("(1)", "(1)", 1);
    EXPECT_EQ(origami_act(ModularGen::T, o), o);
    EXPECT_EQ(origami_act(ModularGen::S, o), o);
}

TEST(OrigamiAct, STwiceIsTheEllipticInvolution) {
    for (const auto& o : {std::get<Origami>(catalog_load("l-origami")), std::get<Origami>(catalog_load("h11-origami"))}) {
        const Origami s2 = apply(o, "SS");
        Origami inv{o.n, oracle::inverse(o.h), oracle::inverse(o.v)};
        EXPECT_TRUE(isomorphic(s2, inv));
    }
}

TEST(OrigamiAct, TOnLOrigami) {
    const auto o = std::get<Origami>(catalog_load("l-origami"));
    const auto t = origami_act(ModularGen::T, o);
    EXPECT_EQ(t.h, o.h);
    // vertical neighbour of i becomes h^-1(v(i))
    EXPECT_EQ(t.v, oracle::compose(o.v, oracle::inverse(o.h)));
    EXPECT_EQ(oracle::cycle_type(t.v), (std::vector<int>{3}));
    EXPECT_EQ(origami_stratum(t).alpha, std::vector<int>{2});
}

TEST(OrigamiAct, MatchesTheLinearActionOnTheSurface) {
    // T and S are the matrices u_1 and r_{pi/2}: the expanded surfaces must agree as translation surfaces
    for (const auto& o : {std::get<Origami>(catalog_load("l-origami")), std::get<Origami>(catalog_load("h11-origami"))}) {
        const auto s = origami_surface(o);
        EXPECT_EQ(holonomies(act(u_s(1), s), 3.0), holonomies(origami_surface(origami_act(ModularGen::T, o)), 3.0));
        EXPECT_EQ(holonomies(act(r_theta(pi / 2), s), 3.0), holonomies(origami_surface(origami_act(ModularGen::S, o)), 3.0));
    }
}

TEST(OrigamiAct, StratumInvariant) {
    for (const auto& o : random_origamis(30, 6, 4)) {
        const auto st = origami_stratum(o);
        EXPECT_EQ(origami_stratum(origami_act(ModularGen::S, o)), st);
        EXPECT_EQ(origami_stratum(origami_act(ModularGen::T, o)), st);
    }
}

TEST(OrigamiAct, ModularRelationsHold) {
    std::vector<Origami> all = {std::get<Origami>(catalog_load("l-origami")), std::get<Origami>(catalog_load("h11-origami"))};
    for (const auto& o : random_origamis(20, 7, 12)) all.push_back(o);
    for (const auto& o : all) {
        EXPECT_TRUE(isomorphic(apply(o, "STSTSTSTSTST"), o));
        EXPECT_TRUE(isomorphic(apply(o, "SSSS"), o));
    }
}

TEST(CanonicalForm, InvariantUnderRelabeling) {
    for (const auto& o : random_origamis(20, 6, 77)) {
        Perm s = identity_perm(6);
        std::rotate(s.begin(), s.begin() + 2, s.end());
        Origami r{6, Perm(6), Perm(6)};
        for (int i = 0; i < 6; ++i) {
            r.h[s[i]] = s[o.h[i]];
            r.v[s[i]] = s[o.v[i]];
        }
        EXPECT_EQ(canonical_form(r), canonical_form(o));
    }
}

TEST(OrigamiOrbit, TorusHasSizeOne) {
    const auto r = origami_orbit(make("(1)", "(1)", 1));
    EXPECT_EQ(r.members.size(), 1u);
    EXPECT_FALSE(r.capped);
}

TEST(OrigamiOrbit, ThreeSquareH2IsOneOrbit) {
    // every transitive pair on 3 squares, up to relabeling, from the exhaustive oracle
    const auto classes = oracle::all_origamis(3);
    std::set<Origami> h2;
    for (const auto& [rep, alpha] : classes)
        if (alpha == std::vector<int>{2}) h2.insert(canonical_form(Origami{3, rep.first, rep.second}));
    ASSERT_EQ(h2.size(), 3u);
    const auto orbit = origami_orbit(std::get<Origami>(catalog_load("l-origami")));
    EXPECT_FALSE(orbit.capped);
    EXPECT_EQ(std::set<Origami>(orbit.members.begin(), orbit.members.end()), h2);
    for (const auto& m : orbit.members) EXPECT_EQ(stratum_of(origami_surface(m)).alpha, std::vector<int>{2});
}

TEST(OrigamiOrbit, OrbitsPartitionAllThreeSquareOrigamis) {
    const auto classes = oracle::all_origamis(3);
    std::set<Origami> all;
    for (const auto& [rep, alpha] : classes) all.insert(canonical_form(Origami{3, rep.first, rep.second}));
    std::set<Origami> covered;
    for (const auto& o : all) {
        const auto orbit = origami_orbit(o);
        for (const auto& m : orbit.members) {
            EXPECT_TRUE(all.count(m));
            EXPECT_EQ(origami_stratum(m), origami_stratum(o));
        }
        std::set<Origami> mine(orbit.members.begin(), orbit.members.end());
        if (covered.count(*mine.begin())) {
            for (const auto& m : mine) EXPECT_TRUE(covered.count(m));  // same orbit, not overlapping
        } else {
            for (const auto& m : mine) EXPECT_FALSE(covered.count(m));
            covered.insert(mine.begin(), mine.end());
        }
    }
    EXPECT_EQ(covered, all);
}

TEST(OrigamiOrbit, CapFlagsPartialResult) {
    const auto r = origami_orbit(std::get<Origami>(catalog_load("l-origami")), 2);
    EXPECT_TRUE(r.capped);
    EXPECT_LE(r.members.size(), 2u);
}

TEST(OrigamiOrbit, H11OrbitIsClosedAndInStratum) {
    const auto o = std::get<Origami>(catalog_load("h11-origami"));
    const auto r = origami_orbit(o);
    EXPECT_FALSE(r.capped);
    const std::set<Origami> members(r.members.begin(), r.members.end());
    for (const auto& m : r.members) {
        EXPECT_EQ(origami_stratum(m).alpha, (std::vector<int>{1, 1}));
        EXPECT_TRUE(members.count(canonical_form(origami_act(ModularGen::S, m))));
        EXPECT_TRUE(members.count(canonical_form(origami_act(ModularGen::T, m))));
    }
}
