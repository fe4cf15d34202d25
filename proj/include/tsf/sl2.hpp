#ifndef TSF_SL2_HPP
#define TSF_SL2_HPP

#include <array>
#include <cmath>
#include <string>

#include "homology.hpp"

namespace tsf {

struct GroupElement {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    double det() const { return a11 * a22 - a12 * a21; }
    GroupElement operator*(const GroupElement& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Vec2 operator*(Vec2 v) const { return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y}; }
    GroupElement inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    double max_abs_diff(const GroupElement& o) const {
        return std::max({std::abs(a11 - o.a11), std::abs(a12 - o.a12), std::abs(a21 - o.a21), std::abs(a22 - o.a22)});
    }
};

enum class Generator { A, R, U };

inline GroupElement generator(Generator kind, double param) {
    switch (kind) {
        case Generator::A: return {std::exp(param), 0.0, 0.0, std::exp(-param)};
        case Generator::R: {
            const double c = std::cos(param), s = std::sin(param);
            return {c, -s, s, c};
        }
        case Generator::U: return {1.0, param, 0.0, 1.0};
    }
    return {};
}

inline GroupElement a_t(double t) { return generator(Generator::A, t); }
inline GroupElement r_theta(double theta) { return generator(Generator::R, theta); }
inline GroupElement u_s(double s) { return generator(Generator::U, s); }

// Throws unless det is 1 within 1e-12 (relative to the entry scale).
inline void require_sl2(const GroupElement& g) {
    const double scale = std::max(1.0, std::max({std::abs(g.a11 * g.a22), std::abs(g.a12 * g.a21)}));
    if (std::abs(g.det() - 1.0) > 1e-12 * scale) throw validation_error("matrix does not have determinant 1");
}

struct KAK {
    double theta1 = 0.0;
    double t = 0.0;
    double theta2 = 0.0;

    GroupElement compose() const { return r_theta(theta1) * a_t(t) * r_theta(theta2); }
};

// g = r(theta1) a(t) r(theta2), t >= 0, angles in [0, 2pi). Pure rotations return theta2 = 0.
inline KAK kak(const GroupElement& g) {
    KAK out;
    const double fro2 = g.a11 * g.a11 + g.a12 * g.a12 + g.a21 * g.a21 + g.a22 * g.a22;
    const double x = 0.5 * fro2 - 1.0;  // cosh(2t) - 1
    if (x <= 1e-15) {
        out.theta1 = wrap_angle(std::atan2(g.a21, g.a11), two_pi);
        return out;
    }
    out.t = 0.5 * std::log1p(x + std::sqrt(x * (x + 2.0)));  // acosh(1 + x) / 2
    // top eigenvector of g g^T
    const double p = g.a11 * g.a11 + g.a12 * g.a12;
    const double q = g.a21 * g.a21 + g.a22 * g.a22;
    const double r = g.a11 * g.a21 + g.a12 * g.a22;
    const double th1 = 0.5 * std::atan2(2.0 * r, p - q);
    const GroupElement m = a_t(-out.t) * r_theta(-th1) * g;
    out.theta1 = wrap_angle(th1, two_pi);
    out.theta2 = wrap_angle(std::atan2(m.a21, m.a11), two_pi);
    return out;
}

inline TranslationSurface act(const GroupElement& g, const TranslationSurface& s) {
    TranslationSurface out = s;
    for (auto& p : out.polygons)
        for (auto& v : p.vertices) v = g * v;
    return out;
}

inline PeriodMatrix act(const GroupElement& g, const PeriodMatrix& pm) {
    PeriodMatrix out = pm;
    for (auto& c : out.columns) c = g * c;
    return out;
}

// ---------------------------------------------------------------- torus lattice

struct IntMat2 {
    long long m11 = 1, m12 = 0, m21 = 0, m22 = 1;

    long long det() const { return m11 * m22 - m12 * m21; }
    IntMat2 operator*(const IntMat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
    bool operator==(const IntMat2&) const = default;
};

// new basis = old basis * matrix (columns are coefficient vectors)
struct CocycleRecord {
    IntMat2 matrix;
    std::string source;
    std::string target;
};

struct LatticeBasis {
    Vec2 c1, c2;
    IntMat2 change;  // (c1 c2) = (v1 v2) * change
};

// Gauss reduction followed by the canonical choice among shortest vectors:
// c1 shortest and lexicographically positive (ties: smaller argument),
// c2 shortest with cross(c1, c2) > 0 (ties: nonnegative dot with c1, then smaller argument).
inline LatticeBasis reduce_lattice(Vec2 v1, Vec2 v2) {
    if (std::abs(cross(v1, v2)) < 1e-12) throw validation_error("degenerate lattice");
    LatticeBasis b;
    Vec2 b1 = v1, b2 = v2;
    long long p1 = 1, q1 = 0, p2 = 0, q2 = 1;
    if (norm2(b1) < norm2(b2)) {
        std::swap(b1, b2);
        std::swap(p1, p2);
        std::swap(q1, q2);
    }
    for (int iter = 0; iter < 10000; ++iter) {
        // keep b2 the shorter
        const double mu = std::round(dot(b1, b2) / norm2(b2));
        const long long k = static_cast<long long>(mu);
        b1 = b1 - b2 * mu;
        p1 -= k * p2;
        q1 -= k * q2;
        if (norm2(b1) >= norm2(b2) * (1.0 - 1e-14)) break;
        std::swap(b1, b2);
        std::swap(p1, p2);
        std::swap(q1, q2);
    }
    // b2 shortest, b1 next; canonical choice by search over small combinations
    const double tol = 1e-10;
    struct Cand {
        Vec2 v;
        long long p, q;
    };
    std::vector<Cand> cands;
    for (long long i = -2; i <= 2; ++i)
        for (long long j = -2; j <= 2; ++j) {
            if (i == 0 && j == 0) continue;
            const Vec2 v = b2 * static_cast<double>(i) + b1 * static_cast<double>(j);
            cands.push_back({v, i * p2 + j * p1, i * q2 + j * q1});
        }
    auto arg = [](Vec2 v) { return std::atan2(v.y, v.x); };
    const Cand* best1 = nullptr;
    for (const auto& c : cands) {
        if (!lex_positive(c.v, 1e-12)) continue;
        if (!best1) { best1 = &c; continue; }
        const double d = norm2(c.v) - norm2(best1->v);
        if (d < -tol * norm2(best1->v) || (std::abs(d) <= tol * norm2(best1->v) && arg(c.v) < arg(best1->v)))
            best1 = &c;
    }
    const Cand* best2 = nullptr;
    for (const auto& c : cands) {
        if (cross(best1->v, c.v) <= tol * norm2(best1->v)) continue;
        if (!best2) { best2 = &c; continue; }
        const double d = norm2(c.v) - norm2(best2->v);
        if (d < -tol * norm2(best2->v)) { best2 = &c; continue; }
        if (std::abs(d) > tol * norm2(best2->v)) continue;
        const bool c_pos = dot(c.v, best1->v) >= -tol * norm2(best1->v);
        const bool b_pos = dot(best2->v, best1->v) >= -tol * norm2(best1->v);
        if (c_pos != b_pos) {
            if (c_pos) best2 = &c;
        } else if (arg(c.v) < arg(best2->v)) {
            best2 = &c;
        }
    }
    b.change = {best1->p, best2->p, best1->q, best2->q};
    // recompute exactly from the original generators to avoid drift
    b.c1 = v1 * static_cast<double>(best1->p) + v2 * static_cast<double>(best1->q);
    b.c2 = v1 * static_cast<double>(best2->p) + v2 * static_cast<double>(best2->q);
    return b;
}

inline TranslationSurface parallelogram_torus(Vec2 c1, Vec2 c2, const std::string& label = "") {
    TranslationSurface s;
    s.label = label;
    s.polygons.push_back({"P", {{0.0, 0.0}, c1, c1 + c2, c2}});
    s.gluings.push_back({{0, 0}, {0, 2}});
    s.gluings.push_back({{0, 1}, {0, 3}});
    return s;
}

inline std::pair<Vec2, Vec2> torus_periods(const TranslationSurface& s) {
    const PeriodMatrix pm = periods(s);
    if (pm.absolute_count != 2) throw validation_error("surface is not a torus");
    return {pm.columns[0], pm.columns[1]};
}

inline std::pair<TranslationSurface, CocycleRecord> torus_reduce(const TranslationSurface& s) {
    const auto [v1, v2] = torus_periods(s);
    if (std::abs(cross(v1, v2)) < 1e-12) throw validation_error("degenerate lattice");
    const LatticeBasis b = reduce_lattice(v1, v2);
    CocycleRecord rec{b.change, basis_tag(s), ""};
    TranslationSurface out = parallelogram_torus(b.c1, b.c2, s.label);
    rec.target = basis_tag(out);
    return {out, rec};
}

}  // namespace tsf

#endif  // TSF_SL2_HPP
