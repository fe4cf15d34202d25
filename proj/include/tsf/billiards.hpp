#ifndef TSF_BILLIARDS_HPP
#define TSF_BILLIARDS_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "flat_geometry.hpp"
#include "surface.hpp"

namespace tsf {

struct Rational {
    long long p = 0;
    long long q = 1;
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
};

struct RationalPolygon {
    std::vector<Vec2> vertices;
    std::vector<Rational> angles;  // interior angle i is angles[i] * pi
};

inline RationalPolygon parse_polygon(const std::string& text) {
    RationalPolygon q;
    int angle_line = 0;
    for (const auto& [line, content] : detail::content_lines(text, "format poly 1")) {
        const auto tok = detail::split_ws(content);
        if (tok[0] == "vertex") {
            if (tok.size() != 3) throw parse_error(line, "vertex needs two coordinates");
            q.vertices.emplace_back(detail::parse_real(tok[1], line), detail::parse_real(tok[2], line));
        } else if (tok[0] == "angles") {
            if (angle_line) throw parse_error(line, "angles given twice");
            angle_line = line;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                const auto slash = tok[i].find('/');
                if (slash == std::string::npos) throw parse_error(line, "angle must be p/q");
                Rational r{detail::parse_integer(tok[i].substr(0, slash), line),
                           detail::parse_integer(tok[i].substr(slash + 1), line)};
                if (r.p <= 0 || r.q <= 0) throw parse_error(line, "angle must be a positive fraction");
                if (std::gcd(r.p, r.q) != 1) throw parse_error(line, "angle " + tok[i] + " is not in lowest terms");
                q.angles.push_back(r);
            }
        } else {
            throw parse_error(line, "unknown directive '" + tok[0] + "'");
        }
    }
    if (!angle_line) throw parse_error(1, "missing 'angles' line");
    if (q.angles.size() != q.vertices.size())
        throw parse_error(angle_line, "angle count does not match vertex count");
    return q;
}

inline std::string write_polygon(const RationalPolygon& q) {
    std::string t = "format poly 1\n";
    for (auto v : q.vertices) t += "vertex " + detail::fmt17(v.x) + " " + detail::fmt17(v.y) + "\n";
    t += "angles";
    for (auto a : q.angles) t += " " + std::to_string(a.p) + "/" + std::to_string(a.q);
    return t + "\n";
}

inline void require_valid(const RationalPolygon& q) {
    Polygon p{"Q", q.vertices};
    if (p.size() < 3) throw validation_error("polygon needs at least 3 vertices");
    if (signed_area(p) <= 0.0) throw validation_error("polygon is not counterclockwise");
    if (!is_simple(p)) throw validation_error("polygon is not simple");
    for (int i = 0; i < p.size(); ++i) {
        const double geo = interior_angle(p, i);
        if (std::abs(geo - pi * q.angles[static_cast<std::size_t>(i)].value()) > 1e-9)
            throw validation_error("irrational angle input: vertex " + std::to_string(i) +
                                   " does not match its declared angle");
    }
}

inline long long reflection_order_bound(const RationalPolygon& q) {
    long long N = 1;
    for (auto a : q.angles) N = std::lcm(N, a.q);
    return N;
}

namespace detail {
// Dihedral element R(2 pi j / N) F^flip, F the reflection in the line of edge 0.
struct Dihedral {
    int flip = 0;
    long long j = 0;
    bool operator<(const Dihedral& o) const { return std::tie(flip, j) < std::tie(o.flip, o.j); }
    bool operator==(const Dihedral&) const = default;
};

inline Dihedral compose(const Dihedral& a, const Dihedral& b, long long N) {
    const long long j = ((a.j + (a.flip ? -b.j : b.j)) % N + N) % N;
    return {a.flip ^ b.flip, j};
}
}  // namespace detail

inline constexpr std::size_t default_group_cap = 100000;

// Translation surface obtained by unfolding: one copy of the table per element of the group
// generated by the linear parts of the edge reflections.
inline TranslationSurface unfold(const RationalPolygon& q, std::size_t group_cap = default_group_cap) {
    require_valid(q);
    const int n = static_cast<int>(q.vertices.size());
    const long long N = reflection_order_bound(q);
    if (static_cast<std::size_t>(2 * N) > group_cap) throw cap_exceeded("reflection group order exceeds cap");
    Polygon Q{"Q", q.vertices};
    const double phi0 = std::atan2(Q.edge(0).y, Q.edge(0).x);
    std::vector<detail::Dihedral> rho(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Vec2 e = Q.edge(i);
        const double m = (std::atan2(e.y, e.x) - phi0) * static_cast<double>(N) / pi;
        const double mr = std::round(m);
        if (std::abs(m - mr) > 1e-7) throw validation_error("irrational angle input: edge directions are not commensurable");
        rho[static_cast<std::size_t>(i)] = {1, ((static_cast<long long>(mr) % N) + N) % N};
    }
    // closure from the identity
    std::vector<detail::Dihedral> elems{{0, 0}};
    std::map<detail::Dihedral, int> index{{{0, 0}, 0}};
    for (std::size_t k = 0; k < elems.size(); ++k)
        for (int i = 0; i < n; ++i) {
            const auto g = detail::compose(elems[k], rho[static_cast<std::size_t>(i)], N);
            if (index.count(g)) continue;
            if (elems.size() >= group_cap) throw cap_exceeded("reflection group order exceeds cap");
            index[g] = static_cast<int>(elems.size());
            elems.push_back(g);
        }

    const double c0 = std::cos(2.0 * phi0), s0 = std::sin(2.0 * phi0);
    TranslationSurface s;
    s.label = "unfolding";
    for (std::size_t k = 0; k < elems.size(); ++k) {
        const auto& g = elems[k];
        const double ang = two_pi * static_cast<double>(g.j) / static_cast<double>(N);
        const double c = std::cos(ang), sn = std::sin(ang);
        auto apply = [&](Vec2 v) {
            if (g.flip) v = {c0 * v.x + s0 * v.y, s0 * v.x - c0 * v.y};
            return Vec2{c * v.x - sn * v.y, sn * v.x + c * v.y};
        };
        Polygon P;
        P.name = "c" + std::to_string(k);
        for (int i = 0; i < n; ++i) {
            const int src = g.flip ? n - 1 - i : i;
            P.vertices.push_back(apply(q.vertices[static_cast<std::size_t>(src)]));
        }
        s.polygons.push_back(std::move(P));
    }
    auto side_index = [&](const detail::Dihedral& g, int i) { return g.flip ? ((n - 2 - i) % n + n) % n : i; };
    for (std::size_t k = 0; k < elems.size(); ++k)
        for (int i = 0; i < n; ++i) {
            const auto h = detail::compose(elems[k], rho[static_cast<std::size_t>(i)], N);
            const int kh = index.at(h);
            if (kh < static_cast<int>(k)) continue;  // glued from the other side
            s.gluings.push_back({{static_cast<int>(k), side_index(elems[k], i)}, {kh, side_index(h, i)}});
        }
    return s;
}

inline std::size_t unfolding_copies(const RationalPolygon& q) { return unfold(q).polygons.size(); }

// ---------------------------------------------------------------- counting

// N(Q, T): cylinders of waist <= T on the unfolded surface.
inline long long billiard_count(const RationalPolygon& q, double T) {
    return static_cast<long long>(cylinder_waists(unfold(q), T).size());
}

inline long long count_at_most(const std::vector<double>& sorted_waists, double T) {
    return std::upper_bound(sorted_waists.begin(), sorted_waists.end(), T * (1.0 + 1e-12)) - sorted_waists.begin();
}

struct SeriesPoint {
    double t;
    double value;
};

struct CountSeries {
    enum class Kind { raw_count, normalized, cesaro } kind = Kind::cesaro;
    std::vector<SeriesPoint> points;
};

// (1/t) int_0^t N(e^s) e^{-2s} ds by the trapezoid rule on s_i = i t_max / steps,
// reported at i = 1..steps. One enumeration up to e^{t_max} serves every grid point.
inline CountSeries cesaro_from_waists(const std::vector<double>& sorted_waists, double t_max, int steps) {
    if (!(t_max > 0.0)) throw validation_error("t_max must be positive");
    if (steps < 10) throw validation_error("steps must be at least 10");
    CountSeries out;
    out.kind = CountSeries::Kind::cesaro;
    const double h = t_max / steps;
    auto f = [&](double s) { return static_cast<double>(count_at_most(sorted_waists, std::exp(s))) * std::exp(-2.0 * s); };
    CompensatedSum integral;
    double prev = f(0.0);
    for (int i = 1; i <= steps; ++i) {
        const double s = i * h;
        const double cur = f(s);
        integral.add(0.5 * h * (prev + cur));
        prev = cur;
        out.points.push_back({s, integral.value() / s});
    }
    return out;
}

// N(e^s) e^{-2s} on the same grid.
inline CountSeries normalized_from_waists(const std::vector<double>& sorted_waists, double t_max, int steps) {
    CountSeries out;
    out.kind = CountSeries::Kind::normalized;
    const double h = t_max / steps;
    for (int i = 1; i <= steps; ++i) {
        const double s = i * h;
        out.points.push_back({s, static_cast<double>(count_at_most(sorted_waists, std::exp(s))) * std::exp(-2.0 * s)});
    }
    return out;
}

inline CountSeries cesaro_sv(const TranslationSurface& s, double t_max, int steps) {
    if (steps < 10) throw validation_error("steps must be at least 10");
    return cesaro_from_waists(cylinder_waists(s, std::exp(t_max)), t_max, steps);
}

inline CountSeries cesaro_sv(const RationalPolygon& q, double t_max, int steps) {
    return cesaro_sv(unfold(q), t_max, steps);
}

inline double sample_variance(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    CompensatedSum m;
    for (double x : xs) m.add(x);
    const double mean = m.value() / static_cast<double>(xs.size());
    CompensatedSum v;
    for (double x : xs) v.add((x - mean) * (x - mean));
    return v.value() / static_cast<double>(xs.size() - 1);
}

}  // namespace tsf

#endif  // TSF_BILLIARDS_HPP
