#ifndef TSF_SURFACE_HPP
#define TSF_SURFACE_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace tsf {

struct EdgeRef {
    int polygon = 0;
    int edge = 0;
    bool operator==(const EdgeRef&) const = default;
};

struct Gluing {
    EdgeRef a;
    EdgeRef b;
};

struct Polygon {
    std::string name;
    std::vector<Vec2> vertices;

    int size() const { return static_cast<int>(vertices.size()); }
    Vec2 vertex(int i) const {
        const int n = size();
        return vertices[static_cast<std::size_t>(((i % n) + n) % n)];
    }
    Vec2 edge(int i) const { return vertex(i + 1) - vertex(i); }
};

struct TranslationSurface {
    std::vector<Polygon> polygons;
    std::vector<Gluing> gluings;
    std::string label;

    int polygon_index(const std::string& name) const {
        for (std::size_t i = 0; i < polygons.size(); ++i)
            if (polygons[i].name == name) return static_cast<int>(i);
        return -1;
    }
    Vec2 edge_vector(EdgeRef r) const { return polygons[static_cast<std::size_t>(r.polygon)].edge(r.edge); }
    std::string edge_name(EdgeRef r) const {
        return polygons[static_cast<std::size_t>(r.polygon)].name + ".e" + std::to_string(r.edge);
    }
};

// ---------------------------------------------------------------- text format

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

inline std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    std::string s = hash == std::string::npos ? line : line.substr(0, hash);
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    return s;
}

inline double parse_real(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw parse_error(line, "expected a number, got '" + tok + "'");
    }
}

inline long long parse_integer(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw parse_error(line, "expected an integer, got '" + tok + "'");
    }
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Reads the header line and returns the remaining (line number, content) pairs.
inline std::vector<std::pair<int, std::string>> content_lines(const std::string& text,
                                                             const std::string& header) {
    std::vector<std::pair<int, std::string>> out;
    std::istringstream is(text);
    std::string raw;
    int lineno = 0;
    bool seen_header = false;
    while (std::getline(is, raw)) {
        ++lineno;
        const std::string s = strip_comment(raw);
        if (split_ws(s).empty()) continue;
        if (!seen_header) {
            if (split_ws(s) != split_ws(header)) throw parse_error(lineno, "expected '" + header + "'");
            seen_header = true;
            continue;
        }
        out.emplace_back(lineno, s);
    }
    if (!seen_header) throw parse_error(lineno == 0 ? 1 : lineno, "missing '" + header + "' header");
    return out;
}

}  // namespace detail

// Structural parse only; geometry is checked by validate_surface.
inline TranslationSurface parse_surface(const std::string& text) {
    TranslationSurface s;
    struct PendingGlue {
        int line;
        std::string a, b;
    };
    std::vector<PendingGlue> glues;
    for (const auto& [line, content] : detail::content_lines(text, "format tsf 1")) {
        const auto tok = detail::split_ws(content);
        if (tok[0] == "label") {
            const auto pos = content.find("label") + 5;
            std::string rest = content.substr(pos);
            rest.erase(0, rest.find_first_not_of(" \t"));
            s.label = rest;
        } else if (tok[0] == "polygon") {
            if (tok.size() < 2) throw parse_error(line, "polygon needs a name");
            if (tok[1].find('.') != std::string::npos) throw parse_error(line, "polygon name may not contain '.'");
            if (s.polygon_index(tok[1]) >= 0) throw parse_error(line, "duplicate polygon '" + tok[1] + "'");
            if ((tok.size() - 2) % 2 != 0) throw parse_error(line, "odd number of coordinates");
            Polygon p;
            p.name = tok[1];
            for (std::size_t i = 2; i + 1 < tok.size(); i += 2)
                p.vertices.emplace_back(detail::parse_real(tok[i], line), detail::parse_real(tok[i + 1], line));
            if (p.vertices.empty()) throw parse_error(line, "polygon without vertices");
            s.polygons.push_back(std::move(p));
        } else if (tok[0] == "glue") {
            if (tok.size() != 3) throw parse_error(line, "glue needs two edge references");
            glues.push_back({line, tok[1], tok[2]});
        } else {
            throw parse_error(line, "unknown directive '" + tok[0] + "'");
        }
    }

    std::vector<std::vector<char>> used(s.polygons.size());
    for (std::size_t i = 0; i < s.polygons.size(); ++i) used[i].assign(s.polygons[i].vertices.size(), 0);

    auto resolve = [&](const std::string& ref, int line) {
        const auto dot = ref.rfind(".e");
        if (dot == std::string::npos) throw parse_error(line, "malformed edge reference '" + ref + "'");
        const int p = s.polygon_index(ref.substr(0, dot));
        if (p < 0) throw parse_error(line, "dangling edge reference '" + ref + "'");
        const std::string idx = ref.substr(dot + 2);
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
            throw parse_error(line, "malformed edge reference '" + ref + "'");
        const long long e = detail::parse_integer(idx, line);
        if (e >= s.polygons[static_cast<std::size_t>(p)].size())
            throw parse_error(line, "dangling edge reference '" + ref + "'");
        EdgeRef r{p, static_cast<int>(e)};
        char& flag = used[static_cast<std::size_t>(p)][static_cast<std::size_t>(e)];
        if (flag) throw parse_error(line, "edge reused: '" + ref + "'");
        flag = 1;
        return r;
    };
    for (const auto& g : glues) {
        const EdgeRef a = resolve(g.a, g.line);
        const EdgeRef b = resolve(g.b, g.line);
        s.gluings.push_back({a, b});
    }
    return s;
}

inline std::string write_surface(const TranslationSurface& s) {
    std::string out = "format tsf 1\n";
    if (!s.label.empty()) out += "label " + s.label + "\n";
    for (const auto& p : s.polygons) {
        out += "polygon " + p.name;
        for (const auto& v : p.vertices) out += " " + detail::fmt17(v.x) + " " + detail::fmt17(v.y);
        out += "\n";
    }
    for (const auto& g : s.gluings) out += "glue " + s.edge_name(g.a) + " " + s.edge_name(g.b) + "\n";
    return out;
}

// ---------------------------------------------------------------- topology

// Combinatorics of the glued complex. Sides are numbered polygon by polygon; a corner shares
// the number of the side that starts there.
struct Topology {
    std::vector<int> offset;
    std::vector<EdgeRef> side;
    std::vector<int> partner;
    std::vector<int> gluing_of;
    std::vector<int> next_corner;   // counterclockwise successor around the vertex
    std::vector<int> vertex_class;  // per corner
    std::vector<std::vector<int>> class_corners;  // corners in counterclockwise order
    std::vector<double> corner_angle;
    std::vector<double> cone_angle;

    int sides() const { return static_cast<int>(side.size()); }
    int V() const { return static_cast<int>(class_corners.size()); }
    int E() const { return static_cast<int>(gluing_of.size()) / 2; }
    int F() const { return static_cast<int>(offset.size()); }
    int euler() const { return V() - E() + F(); }
    int side_id(EdgeRef r) const { return offset[static_cast<std::size_t>(r.polygon)] + r.edge; }
    int prev_side(int sid) const {
        const EdgeRef r = side[static_cast<std::size_t>(sid)];
        const int n = (r.polygon + 1 < F() ? offset[static_cast<std::size_t>(r.polygon) + 1] : sides()) -
                      offset[static_cast<std::size_t>(r.polygon)];
        return offset[static_cast<std::size_t>(r.polygon)] + (r.edge + n - 1) % n;
    }
    int next_side(int sid) const {
        const EdgeRef r = side[static_cast<std::size_t>(sid)];
        const int n = (r.polygon + 1 < F() ? offset[static_cast<std::size_t>(r.polygon) + 1] : sides()) -
                      offset[static_cast<std::size_t>(r.polygon)];
        return offset[static_cast<std::size_t>(r.polygon)] + (r.edge + 1) % n;
    }
    // Multiple of 2pi, rounded.
    int cone_multiple(int cls) const {
        return static_cast<int>(std::lround(cone_angle[static_cast<std::size_t>(cls)] / two_pi));
    }
};

// Interior angle at vertex i of a counterclockwise polygon, in (0, 2pi).
inline double interior_angle(const Polygon& p, int i) {
    const Vec2 a = p.vertex(i + 1) - p.vertex(i);
    const Vec2 b = p.vertex(i - 1) - p.vertex(i);
    double t = ccw_angle(a, b);
    if (t <= 0.0) t += two_pi;
    return t;
}

// Throws validation_error if some edge is unglued.
inline Topology topology(const TranslationSurface& s) {
    Topology t;
    int count = 0;
    for (std::size_t p = 0; p < s.polygons.size(); ++p) {
        t.offset.push_back(count);
        for (int i = 0; i < s.polygons[p].size(); ++i) t.side.push_back({static_cast<int>(p), i});
        count += s.polygons[p].size();
    }
    t.partner.assign(static_cast<std::size_t>(count), -1);
    t.gluing_of.assign(static_cast<std::size_t>(count), -1);
    for (std::size_t g = 0; g < s.gluings.size(); ++g) {
        const int a = t.side_id(s.gluings[g].a), b = t.side_id(s.gluings[g].b);
        if (t.partner[static_cast<std::size_t>(a)] >= 0 || t.partner[static_cast<std::size_t>(b)] >= 0 || a == b)
            throw validation_error("edge reused");
        t.partner[static_cast<std::size_t>(a)] = b;
        t.partner[static_cast<std::size_t>(b)] = a;
        t.gluing_of[static_cast<std::size_t>(a)] = static_cast<int>(g);
        t.gluing_of[static_cast<std::size_t>(b)] = static_cast<int>(g);
    }
    for (int sid = 0; sid < count; ++sid)
        if (t.partner[static_cast<std::size_t>(sid)] < 0)
            throw validation_error("unglued edge " + s.edge_name(t.side[static_cast<std::size_t>(sid)]));

    t.next_corner.resize(static_cast<std::size_t>(count));
    t.corner_angle.resize(static_cast<std::size_t>(count));
    for (int c = 0; c < count; ++c) {
        t.next_corner[static_cast<std::size_t>(c)] = t.partner[static_cast<std::size_t>(t.prev_side(c))];
        const EdgeRef r = t.side[static_cast<std::size_t>(c)];
        t.corner_angle[static_cast<std::size_t>(c)] = interior_angle(s.polygons[static_cast<std::size_t>(r.polygon)], r.edge);
    }
    t.vertex_class.assign(static_cast<std::size_t>(count), -1);
    for (int c = 0; c < count; ++c) {
        if (t.vertex_class[static_cast<std::size_t>(c)] >= 0) continue;
        const int cls = static_cast<int>(t.class_corners.size());
        std::vector<int> cycle;
        CompensatedSum angle;
        for (int d = c; t.vertex_class[static_cast<std::size_t>(d)] < 0; d = t.next_corner[static_cast<std::size_t>(d)]) {
            t.vertex_class[static_cast<std::size_t>(d)] = cls;
            cycle.push_back(d);
            angle.add(t.corner_angle[static_cast<std::size_t>(d)]);
        }
        t.class_corners.push_back(std::move(cycle));
        t.cone_angle.push_back(angle.value());
    }
    return t;
}

// ---------------------------------------------------------------- validation

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<double> cone_multiples;  // cone angle / 2pi per vertex class

    bool valid() const { return violations.empty(); }
};

inline double signed_area(const Polygon& p) {
    CompensatedSum s;
    for (int i = 0; i < p.size(); ++i) s.add(cross(p.vertex(i), p.vertex(i + 1)));
    return 0.5 * s.value();
}

namespace detail {
inline bool segments_touch(Vec2 p, Vec2 q, Vec2 r, Vec2 s, double tol) {
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); };
    auto on_seg = [&](Vec2 a, Vec2 b, Vec2 c) {
        return std::min(a.x, b.x) - tol <= c.x && c.x <= std::max(a.x, b.x) + tol &&
               std::min(a.y, b.y) - tol <= c.y && c.y <= std::max(a.y, b.y) + tol;
    };
    const double d1 = orient(r, s, p), d2 = orient(r, s, q), d3 = orient(p, q, r), d4 = orient(p, q, s);
    if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)))
        return true;
    if (std::abs(d1) <= tol && on_seg(r, s, p)) return true;
    if (std::abs(d2) <= tol && on_seg(r, s, q)) return true;
    if (std::abs(d3) <= tol && on_seg(p, q, r)) return true;
    if (std::abs(d4) <= tol && on_seg(p, q, s)) return true;
    return false;
}
}  // namespace detail

inline bool is_simple(const Polygon& p, double tol = 1e-12) {
    const int n = p.size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (detail::segments_touch(p.vertex(i), p.vertex(i + 1), p.vertex(j), p.vertex(j + 1), tol)) return false;
        }
    return true;
}

inline ValidationReport validate_surface(const TranslationSurface& s) {
    ValidationReport rep;
    bool geometric_ok = true;
    if (s.polygons.empty()) rep.violations.push_back("no polygons");
    for (const auto& p : s.polygons) {
        if (p.size() < 3) {
            rep.violations.push_back("polygon " + p.name + " has fewer than 3 vertices");
            geometric_ok = false;
            continue;
        }
        if (signed_area(p) <= 0.0) {
            rep.violations.push_back("polygon " + p.name + " is not counterclockwise");
            geometric_ok = false;
        }
        if (!is_simple(p)) {
            rep.violations.push_back("polygon " + p.name + " is not simple");
            geometric_ok = false;
        }
    }
    // edge usage
    std::map<std::pair<int, int>, int> uses;
    for (const auto& g : s.gluings) {
        for (EdgeRef r : {g.a, g.b}) {
            if (r.polygon < 0 || r.polygon >= static_cast<int>(s.polygons.size()) || r.edge < 0 ||
                r.edge >= s.polygons[static_cast<std::size_t>(r.polygon)].size()) {
                rep.violations.push_back("dangling edge reference");
                return rep;
            }
            if (++uses[{r.polygon, r.edge}] == 2) rep.violations.push_back("edge reused: " + s.edge_name(r));
        }
    }
    bool complete = true;
    for (std::size_t p = 0; p < s.polygons.size(); ++p)
        for (int i = 0; i < s.polygons[p].size(); ++i)
            if (!uses.count({static_cast<int>(p), i})) {
                rep.violations.push_back("unglued edge " + s.edge_name({static_cast<int>(p), i}));
                complete = false;
            }
    for (const auto& g : s.gluings) {
        const Vec2 d = s.edge_vector(g.a) + s.edge_vector(g.b);
        if (std::max(std::abs(d.x), std::abs(d.y)) > 1e-9)
            rep.violations.push_back("non-translation gluing: " + s.edge_name(g.a) + " " + s.edge_name(g.b));
    }
    if (!complete || !geometric_ok || !rep.violations.empty()) return rep;

    const Topology t = topology(s);
    for (std::size_t c = 0; c < t.cone_angle.size(); ++c) {
        const double m = t.cone_angle[c] / two_pi;
        rep.cone_multiples.push_back(m);
        if (std::abs(t.cone_angle[c] - two_pi * std::round(m)) > 1e-9 || std::round(m) < 1.0)
            rep.violations.push_back("cone angle at vertex class " + std::to_string(c) +
                                     " is not a multiple of 2pi: " + detail::fmt17(t.cone_angle[c]));
    }
    return rep;
}

inline void require_valid(const TranslationSurface& s) {
    const auto rep = validate_surface(s);
    if (!rep.valid()) throw validation_error("invalid surface: " + rep.violations.front());
}

// ---------------------------------------------------------------- stratum

struct Stratum {
    std::vector<int> alpha;  // descending
    int genus = 0;
    int zero_count = 0;      // zeros; 1 (the marked point) in genus 1

    std::string name() const {
        if (alpha.empty()) return "H(0)";
        std::string out = "H(";
        for (std::size_t i = 0; i < alpha.size(); ++i) out += (i ? "," : "") + std::to_string(alpha[i]);
        return out + ")";
    }
    bool operator==(const Stratum&) const = default;
};

inline Stratum stratum_from(const Topology& t) {
    Stratum st;
    const int chi = t.euler();
    if (chi > 2 || chi % 2 != 0) throw validation_error("inconsistent complex: Euler characteristic " + std::to_string(chi));
    st.genus = (2 - chi) / 2;
    int total = 0;
    for (int c = 0; c < t.V(); ++c) {
        const int a = t.cone_multiple(c) - 1;
        if (a < 0) throw validation_error("inconsistent complex: cone angle below 2pi");
        if (a > 0) st.alpha.push_back(a);
        total += a;
    }
    if (total != 2 * st.genus - 2) throw validation_error("inconsistent complex: angle excess does not match genus");
    std::sort(st.alpha.rbegin(), st.alpha.rend());
    st.zero_count = st.genus == 1 ? 1 : static_cast<int>(st.alpha.size());
    return st;
}

inline Stratum stratum_of(const TranslationSurface& s) { return stratum_from(topology(s)); }

// Vertex classes that are cone points: angle above 2pi, or the marked class 0 on a torus.
inline std::vector<int> zero_classes(const Topology& t) {
    std::vector<int> z;
    for (int c = 0; c < t.V(); ++c)
        if (t.cone_multiple(c) > 1) z.push_back(c);
    if (z.empty()) z.push_back(0);
    return z;
}

inline std::vector<char> singular_mask(const Topology& t) {
    std::vector<char> m(static_cast<std::size_t>(t.V()), 0);
    for (int c : zero_classes(t)) m[static_cast<std::size_t>(c)] = 1;
    return m;
}

// ---------------------------------------------------------------- area

inline double area(const TranslationSurface& s) {
    CompensatedSum a;
    for (const auto& p : s.polygons) a.add(signed_area(p));
    return a.value();
}

inline TranslationSurface scaled(const TranslationSurface& s, double factor) {
    TranslationSurface out = s;
    for (auto& p : out.polygons)
        for (auto& v : p.vertices) v = v * factor;
    return out;
}

inline TranslationSurface normalize_area(const TranslationSurface& s) {
    const double a = area(s);
    if (!(a > 0.0)) throw validation_error("surface has nonpositive area");
    return scaled(s, 1.0 / std::sqrt(a));
}

// Stable fingerprint of the gluing combinatorics (independent of coordinates).
inline std::uint64_t combinatorial_hash(const TranslationSurface& s) {
    std::string key;
    for (const auto& p : s.polygons) key += std::to_string(p.size()) + ",";
    key += "|";
    for (const auto& g : s.gluings)
        key += std::to_string(g.a.polygon) + "." + std::to_string(g.a.edge) + "-" + std::to_string(g.b.polygon) +
               "." + std::to_string(g.b.edge) + ";";
    return fnv1a(key);
}

}  // namespace tsf

#endif  // TSF_SURFACE_HPP
