#ifndef TSF_TRIANGULATION_HPP
#define TSF_TRIANGULATION_HPP

#include <array>
#include <map>
#include <tuple>
#include <vector>

#include "surface.hpp"

namespace tsf {

// Triangle side j runs from corner j to corner j+1. Across side j lies side nbs[j] of
// triangle nb[j], whose first corner is glued to our corner j+1.
struct Triangle {
    int polygon = 0;
    std::array<int, 3> vert{};  // polygon vertex indices
    std::array<Vec2, 3> p{};    // coordinates in the polygon's chart
    std::array<int, 3> nb{};
    std::array<int, 3> nbs{};
    std::array<int, 3> cls{};   // vertex class per corner
    std::array<double, 3> angle{};
    std::array<double, 3> offset{};  // angular position of the corner's first side inside its cone
};

struct Triangulation {
    std::vector<Triangle> tri;
    Topology topo;
    std::vector<char> singular;      // per vertex class
    std::vector<double> cone;        // per vertex class, exact multiple of 2pi
    std::vector<std::vector<std::pair<int, int>>> class_corners;  // (triangle, corner), counterclockwise
    int genus = 0;
    double total_area = 0.0;
};

namespace detail {

inline bool point_in_triangle(Vec2 q, Vec2 a, Vec2 b, Vec2 c, double tol) {
    return cross(b - a, q - a) >= -tol && cross(c - b, q - b) >= -tol && cross(a - c, q - c) >= -tol;
}

// Ear clipping on a simple counterclockwise polygon; returns vertex index triples.
inline std::vector<std::array<int, 3>> ear_clip(const Polygon& poly) {
    std::vector<int> idx;
    for (int i = 0; i < poly.size(); ++i) idx.push_back(i);
    std::vector<std::array<int, 3>> out;
    const double scale = [&] {
        double m = 0.0;
        for (auto v : poly.vertices) m = std::max(m, std::max(std::abs(v.x), std::abs(v.y)));
        return std::max(m, 1e-300);
    }();
    const double tol = 1e-12 * scale * scale;
    while (idx.size() > 3) {
        bool clipped = false;
        const std::size_t n = idx.size();
        for (std::size_t k = 0; k < n; ++k) {
            const int ia = idx[(k + n - 1) % n], ib = idx[k], ic = idx[(k + 1) % n];
            const Vec2 a = poly.vertices[static_cast<std::size_t>(ia)], b = poly.vertices[static_cast<std::size_t>(ib)],
                       c = poly.vertices[static_cast<std::size_t>(ic)];
            if (cross(b - a, c - b) <= tol) continue;  // reflex or flat
            bool empty = true;
            for (int j : idx) {
                if (j == ia || j == ib || j == ic) continue;
                if (point_in_triangle(poly.vertices[static_cast<std::size_t>(j)], a, b, c, tol)) {
                    empty = false;
                    break;
                }
            }
            if (!empty) continue;
            out.push_back({ia, ib, ic});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
            clipped = true;
            break;
        }
        if (!clipped) throw validation_error("polygon " + poly.name + " could not be triangulated");
    }
    if (cross(poly.vertices[static_cast<std::size_t>(idx[1])] - poly.vertices[static_cast<std::size_t>(idx[0])],
              poly.vertices[static_cast<std::size_t>(idx[2])] - poly.vertices[static_cast<std::size_t>(idx[1])]) <= 0.0)
        throw validation_error("polygon " + poly.name + " has a degenerate triangle");
    out.push_back({idx[0], idx[1], idx[2]});
    return out;
}

}  // namespace detail

// Requires a valid surface. Triangles use only polygon vertices.
inline Triangulation triangulate(const TranslationSurface& s) {
    require_valid(s);
    Triangulation T;
    T.topo = topology(s);
    const Stratum st = stratum_from(T.topo);
    T.genus = st.genus;
    T.singular = singular_mask(T.topo);
    for (int c = 0; c < T.topo.V(); ++c) T.cone.push_back(two_pi * T.topo.cone_multiple(c));
    T.total_area = area(s);

    std::map<std::pair<int, int>, std::pair<int, int>> polygon_side;          // (poly, edge) -> (tri, side)
    std::map<std::tuple<int, int, int>, std::pair<int, int>> diagonal_side;   // (poly, from, to) -> (tri, side)
    for (std::size_t p = 0; p < s.polygons.size(); ++p) {
        const Polygon& poly = s.polygons[p];
        const int n = poly.size();
        for (const auto& ear : detail::ear_clip(poly)) {
            Triangle t;
            t.polygon = static_cast<int>(p);
            const int id = static_cast<int>(T.tri.size());
            for (int j = 0; j < 3; ++j) {
                t.vert[static_cast<std::size_t>(j)] = ear[static_cast<std::size_t>(j)];
                t.p[static_cast<std::size_t>(j)] = poly.vertices[static_cast<std::size_t>(ear[static_cast<std::size_t>(j)])];
                t.cls[static_cast<std::size_t>(j)] =
                    T.topo.vertex_class[static_cast<std::size_t>(T.topo.offset[p] + ear[static_cast<std::size_t>(j)])];
            }
            for (int j = 0; j < 3; ++j) {
                const Vec2 a = t.p[static_cast<std::size_t>((j + 1) % 3)] - t.p[static_cast<std::size_t>(j)];
                const Vec2 b = t.p[static_cast<std::size_t>((j + 2) % 3)] - t.p[static_cast<std::size_t>(j)];
                t.angle[static_cast<std::size_t>(j)] = ccw_angle(a, b);
                const int from = ear[static_cast<std::size_t>(j)], to = ear[static_cast<std::size_t>((j + 1) % 3)];
                if ((from + 1) % n == to) polygon_side[{static_cast<int>(p), from}] = {id, j};
                else diagonal_side[{static_cast<int>(p), from, to}] = {id, j};
            }
            T.tri.push_back(t);
        }
    }
    for (std::size_t id = 0; id < T.tri.size(); ++id) {
        Triangle& t = T.tri[id];
        const int n = s.polygons[static_cast<std::size_t>(t.polygon)].size();
        for (int j = 0; j < 3; ++j) {
            const int from = t.vert[static_cast<std::size_t>(j)], to = t.vert[static_cast<std::size_t>((j + 1) % 3)];
            std::pair<int, int> other;
            if ((from + 1) % n == to) {
                const int sid = T.topo.offset[static_cast<std::size_t>(t.polygon)] + from;
                const EdgeRef r = T.topo.side[static_cast<std::size_t>(T.topo.partner[static_cast<std::size_t>(sid)])];
                other = polygon_side.at({r.polygon, r.edge});
            } else {
                other = diagonal_side.at({t.polygon, to, from});
            }
            t.nb[static_cast<std::size_t>(j)] = other.first;
            t.nbs[static_cast<std::size_t>(j)] = other.second;
        }
    }
    // corners around each vertex class, counterclockwise
    T.class_corners.assign(static_cast<std::size_t>(T.topo.V()), {});
    std::vector<std::array<char, 3>> seen(T.tri.size(), {0, 0, 0});
    for (std::size_t id = 0; id < T.tri.size(); ++id)
        for (int i = 0; i < 3; ++i) {
            if (seen[id][static_cast<std::size_t>(i)]) continue;
            const int cls = T.tri[id].cls[static_cast<std::size_t>(i)];
            auto& list = T.class_corners[static_cast<std::size_t>(cls)];
            double acc = 0.0;
            int t = static_cast<int>(id), c = i;
            while (!seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)]) {
                seen[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)] = 1;
                list.emplace_back(t, c);
                Triangle& tr = T.tri[static_cast<std::size_t>(t)];
                tr.offset[static_cast<std::size_t>(c)] = acc;
                acc += tr.angle[static_cast<std::size_t>(c)];
                const int j = (c + 2) % 3;
                const int t2 = tr.nb[static_cast<std::size_t>(j)];
                c = tr.nbs[static_cast<std::size_t>(j)];
                t = t2;
            }
        }
    return T;
}

}  // namespace tsf

#endif  // TSF_TRIANGULATION_HPP
