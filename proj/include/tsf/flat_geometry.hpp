#ifndef TSF_FLAT_GEOMETRY_HPP
#define TSF_FLAT_GEOMETRY_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "parallel.hpp"
#include "sl2.hpp"
#include "triangulation.hpp"

namespace tsf {

struct SaddleConnection {
    Vec2 holonomy;
    int start_class = 0;
    int end_class = 0;
    double start_angle = 0.0;  // position of the outgoing direction inside the start cone
    double end_angle = 0.0;    // position of the direction back along the connection at the end
    double length = 0.0;
};

struct Cylinder {
    Vec2 direction;  // core holonomy, lexicographically positive
    double waist = 0.0;
    double height = 0.0;
    std::vector<SaddleConnection> boundary;  // bottom boundary chain
};

inline constexpr long long default_development_cap = 200000000;

// ---------------------------------------------------------------- development engine

namespace detail {

inline constexpr double collinear_tol = 1e-10;

inline double side_of(Vec2 dir, Vec2 p) {
    // > 0: p counterclockwise of dir; normalised
    const double c = cross(dir, p);
    const double s = norm(dir) * norm(p);
    return s > 0.0 ? c / s : 0.0;
}

// lo and hi are unit vectors once a development has started
struct Wedge {
    Vec2 lo, hi;
    bool lo_closed = true;
};

struct State {
    int tri;
    Vec2 shift;
    int side;  // exit side of tri; its first corner is the clockwise endpoint
    Wedge w;
};

// Part of segment PQ (Q counterclockwise of P seen from the origin) inside the wedge.
inline std::pair<Vec2, Vec2> clip_to_wedge(Vec2 P, Vec2 Q, const Wedge& w) {
    const Vec2 d = Q - P;
    auto along = [&](Vec2 ray) {
        const double den = cross(ray, d);
        if (std::abs(den) < 1e-300) return P;
        const double s = cross(P, d) / den;
        return ray * s;
    };
    const Vec2 a = cross(w.lo, P) < 0.0 ? along(w.lo) : P;
    const Vec2 b = cross(w.hi, Q) > 0.0 ? along(w.hi) : Q;
    return {a, b};
}

inline double segment_distance2(Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double L2 = norm2(d);
    double t = L2 > 0.0 ? -dot(a, d) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm2(a + d * t);
}

// Liang-Barsky test of segment ab against [x0,x1] x [y0,y1] in the frame (u, n).
inline bool segment_meets_box(Vec2 a, Vec2 b, Vec2 u, Vec2 n, double x0, double x1, double y0, double y1) {
    const double ax = dot(a, u), ay = dot(a, n), bx = dot(b, u), by = dot(b, n);
    double t0 = 0.0, t1 = 1.0;
    const double dx = bx - ax, dy = by - ay;
    auto clip = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double r = q / p;
        if (p < 0.0) {
            if (r > t1) return false;
            if (r > t0) t0 = r;
        } else {
            if (r < t0) return false;
            if (r < t1) t1 = r;
        }
        return true;
    };
    return clip(-dx, ax - x0) && clip(dx, x1 - ax) && clip(-dy, ay - y0) && clip(dy, y1 - ay);
}

struct Hit {
    Vec2 pos;        // developed position relative to the origin
    int cls;
    int tri;
    int corner;
};

// Develops straight rays from the origin (a vertex placed at 0) inside the wedge, starting in
// triangle `tri` through its side `side`. Calls on_hit for every vertex met by a ray of the
// wedge; regular vertices are transparent. keep(a, b) decides whether the visible part ab of a
// side is still worth crossing.
template <class Keep, class OnHit>
void develop(const Triangulation& T, State root, Keep&& keep, OnHit&& on_hit, std::atomic<long long>& budget) {
    constexpr long long batch = 4096;  // budget is drawn in batches to keep the atomic off the hot path
    long long local = 0;
    std::vector<State> stack{root};
    while (!stack.empty()) {
        State st = stack.back();
        stack.pop_back();
        if (local == 0) {
            if (budget.fetch_sub(batch, std::memory_order_relaxed) <= 0)
                throw cap_exceeded("developed-triangle cap exceeded");
            local = batch;
        }
        --local;
        const Triangle& t = T.tri[static_cast<std::size_t>(st.tri)];
        const int j = st.side;
        const int t2i = t.nb[static_cast<std::size_t>(j)];
        const int s2 = t.nbs[static_cast<std::size_t>(j)];
        const Triangle& t2 = T.tri[static_cast<std::size_t>(t2i)];
        const Vec2 sh2 = st.shift + t.p[static_cast<std::size_t>((j + 1) % 3)] - t2.p[static_cast<std::size_t>(s2)];
        const int ca = (s2 + 1) % 3, cb = s2, cx = (s2 + 2) % 3;
        const Vec2 A = t2.p[static_cast<std::size_t>(ca)] + sh2;
        const Vec2 B = t2.p[static_cast<std::size_t>(cb)] + sh2;
        const Vec2 X = t2.p[static_cast<std::size_t>(cx)] + sh2;

        auto push = [&](int side, const Wedge& w, Vec2 P, Vec2 Q) {
            const auto [a, b] = clip_to_wedge(P, Q, w);
            if (keep(a, b)) stack.push_back({t2i, sh2, side, w});
        };

        const double nx = norm(X);
        const double inv_nx = nx > 0.0 ? 1.0 / nx : 0.0;
        const double sx_hi = cross(st.w.hi, X) * inv_nx;
        const double sx_lo = cross(st.w.lo, X) * inv_nx;
        if (sx_hi >= -collinear_tol) {
            push(ca, st.w, A, X);
            continue;
        }
        const bool on_lo = std::abs(sx_lo) <= collinear_tol;
        if (sx_lo < -collinear_tol || (on_lo && !st.w.lo_closed)) {
            push(cx, st.w, X, B);
            continue;
        }
        // X is seen by a ray of the wedge
        const int cls = t2.cls[static_cast<std::size_t>(cx)];
        on_hit(Hit{X, cls, t2i, cx});
        const bool sing = T.singular[static_cast<std::size_t>(cls)];
        const Vec2 ux = X * inv_nx;
        if (!on_lo) push(ca, Wedge{st.w.lo, ux, st.w.lo_closed}, A, X);
        push(cx, Wedge{ux, st.w.hi, !sing}, X, B);
    }
}

inline double corner_position(const Triangulation& T, int tri, int corner, Vec2 dir) {
    const Triangle& t = T.tri[static_cast<std::size_t>(tri)];
    const Vec2 a = t.p[static_cast<std::size_t>((corner + 1) % 3)] - t.p[static_cast<std::size_t>(corner)];
    double pos = t.offset[static_cast<std::size_t>(corner)] + ccw_angle(a, dir);
    const double cone = T.cone[static_cast<std::size_t>(t.cls[static_cast<std::size_t>(corner)])];
    return wrap_angle(pos, cone);
}

// Starts a development from corner `corner` of triangle `tri` with the wedge [lo, hi)
// (directions inside the corner). The clockwise far vertex is examined first.
template <class Keep, class OnHit>
void develop_corner(const Triangulation& T, int tri, int corner, Wedge w, Keep&& keep, OnHit&& on_hit,
                    std::atomic<long long>& budget) {
    w.lo = w.lo * (1.0 / norm(w.lo));
    w.hi = w.hi * (1.0 / norm(w.hi));
    const Triangle& t = T.tri[static_cast<std::size_t>(tri)];
    const Vec2 shift = Vec2{} - t.p[static_cast<std::size_t>(corner)];
    const int ia = (corner + 1) % 3, ib = (corner + 2) % 3;
    const Vec2 A = t.p[static_cast<std::size_t>(ia)] + shift;
    const Vec2 B = t.p[static_cast<std::size_t>(ib)] + shift;
    if (w.lo_closed && std::abs(side_of(w.lo, A)) <= collinear_tol && dot(w.lo, A) > 0.0) {
        const int cls = t.cls[static_cast<std::size_t>(ia)];
        on_hit(Hit{A, cls, tri, ia});
        if (T.singular[static_cast<std::size_t>(cls)]) w.lo_closed = false;
    }
    const auto [a, b] = clip_to_wedge(A, B, w);
    if (keep(a, b)) develop(T, State{tri, shift, ia, w}, keep, on_hit, budget);
}

}  // namespace detail

// ---------------------------------------------------------------- saddle connections

inline std::vector<SaddleConnection> saddle_connections(const Triangulation& T, double Lmax,
                                                        long long cap = default_development_cap) {
    if (!(Lmax > 0.0)) throw validation_error("Lmax must be positive");
    struct Root {
        int tri, corner;
    };
    std::vector<Root> roots;
    for (std::size_t c = 0; c < T.class_corners.size(); ++c) {
        if (!T.singular[c]) continue;
        for (auto [t, i] : T.class_corners[c]) roots.push_back({t, i});
    }
    std::atomic<long long> budget{cap};
    const double reach = Lmax * (1.0 + 1e-12);
    auto per_root = parallel_map<std::vector<SaddleConnection>>(roots.size(), [&](std::size_t r) {
        std::vector<SaddleConnection> out;
        const Root root = roots[r];
        const Triangle& t = T.tri[static_cast<std::size_t>(root.tri)];
        const Vec2 a = t.p[static_cast<std::size_t>((root.corner + 1) % 3)] - t.p[static_cast<std::size_t>(root.corner)];
        const Vec2 b = t.p[static_cast<std::size_t>((root.corner + 2) % 3)] - t.p[static_cast<std::size_t>(root.corner)];
        const int start_cls = t.cls[static_cast<std::size_t>(root.corner)];
        const double reach2 = reach * reach;
        auto keep = [&](Vec2 p, Vec2 q) { return detail::segment_distance2(p, q) <= reach2; };
        auto on_hit = [&](const detail::Hit& h) {
            if (!T.singular[static_cast<std::size_t>(h.cls)]) return;
            const double len = norm(h.pos);
            if (len > reach) return;
            SaddleConnection sc;
            sc.holonomy = h.pos;
            sc.length = len;
            sc.start_class = start_cls;
            sc.end_class = h.cls;
            sc.start_angle = detail::corner_position(T, root.tri, root.corner, h.pos);
            sc.end_angle = detail::corner_position(T, h.tri, h.corner, -h.pos);
            out.push_back(sc);
        };
        detail::develop_corner(T, root.tri, root.corner, detail::Wedge{a, b, true}, keep, on_hit, budget);
        return out;
    });
    std::vector<SaddleConnection> all;
    for (auto& v : per_root) all.insert(all.end(), v.begin(), v.end());

    // canonical order; duplicates (same holonomy, endpoints and cone positions) removed
    auto key_less = [](const SaddleConnection& x, const SaddleConnection& y) {
        if (x.start_class != y.start_class) return x.start_class < y.start_class;
        return x.start_angle < y.start_angle;
    };
    std::stable_sort(all.begin(), all.end(), key_less);
    std::vector<SaddleConnection> uniq;
    for (const auto& sc : all) {
        if (!uniq.empty()) {
            const auto& u = uniq.back();
            const Vec2 d = u.holonomy - sc.holonomy;
            if (u.start_class == sc.start_class && u.end_class == sc.end_class &&
                std::abs(u.start_angle - sc.start_angle) <= 1e-9 && std::max(std::abs(d.x), std::abs(d.y)) <= 1e-9)
                continue;
        }
        uniq.push_back(sc);
    }
    std::stable_sort(uniq.begin(), uniq.end(), [](const SaddleConnection& x, const SaddleConnection& y) {
        if (x.length != y.length) return x.length < y.length;
        if (x.start_class != y.start_class) return x.start_class < y.start_class;
        return x.start_angle < y.start_angle;
    });
    return uniq;
}

inline std::vector<SaddleConnection> saddle_connections(const TranslationSurface& s, double Lmax,
                                                        long long cap = default_development_cap) {
    return saddle_connections(triangulate(s), Lmax, cap);
}

// ---------------------------------------------------------------- genus one

// Primitive vectors p*c1 + q*c2 of length <= L, one per +- pair (lexicographically positive).
inline std::vector<Vec2> primitive_lattice_vectors(Vec2 c1, Vec2 c2, double L, std::size_t cap = 500000000) {
    std::vector<Vec2> out;
    const double a = std::abs(cross(c1, c2));
    if (a <= 0.0) throw validation_error("degenerate lattice");
    const double reach = L * (1.0 + 1e-12);
    const double n1 = norm(c1);
    const long long qmax = static_cast<long long>(std::floor(reach * n1 / a)) + 1;
    for (long long q = -qmax; q <= qmax; ++q) {
        // |p c1 + q c2|^2 <= L^2 solved for p
        const double A = norm2(c1), Bc = 2.0 * q * dot(c1, c2), C = static_cast<double>(q) * q * norm2(c2) - reach * reach;
        const double disc = Bc * Bc - 4.0 * A * C;
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        const long long p0 = static_cast<long long>(std::floor((-Bc - sq) / (2.0 * A))) - 1;
        const long long p1 = static_cast<long long>(std::ceil((-Bc + sq) / (2.0 * A))) + 1;
        for (long long p = p0; p <= p1; ++p) {
            if (std::gcd(p, q) != 1) continue;
            const Vec2 v = c1 * static_cast<double>(p) + c2 * static_cast<double>(q);
            if (norm(v) > reach || !lex_positive(v, 1e-13)) continue;
            out.push_back(v);
            if (out.size() > cap) throw cap_exceeded("lattice enumeration cap exceeded");
        }
    }
    return out;
}

// ---------------------------------------------------------------- cylinders

namespace detail {

inline void sort_cylinders(std::vector<Cylinder>& cyl) {
    std::stable_sort(cyl.begin(), cyl.end(), [](const Cylinder& x, const Cylinder& y) {
        if (x.waist != y.waist) return x.waist < y.waist;
        const double ax = std::atan2(x.direction.y, x.direction.x), ay = std::atan2(y.direction.y, y.direction.x);
        if (ax != ay) return ax < ay;
        return x.height < y.height;
    });
}

// Height of the cylinder whose bottom boundary starts with sc (cylinder to the left).
inline double cylinder_height(const Triangulation& T, const SaddleConnection& sc, double waist,
                              std::atomic<long long>& budget) {
    const Vec2 d = sc.holonomy;
    const Vec2 u = d * (1.0 / norm(d));
    const Vec2 n{-u.y, u.x};
    const double hmax = T.total_area / waist;
    const double tol = 1e-9 * std::max(1.0, std::max(waist, hmax));
    const double x0 = -tol, x1 = waist + tol, y0 = -tol, y1 = hmax * (1.0 + 1e-9) + tol;
    double best = std::numeric_limits<double>::infinity();
    auto keep = [&](Vec2 p, Vec2 q) { return segment_meets_box(p, q, u, n, x0, x1, y0, y1); };
    auto on_hit = [&](const Hit& h) {
        if (!T.singular[static_cast<std::size_t>(h.cls)]) return;
        const double x = dot(h.pos, u), y = dot(h.pos, n);
        if (y > tol && y <= y1 && x >= x0 && x <= x1) best = std::min(best, y);
    };
    // corners of the start cone covering the open half-plane to the left of d
    const auto& corners = T.class_corners[static_cast<std::size_t>(sc.start_class)];
    const double cone = T.cone[static_cast<std::size_t>(sc.start_class)];
    std::size_t k0 = corners.size();
    double rel0 = 0.0;
    for (std::size_t k = 0; k < corners.size(); ++k) {
        const auto [ti, ci] = corners[k];
        const Triangle& t = T.tri[static_cast<std::size_t>(ti)];
        const double rel = wrap_angle(sc.start_angle - t.offset[static_cast<std::size_t>(ci)], cone);
        if (rel < t.angle[static_cast<std::size_t>(ci)] - 1e-12 || rel > cone - 1e-12) {
            k0 = k;
            rel0 = rel > cone - 1e-12 ? 0.0 : rel;
            break;
        }
    }
    if (k0 == corners.size()) throw error("cylinder start direction not found in its cone");
    double acc = -rel0;
    for (std::size_t m = 0; m < corners.size() && acc < pi - 1e-9; ++m) {
        const auto [ti, ci] = corners[(k0 + m) % corners.size()];
        const Triangle& t = T.tri[static_cast<std::size_t>(ti)];
        const Vec2 a = t.p[static_cast<std::size_t>((ci + 1) % 3)] - t.p[static_cast<std::size_t>(ci)];
        const Vec2 b = t.p[static_cast<std::size_t>((ci + 2) % 3)] - t.p[static_cast<std::size_t>(ci)];
        const double ang = t.angle[static_cast<std::size_t>(ci)];
        Wedge w{a, b, true};
        if (m == 0) {
            w.lo = d;
            w.lo_closed = false;
        }
        if (acc + ang > pi + 1e-9) w.hi = -d;
        develop_corner(T, ti, ci, w, keep, on_hit, budget);
        acc += ang;
    }
    if (!std::isfinite(best)) throw error("cylinder height search found no boundary point");
    return best;
}

}  // namespace detail

// Cylinders with waist <= Lmax. Each cylinder is found from the saddle connections on its
// bottom boundary (the cylinder lies to their left).
inline std::vector<Cylinder> cylinders(const Triangulation& T, double Lmax, bool with_heights = true,
                                       long long cap = default_development_cap) {
    const auto scs = saddle_connections(T, Lmax, cap);
    std::vector<std::vector<std::pair<double, std::size_t>>> by_start(T.class_corners.size());
    for (std::size_t i = 0; i < scs.size(); ++i)
        by_start[static_cast<std::size_t>(scs[i].start_class)].emplace_back(scs[i].start_angle, i);
    for (auto& v : by_start) std::sort(v.begin(), v.end());

    auto find_start = [&](int cls, double pos) -> std::optional<std::size_t> {
        const auto& v = by_start[static_cast<std::size_t>(cls)];
        const double cone = T.cone[static_cast<std::size_t>(cls)];
        const double tol = 1e-8;
        auto it = std::lower_bound(v.begin(), v.end(), std::make_pair(pos - tol, std::size_t{0}));
        if (it != v.end() && it->first <= pos + tol) return it->second;
        // wrap-around at the cone seam
        if (pos < tol && !v.empty() && v.back().first >= cone + pos - tol) return v.back().second;
        if (pos > cone - tol && !v.empty() && v.front().first <= pos - cone + tol) return v.front().second;
        return std::nullopt;
    };

    std::vector<char> used(scs.size(), 0);
    struct Chain {
        std::vector<std::size_t> members;
        double waist;
        Vec2 core;
    };
    std::vector<Chain> chains;
    for (std::size_t i = 0; i < scs.size(); ++i) {
        if (used[i] || !lex_positive(scs[i].holonomy)) continue;
        const Vec2 u = scs[i].holonomy * (1.0 / scs[i].length);
        Chain ch{{i}, scs[i].length, scs[i].holonomy};
        std::size_t cur = i;
        bool closed = false;
        for (std::size_t guard = 0; guard <= scs.size(); ++guard) {
            const auto& c = scs[cur];
            const double cone = T.cone[static_cast<std::size_t>(c.end_class)];
            const auto nxt = find_start(c.end_class, wrap_angle(c.end_angle - pi, cone));
            if (!nxt) break;
            const Vec2 v = scs[*nxt].holonomy * (1.0 / scs[*nxt].length);
            if (std::abs(cross(u, v)) > 1e-8 || dot(u, v) < 0.0) break;
            if (*nxt == i) {
                closed = true;
                break;
            }
            if (used[*nxt]) break;
            ch.members.push_back(*nxt);
            ch.waist += scs[*nxt].length;
            ch.core += scs[*nxt].holonomy;
            cur = *nxt;
            if (ch.waist > Lmax * (1.0 + 1e-12)) break;
        }
        if (!closed || ch.waist > Lmax * (1.0 + 1e-12)) continue;
        for (auto m : ch.members) used[m] = 1;
        chains.push_back(std::move(ch));
    }

    std::atomic<long long> budget{cap};
    std::vector<Cylinder> out = parallel_map<Cylinder>(chains.size(), [&](std::size_t k) {
        const Chain& ch = chains[k];
        Cylinder c;
        c.direction = ch.core;
        c.waist = ch.waist;
        for (auto m : ch.members) c.boundary.push_back(scs[m]);
        if (with_heights) c.height = detail::cylinder_height(T, scs[ch.members.front()], ch.waist, budget);
        return c;
    });
    detail::sort_cylinders(out);
    return out;
}

// On a torus the cap bounds the number of lattice vectors.
inline std::vector<Cylinder> torus_cylinders(const TranslationSurface& s, double Lmax,
                                             long long cap = default_development_cap) {
    const auto [v1, v2] = torus_periods(s);
    const LatticeBasis b = reduce_lattice(v1, v2);
    const double a = std::abs(cross(b.c1, b.c2));
    std::vector<Cylinder> out;
    for (Vec2 v : primitive_lattice_vectors(b.c1, b.c2, Lmax, static_cast<std::size_t>(cap))) {
        Cylinder c;
        c.direction = v;
        c.waist = norm(v);
        c.height = a / c.waist;
        out.push_back(std::move(c));
    }
    detail::sort_cylinders(out);
    return out;
}

inline std::vector<Cylinder> cylinders(const TranslationSurface& s, double Lmax, bool with_heights = true,
                                       long long cap = default_development_cap) {
    if (!(Lmax > 0.0)) throw validation_error("Lmax must be positive");
    const Triangulation T = triangulate(s);
    if (T.genus == 1) return torus_cylinders(s, Lmax, cap);
    return cylinders(T, Lmax, with_heights, cap);
}

// Sorted waists only (no heights); the input to counting functions.
inline std::vector<double> cylinder_waists(const TranslationSurface& s, double Lmax,
                                           long long cap = default_development_cap) {
    std::vector<double> w;
    if (!(Lmax > 0.0)) throw validation_error("Lmax must be positive");
    if (triangulate(s).genus == 1) {
        const auto [v1, v2] = torus_periods(s);
        const LatticeBasis b = reduce_lattice(v1, v2);
        for (Vec2 v : primitive_lattice_vectors(b.c1, b.c2, Lmax, static_cast<std::size_t>(cap))) w.push_back(norm(v));
    } else {
        for (const auto& c : cylinders(s, Lmax, false, cap)) w.push_back(c.waist);
    }
    std::sort(w.begin(), w.end());
    return w;
}

// ---------------------------------------------------------------- systole

inline double systole(const TranslationSurface& s, long long cap = default_development_cap) {
    const Triangulation T = triangulate(s);
    if (T.genus == 1) {
        const auto [v1, v2] = torus_periods(s);
        return norm(reduce_lattice(v1, v2).c1);
    }
    double L = std::sqrt(T.total_area);
    for (int iter = 0; iter < 60; ++iter) {
        const auto scs = saddle_connections(T, L, cap);
        if (!scs.empty()) return scs.front().length;
        L *= 2.0;
    }
    throw cap_exceeded("systole search radius cap exceeded");
}

// Same quantity through the general development (used to cross-check the lattice path).
inline double systole_by_development(const TranslationSurface& s, long long cap = default_development_cap) {
    const Triangulation T = triangulate(s);
    double L = std::sqrt(T.total_area);
    for (int iter = 0; iter < 60; ++iter) {
        const auto scs = saddle_connections(T, L, cap);
        if (!scs.empty()) return scs.front().length;
        L *= 2.0;
    }
    throw cap_exceeded("systole search radius cap exceeded");
}

}  // namespace tsf

#endif  // TSF_FLAT_GEOMETRY_HPP
