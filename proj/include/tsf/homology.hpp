#ifndef TSF_HOMOLOGY_HPP
#define TSF_HOMOLOGY_HPP

#include <cstdlib>
#include <deque>
#include <string>
#include <vector>

#include "surface.hpp"

namespace tsf {

// Integer 1-chain over the glued edges. Edge g is oriented along side gluings[g].a.
using Chain = std::vector<long long>;

struct EdgeGraph {
    int V = 0;
    int F = 0;
    std::vector<int> tail, head;  // vertex classes
    std::vector<Vec2> hol;
    std::vector<int> face_a, face_b;
    std::vector<int> out_sign;    // per side: +1 if the side is the a-side of its gluing, else -1
};

inline EdgeGraph edge_graph(const TranslationSurface& s, const Topology& t) {
    EdgeGraph g;
    g.V = t.V();
    g.F = t.F();
    g.out_sign.assign(static_cast<std::size_t>(t.sides()), -1);
    for (const auto& gl : s.gluings) {
        const int sa = t.side_id(gl.a);
        g.out_sign[static_cast<std::size_t>(sa)] = 1;
        g.tail.push_back(t.vertex_class[static_cast<std::size_t>(sa)]);
        g.head.push_back(t.vertex_class[static_cast<std::size_t>(t.next_side(sa))]);
        g.hol.push_back(s.edge_vector(gl.a));
        g.face_a.push_back(gl.a.polygon);
        g.face_b.push_back(gl.b.polygon);
    }
    return g;
}

inline Vec2 chain_holonomy(const EdgeGraph& g, const Chain& c) {
    CompensatedSum x, y;
    for (std::size_t e = 0; e < c.size(); ++e) {
        if (!c[e]) continue;
        x.add(static_cast<double>(c[e]) * g.hol[e].x);
        y.add(static_cast<double>(c[e]) * g.hol[e].y);
    }
    return {x.value(), y.value()};
}

// Algebraic intersection number of two closed chains on the 1-skeleton. At each vertex the
// half-edges are visited counterclockwise and beta is pushed off to one side of alpha.
inline long long intersection(const Topology& t, const EdgeGraph& g, const Chain& alpha, const Chain& beta) {
    long long total = 0;
    for (const auto& corners : t.class_corners) {
        long long prefix = 0;
        for (int sid : corners) {
            const std::size_t e = static_cast<std::size_t>(t.gluing_of[static_cast<std::size_t>(sid)]);
            const long long sign = g.out_sign[static_cast<std::size_t>(sid)];
            const long long a_out = sign * alpha[e];
            const long long b_out = sign * beta[e];
            total += b_out * prefix;
            if (b_out < 0) total += b_out * a_out;
            prefix += a_out;
        }
    }
    return total;
}

struct HomologyBasis {
    std::vector<Chain> chains;  // a1, b1, ..., ag, bg, then relative arcs z0 -> zj
    int absolute_count = 0;
    std::string tag;
};

inline std::string basis_tag(const TranslationSurface& s) { return "tc-" + hex64(combinatorial_hash(s)); }

namespace detail {

inline void axpy(Chain& r, long long q, const Chain& b) {
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += q * b[i];
}

// Integer symplectic Gram-Schmidt on a Z-basis of absolute homology.
inline std::vector<Chain> symplectic_basis(std::vector<Chain> pool, const Topology& t, const EdgeGraph& g) {
    std::vector<Chain> out;
    auto form = [&](const Chain& x, const Chain& y) { return intersection(t, g, x, y); };
    while (!pool.empty()) {
        Chain a = pool.front();
        pool.erase(pool.begin());
        // Euclid on the pairings <a, r> until one of them is a unit
        for (;;) {
            std::size_t best = pool.size();
            long long best_abs = 0;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                const long long p = std::llabs(form(a, pool[i]));
                if (p != 0 && (best == pool.size() || p < best_abs)) {
                    best = i;
                    best_abs = p;
                }
            }
            if (best == pool.size()) throw validation_error("rank deficiency in homology basis construction");
            const long long pb = form(a, pool[best]);
            bool changed = false;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (i == best) continue;
                const long long pr = form(a, pool[i]);
                const long long q = pr / pb;
                if (q != 0) {
                    axpy(pool[i], -q, pool[best]);
                    if (pr - q * pb != 0) changed = true;
                }
            }
            if (!changed) {
                if (best_abs != 1) throw validation_error("rank deficiency in homology basis construction");
                Chain b = pool[best];
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
                if (pb < 0)
                    for (auto& v : b) v = -v;
                for (auto& r : pool) {
                    const long long rb = form(r, b), ra = form(r, a);
                    axpy(r, -rb, a);
                    axpy(r, ra, b);
                }
                out.push_back(std::move(a));
                out.push_back(std::move(b));
                break;
            }
        }
    }
    return out;
}

}  // namespace detail

// Tree-cotree construction: BFS spanning tree of the vertex graph from class 0, BFS spanning
// tree of the dual graph over the remaining edges; each leftover edge closes one cycle.
inline HomologyBasis homology_basis(const TranslationSurface& s, const Topology& t, const EdgeGraph& g) {
    const std::size_t E = g.hol.size();
    std::vector<char> in_tree(E, 0), in_cotree(E, 0);
    std::vector<Chain> root_chain(static_cast<std::size_t>(g.V), Chain(E, 0));
    std::vector<char> seen(static_cast<std::size_t>(g.V), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < E; ++e) {
            int other = -1;
            long long dir = 0;
            if (g.tail[e] == u && !seen[static_cast<std::size_t>(g.head[e])]) {
                other = g.head[e];
                dir = 1;
            } else if (g.head[e] == u && !seen[static_cast<std::size_t>(g.tail[e])]) {
                other = g.tail[e];
                dir = -1;
            }
            if (other < 0) continue;
            seen[static_cast<std::size_t>(other)] = 1;
            in_tree[e] = 1;
            root_chain[static_cast<std::size_t>(other)] = root_chain[static_cast<std::size_t>(u)];
            root_chain[static_cast<std::size_t>(other)][e] += dir;
            queue.push_back(other);
        }
    }

    std::vector<char> face_seen(static_cast<std::size_t>(g.F), 0);
    queue = {0};
    face_seen[0] = 1;
    while (!queue.empty()) {
        const int f = queue.front();
        queue.pop_front();
        for (std::size_t e = 0; e < E; ++e) {
            if (in_tree[e]) continue;
            int other = -1;
            if (g.face_a[e] == f && !face_seen[static_cast<std::size_t>(g.face_b[e])]) other = g.face_b[e];
            else if (g.face_b[e] == f && !face_seen[static_cast<std::size_t>(g.face_a[e])]) other = g.face_a[e];
            if (other < 0) continue;
            face_seen[static_cast<std::size_t>(other)] = 1;
            in_cotree[e] = 1;
            queue.push_back(other);
        }
    }

    std::vector<Chain> cycles;
    for (std::size_t e = 0; e < E; ++e) {
        if (in_tree[e] || in_cotree[e]) continue;
        Chain c = root_chain[static_cast<std::size_t>(g.tail[e])];
        c[e] += 1;
        detail::axpy(c, -1, root_chain[static_cast<std::size_t>(g.head[e])]);
        cycles.push_back(std::move(c));
    }
    const Stratum st = stratum_from(t);
    if (static_cast<int>(cycles.size()) != 2 * st.genus)
        throw validation_error("rank deficiency in homology basis construction");

    HomologyBasis hb;
    hb.chains = detail::symplectic_basis(std::move(cycles), t, g);
    hb.absolute_count = static_cast<int>(hb.chains.size());
    const auto z = zero_classes(t);
    for (std::size_t j = 1; j < z.size(); ++j) {
        Chain arc = root_chain[static_cast<std::size_t>(z[j])];
        detail::axpy(arc, -1, root_chain[static_cast<std::size_t>(z[0])]);
        hb.chains.push_back(std::move(arc));
    }
    hb.tag = basis_tag(s);
    return hb;
}

inline HomologyBasis homology_basis(const TranslationSurface& s) {
    const Topology t = topology(s);
    return homology_basis(s, t, edge_graph(s, t));
}

struct PeriodMatrix {
    std::vector<Vec2> columns;  // (Re, Im) of each period
    std::string basis_tag;
    int absolute_count = 0;

    int k() const { return static_cast<int>(columns.size()); }
    double re(int i) const { return columns[static_cast<std::size_t>(i)].x; }
    double im(int i) const { return columns[static_cast<std::size_t>(i)].y; }
};

inline PeriodMatrix periods(const TranslationSurface& s) {
    const Topology t = topology(s);
    const EdgeGraph g = edge_graph(s, t);
    const HomologyBasis hb = homology_basis(s, t, g);
    PeriodMatrix pm;
    pm.basis_tag = hb.tag;
    pm.absolute_count = hb.absolute_count;
    for (const auto& c : hb.chains) pm.columns.push_back(chain_holonomy(g, c));
    return pm;
}

// Area from the absolute periods: sum over symplectic pairs of Re(a)Im(b) - Im(a)Re(b).
inline double bilinear_area(const PeriodMatrix& pm) {
    CompensatedSum a;
    for (int i = 0; i + 1 < pm.absolute_count; i += 2)
        a.add(cross(pm.columns[static_cast<std::size_t>(i)], pm.columns[static_cast<std::size_t>(i) + 1]));
    return a.value();
}

}  // namespace tsf

#endif  // TSF_HOMOLOGY_HPP
