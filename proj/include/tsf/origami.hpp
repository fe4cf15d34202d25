#ifndef TSF_ORIGAMI_HPP
#define TSF_ORIGAMI_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "surface.hpp"

namespace tsf {

// Permutations are 0-based internally and printed 1-based. Products act on the right:
// (a*b)(i) = b(a(i)).
using Perm = std::vector<int>;

inline Perm identity_perm(int n) {
    Perm p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    return p;
}

inline Perm perm_inverse(const Perm& p) {
    Perm q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[static_cast<std::size_t>(p[i])] = static_cast<int>(i);
    return q;
}

// apply a first, then b
inline Perm perm_then(const Perm& a, const Perm& b) {
    Perm out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = b[static_cast<std::size_t>(a[i])];
    return out;
}

inline std::vector<std::vector<int>> perm_cycles(const Perm& p) {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(p.size(), 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        std::vector<int> cyc;
        for (int j = static_cast<int>(i); !seen[static_cast<std::size_t>(j)]; j = p[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            cyc.push_back(j);
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

inline std::string cycle_notation(const Perm& p) {
    std::string out;
    for (const auto& c : perm_cycles(p)) {
        out += "(";
        for (std::size_t i = 0; i < c.size(); ++i) out += (i ? " " : "") + std::to_string(c[i] + 1);
        out += ")";
    }
    return out;
}

struct Origami {
    int n = 1;
    Perm h{0};  // right neighbour
    Perm v{0};  // top neighbour

    bool operator==(const Origami&) const = default;
    bool operator<(const Origami& o) const { return std::tie(n, h, v) < std::tie(o.n, o.h, o.v); }
};

inline bool is_permutation(const Perm& p, int n) {
    if (static_cast<int>(p.size()) != n) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int x : p) {
        if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) return false;
        seen[static_cast<std::size_t>(x)] = 1;
    }
    return true;
}

inline bool is_transitive(const Origami& o) {
    std::vector<char> seen(static_cast<std::size_t>(o.n), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int i = q.front();
        q.pop_front();
        for (int j : {o.h[static_cast<std::size_t>(i)], o.v[static_cast<std::size_t>(i)]}) {
            if (!seen[static_cast<std::size_t>(j)]) {
                seen[static_cast<std::size_t>(j)] = 1;
                ++count;
                q.push_back(j);
            }
        }
    }
    return count == o.n;
}

inline void require_valid(const Origami& o) {
    if (o.n < 1) throw validation_error("origami needs at least one square");
    if (!is_permutation(o.h, o.n) || !is_permutation(o.v, o.n)) throw validation_error("origami maps are not permutations");
    if (!is_transitive(o)) throw validation_error("origami is not connected");
}

namespace detail {
// "(1 2 3)(4)" -> 0-based permutation on n points; unmentioned points are fixed
inline Perm parse_cycles(const std::string& text, int n, int line) {
    Perm p = identity_perm(n);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    skip();
    if (i < text.size() && text.substr(i) == "()") return p;
    while (i < text.size()) {
        if (text[i] != '(') throw parse_error(line, "expected '(' in cycle notation");
        ++i;
        std::vector<int> cyc;
        for (;;) {
            skip();
            if (i >= text.size()) throw parse_error(line, "unterminated cycle");
            if (text[i] == ')') { ++i; break; }
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == i) throw parse_error(line, "expected a square index");
            const long long x = parse_integer(text.substr(i, j - i), line);
            if (x < 1 || x > n) throw parse_error(line, "square index out of range");
            if (used[static_cast<std::size_t>(x - 1)]) throw parse_error(line, "square repeated in cycles");
            used[static_cast<std::size_t>(x - 1)] = 1;
            cyc.push_back(static_cast<int>(x - 1));
            i = j;
            skip();
            if (i < text.size() && text[i] == ',') ++i;
        }
        for (std::size_t k = 0; k < cyc.size(); ++k) p[static_cast<std::size_t>(cyc[k])] = cyc[(k + 1) % cyc.size()];
        skip();
    }
    return p;
}
}  // namespace detail

inline Origami parse_origami(const std::string& text) {
    Origami o;
    int n = -1;
    std::string htext, vtext;
    int hline = 0, vline = 0;
    for (const auto& [line, content] : detail::content_lines(text, "format origami 1")) {
        const auto tok = detail::split_ws(content);
        const std::string rest = content.substr(content.find(tok[0]) + tok[0].size());
        if (tok[0] == "squares") {
            if (tok.size() != 2) throw parse_error(line, "squares needs one integer");
            const long long v = detail::parse_integer(tok[1], line);
            if (v < 1 || v > 1000000) throw parse_error(line, "square count out of range");
            n = static_cast<int>(v);
        } else if (tok[0] == "h") {
            htext = rest;
            hline = line;
        } else if (tok[0] == "v") {
            vtext = rest;
            vline = line;
        } else {
            throw parse_error(line, "unknown directive '" + tok[0] + "'");
        }
    }
    if (n < 0) throw parse_error(1, "missing 'squares' line");
    if (!hline || !vline) throw parse_error(1, "missing 'h' or 'v' line");
    o.n = n;
    o.h = detail::parse_cycles(htext, n, hline);
    o.v = detail::parse_cycles(vtext, n, vline);
    require_valid(o);
    return o;
}

inline std::string write_origami(const Origami& o) {
    return "format origami 1\nsquares " + std::to_string(o.n) + "\nh " + cycle_notation(o.h) + "\nv " +
           cycle_notation(o.v) + "\n";
}

inline std::string origami_line(const Origami& o) {
    return std::to_string(o.n) + " " + cycle_notation(o.h) + " " + cycle_notation(o.v);
}

// Unit squares side by side; e0 bottom, e1 right, e2 top, e3 left.
inline TranslationSurface origami_surface(const Origami& o, const std::string& label = "") {
    TranslationSurface s;
    s.label = label;
    for (int i = 0; i < o.n; ++i) {
        const double x = i;
        s.polygons.push_back({"s" + std::to_string(i + 1), {{x, 0.0}, {x + 1.0, 0.0}, {x + 1.0, 1.0}, {x, 1.0}}});
    }
    for (int i = 0; i < o.n; ++i) s.gluings.push_back({{i, 1}, {o.h[static_cast<std::size_t>(i)], 3}});
    for (int i = 0; i < o.n; ++i) s.gluings.push_back({{i, 2}, {o.v[static_cast<std::size_t>(i)], 0}});
    return s;
}

// Cone points from the commutator: square i's lower-left corner goes to v(h(v^-1(h^-1(i)))).
inline Perm vertex_permutation(const Origami& o) {
    const Perm hi = perm_inverse(o.h), vi = perm_inverse(o.v);
    Perm c(static_cast<std::size_t>(o.n));
    for (int i = 0; i < o.n; ++i)
        c[static_cast<std::size_t>(i)] =
            o.v[static_cast<std::size_t>(o.h[static_cast<std::size_t>(vi[static_cast<std::size_t>(hi[static_cast<std::size_t>(i)])])])];
    return c;
}

inline Stratum origami_stratum(const Origami& o) {
    Stratum st;
    int total = 0;
    for (const auto& cyc : perm_cycles(vertex_permutation(o))) {
        const int a = static_cast<int>(cyc.size()) - 1;
        if (a > 0) st.alpha.push_back(a);
        total += a;
    }
    std::sort(st.alpha.rbegin(), st.alpha.rend());
    st.genus = 1 + total / 2;
    st.zero_count = st.genus == 1 ? 1 : static_cast<int>(st.alpha.size());
    return st;
}

// ---------------------------------------------------------------- SL(2,Z) action

enum class ModularGen { S, T };

// T = ((1,1),(0,1)): (h, v) -> (h, v h^-1);  S = ((0,-1),(1,0)): (h, v) -> (v^-1, h).
inline Origami origami_act(ModularGen g, const Origami& o) {
    Origami out;
    out.n = o.n;
    if (g == ModularGen::T) {
        out.h = o.h;
        out.v = perm_then(o.v, perm_inverse(o.h));
    } else {
        out.h = perm_inverse(o.v);
        out.v = o.h;
    }
    return out;
}

// Lexicographically least relabeling over BFS orders (h-neighbour before v-neighbour)
// from every starting square.
inline Origami canonical_form(const Origami& o) {
    Origami best;
    bool have = false;
    const std::size_t n = static_cast<std::size_t>(o.n);
    std::vector<int> label(n), order;
    order.reserve(n);
    for (int start = 0; start < o.n; ++start) {
        std::fill(label.begin(), label.end(), -1);
        order.clear();
        label[static_cast<std::size_t>(start)] = 0;
        order.push_back(start);
        for (std::size_t k = 0; k < order.size(); ++k) {
            const int i = order[k];
            for (int j : {o.h[static_cast<std::size_t>(i)], o.v[static_cast<std::size_t>(i)]}) {
                if (label[static_cast<std::size_t>(j)] < 0) {
                    label[static_cast<std::size_t>(j)] = static_cast<int>(order.size());
                    order.push_back(j);
                }
            }
        }
        if (order.size() != n) throw validation_error("origami is not connected");
        Origami c;
        c.n = o.n;
        c.h.resize(n);
        c.v.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            c.h[static_cast<std::size_t>(label[i])] = label[static_cast<std::size_t>(o.h[i])];
            c.v[static_cast<std::size_t>(label[i])] = label[static_cast<std::size_t>(o.v[i])];
        }
        if (!have || std::tie(c.h, c.v) < std::tie(best.h, best.v)) {
            best = std::move(c);
            have = true;
        }
    }
    return best;
}

inline bool isomorphic(const Origami& a, const Origami& b) {
    return a.n == b.n && canonical_form(a) == canonical_form(b);
}

struct OrbitResult {
    std::vector<Origami> members;  // canonical forms, in discovery order
    bool capped = false;
};

inline constexpr std::size_t default_orbit_cap = 1000000;

// Breadth-first closure under S and T, deduplicated by canonical form.
inline OrbitResult origami_orbit(const Origami& o, std::size_t cap = default_orbit_cap) {
    OrbitResult r;
    std::set<Origami> seen;
    const Origami start = canonical_form(o);
    seen.insert(start);
    r.members.push_back(start);
    for (std::size_t k = 0; k < r.members.size(); ++k) {
        for (ModularGen g : {ModularGen::S, ModularGen::T}) {
            Origami next = canonical_form(origami_act(g, r.members[k]));
            if (seen.count(next)) continue;
            if (r.members.size() >= cap) {
                r.capped = true;
                return r;
            }
            seen.insert(next);
            r.members.push_back(std::move(next));
        }
    }
    return r;
}

}  // namespace tsf

#endif  // TSF_ORIGAMI_HPP
