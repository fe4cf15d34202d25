#ifndef TSF_DRIFT_HPP
#define TSF_DRIFT_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "flat_geometry.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "sl2.hpp"

namespace tsf {

struct DriftConfig {
    double delta = 0.1;
    double eps = 1.0;
    double lambda = 1.0;
    double k = 1.0;
    double u_exponent = 1.5;  // 1 + delta_u
    int nodes = 1024;

    void validate() const {
        if (!(delta > 0.0 && delta <= 0.1)) throw validation_error("delta must lie in (0, 0.1]");
        if (!(eps > 0.0) || !(lambda > 0.0) || !(k > 0.0) || !(u_exponent > 0.0))
            throw validation_error("drift parameters must be positive");
        if (eps * delta * k > 0.5 + 1e-15) throw validation_error("eps * delta * k must not exceed 1/2");
        if (nodes < 16) throw validation_error("at least 16 quadrature nodes are required");
    }
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------- tautological plane

// Norm at g x of v1 Re(omega) + v2 Im(omega): (u1, u2) = (v1, v2) g^{-1}.
inline double taut_hodge_norm(double v1, double v2, const GroupElement& g) {
    const double u1 = v1 * g.a22 - v2 * g.a21;
    const double u2 = -v1 * g.a12 + v2 * g.a11;
    return std::hypot(u1, u2);
}

// ---------------------------------------------------------------- base point with cached data

// A surface together with what every orbit evaluation needs: periods are transported
// linearly, and on a torus the systole comes from lattice reduction.
// In higher genus the holonomies of x up to a cache radius R are kept: every other saddle
// connection h has |g h| > R / |g|, so the cached minimum is exact whenever it is below that.
class OrbitPoint {
public:
    explicit OrbitPoint(TranslationSurface s, double cache_radius = 0.0) : surface_(std::move(s)) {
        require_valid(surface_);
        periods_ = periods(surface_);
        genus_ = stratum_of(surface_).genus;
        area_ = area(surface_);
        if (genus_ >= 2) {
            radius_ = cache_radius > 0.0 ? cache_radius : 6.0 * std::sqrt(area_);
            for (const auto& sc : saddle_connections(surface_, radius_)) holonomies_.push_back(sc.holonomy);
        }
    }

    const TranslationSurface& surface() const { return surface_; }
    const PeriodMatrix& base_periods() const { return periods_; }
    int genus() const { return genus_; }
    double surface_area() const { return area_; }

    PeriodMatrix periods_at(const GroupElement& g) const { return act(g, periods_); }

    double systole_at(const GroupElement& g) const {
        if (genus_ == 1) {
            const LatticeBasis b = reduce_lattice(g * periods_.columns[0], g * periods_.columns[1]);
            return norm(b.c1);
        }
        double best = infinity;
        for (Vec2 h : holonomies_) best = std::min(best, norm(g * h));
        const double gnorm = std::exp(kak(g).t);
        if (best <= radius_ / gnorm) return best;
        return systole(act(g, surface_));
    }

private:
    TranslationSurface surface_;
    PeriodMatrix periods_;
    int genus_ = 0;
    double area_ = 0.0;
    double radius_ = 0.0;
    std::vector<Vec2> holonomies_;
};

// ---------------------------------------------------------------- recurrence function

struct RecurrenceValue {
    double u = 2.0;
    double systole_used = 0.0;
};

inline RecurrenceValue recurrence_from_systole(double sys, const DriftConfig& cfg) {
    return {std::max(2.0, std::pow(sys, -cfg.u_exponent)), sys};
}

inline void require_unit_area(double a) {
    if (std::abs(a - 1.0) > 1e-6) throw validation_error("surface must have area 1");
}

inline RecurrenceValue recurrence_u(const TranslationSurface& s, const DriftConfig& cfg) {
    require_unit_area(area(s));
    return recurrence_from_systole(systole(s), cfg);
}

// ---------------------------------------------------------------- affine sheets

struct AffineSubspaceSpec {
    std::string name;
    std::string basis_tag;
    std::vector<std::vector<double>> equations;  // real covectors on the k period coordinates
    std::vector<Vec2> offset;                    // reference point on the sheet (Re, Im per coordinate)
    std::vector<char> absolute_mask;
    bool symplectic = false;

    int k() const { return static_cast<int>(offset.size()); }
};

namespace detail {

inline Eigen::MatrixXd equation_matrix(const AffineSubspaceSpec& a) {
    Eigen::MatrixXd E(static_cast<Eigen::Index>(a.equations.size()), a.k());
    for (std::size_t i = 0; i < a.equations.size(); ++i)
        for (int j = 0; j < a.k(); ++j) E(static_cast<Eigen::Index>(i), j) = a.equations[i][static_cast<std::size_t>(j)];
    return E;
}

inline void check_sheet(const AffineSubspaceSpec& a, int line) {
    if (a.basis_tag.empty()) throw parse_error(line, "sheet without basis");
    if (a.offset.empty()) throw parse_error(line, "sheet without offset");
    for (const auto& e : a.equations)
        if (static_cast<int>(e.size()) != a.k()) throw parse_error(line, "equation length does not match offset");
    if (static_cast<int>(a.absolute_mask.size()) != a.k()) throw parse_error(line, "absolute index out of range");
    if (!a.equations.empty()) {
        const Eigen::MatrixXd E = equation_matrix(a);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(E);
        lu.setThreshold(1e-10);
        if (lu.rank() != E.rows()) throw parse_error(line, "rank-deficient sheet equations");
    }
}

}  // namespace detail

// `format sheet 1`; each `basis <tag>` line starts a new sheet, followed by `absolute <indices>`
// (0-based), any number of `eq c1 .. ck`, `offset re1 im1 .. rek imk`, and optionally
// `symplectic` and `name <text>`.
inline std::vector<AffineSubspaceSpec> parse_sheets(const std::string& text) {
    std::vector<AffineSubspaceSpec> out;
    std::vector<int> start_line;
    std::vector<std::vector<long long>> abs_idx;
    for (const auto& [line, content] : detail::content_lines(text, "format sheet 1")) {
        const auto tok = detail::split_ws(content);
        if (tok[0] == "basis") {
            if (tok.size() != 2) throw parse_error(line, "basis needs one tag");
            out.emplace_back();
            out.back().basis_tag = tok[1];
            out.back().name = "sheet" + std::to_string(out.size() - 1);
            start_line.push_back(line);
            abs_idx.emplace_back();
            continue;
        }
        if (out.empty()) throw parse_error(line, "expected 'basis' before '" + tok[0] + "'");
        auto& a = out.back();
        if (tok[0] == "absolute") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                const long long v = detail::parse_integer(tok[i], line);
                if (v < 0) throw parse_error(line, "negative absolute index");
                abs_idx.back().push_back(v);
            }
        } else if (tok[0] == "eq") {
            std::vector<double> e;
            for (std::size_t i = 1; i < tok.size(); ++i) e.push_back(detail::parse_real(tok[i], line));
            if (e.empty()) throw parse_error(line, "empty equation");
            a.equations.push_back(std::move(e));
        } else if (tok[0] == "offset") {
            if ((tok.size() - 1) % 2 != 0 || tok.size() < 3) throw parse_error(line, "offset needs 2k reals");
            a.offset.clear();
            for (std::size_t i = 1; i + 1 < tok.size(); i += 2)
                a.offset.emplace_back(detail::parse_real(tok[i], line), detail::parse_real(tok[i + 1], line));
        } else if (tok[0] == "symplectic") {
            a.symplectic = true;
        } else if (tok[0] == "name") {
            if (tok.size() != 2) throw parse_error(line, "name needs one token");
            a.name = tok[1];
        } else {
            throw parse_error(line, "unknown directive '" + tok[0] + "'");
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto& a = out[i];
        a.absolute_mask.assign(a.offset.size(), 0);
        for (long long v : abs_idx[i]) {
            if (v >= static_cast<long long>(a.offset.size())) throw parse_error(start_line[i], "absolute index out of range");
            a.absolute_mask[static_cast<std::size_t>(v)] = 1;
        }
        detail::check_sheet(a, start_line[i]);
    }
    return out;
}

inline std::string write_sheets(const std::vector<AffineSubspaceSpec>& sheets) {
    std::string t = "format sheet 1\n";
    for (const auto& a : sheets) {
        t += "basis " + a.basis_tag + "\nname " + a.name + "\nabsolute";
        for (int j = 0; j < a.k(); ++j)
            if (a.absolute_mask[static_cast<std::size_t>(j)]) t += " " + std::to_string(j);
        t += "\n";
        for (const auto& e : a.equations) {
            t += "eq";
            for (double c : e) t += " " + detail::fmt17(c);
            t += "\n";
        }
        t += "offset";
        for (auto v : a.offset) t += " " + detail::fmt17(v.x) + " " + detail::fmt17(v.y);
        t += "\n";
        if (a.symplectic) t += "symplectic\n";
    }
    return t;
}

// The sheet moved by g (equations are real, so only the reference point moves).
inline AffineSubspaceSpec act(const GroupElement& g, const AffineSubspaceSpec& a) {
    AffineSubspaceSpec out = a;
    for (auto& v : out.offset) v = g * v;
    return out;
}

// Distance proxy to the sheet: project (P - offset) row-wise onto the row space of the
// equations, then min(1, max(|c_rel|, |c_abs|^{1/2})) with Frobenius norms.
inline double dprime(const PeriodMatrix& pm, const AffineSubspaceSpec& a) {
    if (pm.basis_tag != a.basis_tag || pm.k() != a.k())
        throw validation_error("basis mismatch: periods use " + pm.basis_tag + ", sheet uses " + a.basis_tag);
    const int k = a.k();
    Eigen::MatrixXd C(2, k);
    for (int j = 0; j < k; ++j) {
        C(0, j) = pm.re(j) - a.offset[static_cast<std::size_t>(j)].x;
        C(1, j) = pm.im(j) - a.offset[static_cast<std::size_t>(j)].y;
    }
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(2, k);
    if (!a.equations.empty()) {
        const Eigen::MatrixXd E = detail::equation_matrix(a);
        // rows of C projected onto span(rows of E)
        const Eigen::MatrixXd G = E * E.transpose();
        const Eigen::MatrixXd coef = G.ldlt().solve(E * C.transpose());
        R = (E.transpose() * coef).transpose();
    }
    double abs2 = 0.0, rel2 = 0.0;
    for (int j = 0; j < k; ++j) {
        const double e = R(0, j) * R(0, j) + R(1, j) * R(1, j);
        if (a.absolute_mask[static_cast<std::size_t>(j)]) abs2 += e;
        else rel2 += e;
    }
    return std::min(1.0, std::max(std::sqrt(rel2), std::sqrt(std::sqrt(abs2))));
}

inline double dprime(const TranslationSurface& s, const AffineSubspaceSpec& a, const DriftConfig& cfg = {}) {
    (void)cfg;
    return dprime(periods(s), a);
}

// ---------------------------------------------------------------- Margulis function

struct MargulisValue {
    double value = 0.0;
    bool infinite = false;
    double u = 0.0;
    double s_eps = 0.0;
    int window_count = 0;  // sheets inside the u^{-k} window
};

// Sheets whose basis tag differs from the surface's are not comparable and are skipped.
inline MargulisValue margulis_from(double sys, const PeriodMatrix& pm, const std::vector<AffineSubspaceSpec>& catalog,
                                   const DriftConfig& cfg) {
    MargulisValue out;
    out.u = recurrence_from_systole(sys, cfg).u;
    const double window = std::pow(out.u, -cfg.k);
    CompensatedSum s;
    for (const auto& a : catalog) {
        if (a.basis_tag != pm.basis_tag || a.k() != pm.k()) continue;
        const double d = dprime(pm, a);
        if (d == 0.0) {
            out.infinite = true;
            out.value = infinity;
            return out;
        }
        if (d <= window) {
            s.add(std::pow(d, -cfg.eps * cfg.delta));
            ++out.window_count;
        }
    }
    out.s_eps = s.value();
    out.value = out.s_eps * std::sqrt(out.u) + cfg.lambda * out.u;
    return out;
}

inline MargulisValue margulis_f(const TranslationSurface& s, const std::vector<AffineSubspaceSpec>& catalog,
                                const DriftConfig& cfg) {
    cfg.validate();
    require_unit_area(area(s));
    return margulis_from(systole(s), periods(s), catalog, cfg);
}

// ---------------------------------------------------------------- functions on the orbit

// A function on the SL(2,R)-orbit of a base point, evaluated at g x. +inf marks the infinity flag.
using OrbitFunction = std::function<double(const OrbitPoint&, const GroupElement&)>;

inline OrbitFunction fn_u(const DriftConfig& cfg) {
    return [cfg](const OrbitPoint& x, const GroupElement& g) {
        return recurrence_from_systole(x.systole_at(g), cfg).u;
    };
}

inline OrbitFunction fn_margulis(std::vector<AffineSubspaceSpec> catalog, const DriftConfig& cfg) {
    cfg.validate();
    return [catalog = std::move(catalog), cfg](const OrbitPoint& x, const GroupElement& g) {
        return margulis_from(x.systole_at(g), x.periods_at(g), catalog, cfg).value;
    };
}

inline OrbitFunction fn_power(OrbitFunction f, double p) {
    return [f = std::move(f), p](const OrbitPoint& x, const GroupElement& g) { return std::pow(f(x, g), p); };
}

inline OrbitFunction fn_constant(double c) {
    return [c](const OrbitPoint&, const GroupElement&) { return c; };
}

// Sum with the infinity flag short-circuiting.
inline double checked_mean(const std::vector<double>& v) {
    for (double x : v)
        if (std::isinf(x)) return infinity;
    return compensated_sum(v) / static_cast<double>(v.size());
}

// (1/2pi) int f(g a_t r_theta x) dtheta by the equispaced rule with `nodes` points.
inline double circle_average(const OrbitFunction& f, const OrbitPoint& x, double t, int nodes,
                             const GroupElement& pre = {}) {
    if (nodes < 16) throw validation_error("at least 16 quadrature nodes are required");
    const auto vals = parallel_map<double>(static_cast<std::size_t>(nodes), [&](std::size_t i) {
        const double theta = two_pi * static_cast<double>(i) / nodes;
        return f(x, pre * a_t(t) * r_theta(theta));
    });
    return checked_mean(vals);
}

inline double circle_average(const OrbitFunction& f, const TranslationSurface& s, double t, int nodes) {
    return circle_average(f, OrbitPoint(s), t, nodes);
}

// ---------------------------------------------------------------- observables

struct Observable {
    enum class Kind { constant, sys_bump, sys_indicator, grid } kind = Kind::constant;
    double s0 = 0.0, s1 = 1.0, c = 1.0;
    std::vector<std::pair<double, double>> grid;  // (systole, value), increasing systole

    double operator()(double sys) const {
        switch (kind) {
            case Kind::constant: return c;
            case Kind::sys_bump: return std::clamp((sys - s0) / (s1 - s0), 0.0, 1.0);
            case Kind::sys_indicator: return sys >= s0 ? 1.0 : 0.0;
            case Kind::grid: {
                if (sys <= grid.front().first) return grid.front().second;
                if (sys >= grid.back().first) return grid.back().second;
                auto it = std::upper_bound(grid.begin(), grid.end(), std::make_pair(sys, -infinity));
                const auto& [x1, y1] = *it;
                const auto& [x0, y0] = *(it - 1);
                return y0 + (y1 - y0) * (sys - x0) / (x1 - x0);
            }
        }
        return 0.0;
    }

    static Observable constant(double v = 1.0) {
        Observable o;
        o.kind = Kind::constant;
        o.c = v;
        return o;
    }
    static Observable bump(double s0, double s1) {
        if (!(s1 > s0) || s0 < 0.0) throw validation_error("sys_bump needs 0 <= s0 < s1");
        Observable o;
        o.kind = Kind::sys_bump;
        o.s0 = s0;
        o.s1 = s1;
        return o;
    }
    static Observable indicator(double s0) {
        Observable o;
        o.kind = Kind::sys_indicator;
        o.s0 = s0;
        return o;
    }
    static Observable from_grid(std::vector<std::pair<double, double>> pts) {
        if (pts.size() < 2) throw validation_error("grid observable needs at least two points");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i].second < 0.0 || pts[i].second > 1.0) throw validation_error("grid values must lie in [0,1]");
            if (i && !(pts[i].first > pts[i - 1].first)) throw validation_error("grid systoles must increase");
        }
        Observable o;
        o.kind = Kind::grid;
        o.grid = std::move(pts);
        return o;
    }
};

// "sys_bump:0.3:0.5", "sys_indicator:0.3", "const:1", "grid:x0:y0:x1:y1:..."
inline Observable parse_observable(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = spec.find(':', start);
        parts.push_back(spec.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto num = [&](std::size_t i) { return detail::parse_real(parts.at(i), 0); };
    try {
        if (parts[0] == "sys_bump" && parts.size() == 3) return Observable::bump(num(1), num(2));
        if (parts[0] == "sys_indicator" && parts.size() == 2) return Observable::indicator(num(1));
        if (parts[0] == "const" && parts.size() == 2) return Observable::constant(num(1));
        if (parts[0] == "grid" && parts.size() >= 5 && parts.size() % 2 == 1) {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 1; i + 1 < parts.size(); i += 2) pts.emplace_back(num(i), num(i + 1));
            return Observable::from_grid(std::move(pts));
        }
    } catch (const parse_error&) {
    }
    throw validation_error("bad observable '" + spec + "'");
}

inline OrbitFunction fn_observable(const Observable& obs) {
    if (obs.kind == Observable::Kind::constant)
        return [c = obs.c](const OrbitPoint&, const GroupElement&) { return c; };
    return [obs](const OrbitPoint& x, const GroupElement& g) { return obs(x.systole_at(g)); };
}

// ---------------------------------------------------------------- averaging schemes

struct SchemeSettings {
    int theta_nodes = 256;
    double time_step = 0.05;
    int s_nodes = 256;
    int paths = 4000;
};

namespace detail {

inline std::vector<double> trapezoid_weights(int intervals) {
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1, 1.0);
    w.front() = w.back() = 0.5;
    return w;
}

// sum w_i f_i / sum w_i, each sum compensated
inline double weighted_mean(const std::vector<double>& w, const std::vector<double>& f) {
    CompensatedSum num, den;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (std::isinf(f[i])) return infinity;
        num.add(w[i] * f[i]);
        den.add(w[i]);
    }
    return num.value() / den.value();
}

inline int time_intervals(double T, double step) { return std::max(1, static_cast<int>(std::ceil(T / step - 1e-12))); }

}  // namespace detail

// (1/T) int_0^T (1/|I|) int_I f(a_t r_theta x) dtheta dt
inline double sector_average(const OrbitFunction& f, const OrbitPoint& x, double T, double I0, double I1,
                             const SchemeSettings& cfg = {}) {
    if (!(T > 0.0) || !(I1 > I0) || I1 - I0 > two_pi + 1e-12) throw validation_error("bad sector parameters");
    const bool full = std::abs(I1 - I0 - two_pi) <= 1e-12;
    const int nt = detail::time_intervals(T, cfg.time_step);
    const int nth = cfg.theta_nodes;
    const auto wt = detail::trapezoid_weights(nt);
    std::vector<double> wth = full ? std::vector<double>(static_cast<std::size_t>(nth), 1.0) : detail::trapezoid_weights(nth);
    const std::size_t m = wth.size();
    std::vector<double> w(wt.size() * m);
    for (std::size_t i = 0; i < wt.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) w[i * m + j] = wt[i] * wth[j];
    const auto vals = parallel_map<double>(w.size(), [&](std::size_t idx) {
        const std::size_t i = idx / m, j = idx % m;
        const double t = T * static_cast<double>(i) / nt;
        const double theta = full ? I0 + two_pi * static_cast<double>(j) / nth : I0 + (I1 - I0) * static_cast<double>(j) / nth;
        return f(x, a_t(t) * r_theta(theta));
    });
    return detail::weighted_mean(w, vals);
}

// (1/T) int_0^T (1/r) int_0^r f(a_t u_s x) ds dt
// Trapezoid in t. In s the nodes are r (j + xi) / N with an irrational shift xi: a_t stretches
// the s-segment by e^{2t}, and on arithmetic surfaces (square torus) the rational points j/N of
// the horocycle all run into the cusp, so the unshifted grid aliases badly.
inline constexpr double folner_shift = 0.6180339887498949;

inline double folner_average(const OrbitFunction& f, const OrbitPoint& x, double T, double r,
                             const SchemeSettings& cfg = {}) {
    if (!(T > 0.0) || !(r > 0.0)) throw validation_error("bad Folner parameters");
    const int nt = detail::time_intervals(T, cfg.time_step);
    const auto wt = detail::trapezoid_weights(nt);
    const std::vector<double> ws(static_cast<std::size_t>(cfg.s_nodes), 1.0);
    const std::size_t m = ws.size();
    std::vector<double> w(wt.size() * m);
    for (std::size_t i = 0; i < wt.size(); ++i)
        for (std::size_t j = 0; j < m; ++j) w[i * m + j] = wt[i] * ws[j];
    const auto vals = parallel_map<double>(w.size(), [&](std::size_t idx) {
        const std::size_t i = idx / m, j = idx % m;
        const double t = T * static_cast<double>(i) / nt;
        const double s = r * (static_cast<double>(j) + folner_shift) / cfg.s_nodes;
        return f(x, a_t(t) * u_s(s));
    });
    return detail::weighted_mean(w, vals);
}

// One step of the walk: r(theta1) a(tau) r(theta2), tau uniform on [0, 1].
inline GroupElement sample_step(Stream& rng) {
    const double th1 = two_pi * rng.uniform();
    const double tau = rng.uniform();
    const double th2 = two_pi * rng.uniform();
    return r_theta(th1) * a_t(tau) * r_theta(th2);
}

// (1/n) sum_{k=1}^n E f(g_k x), g_k = h_k ... h_1, estimated from independent paths.
// Genus-one paths are renormalised by lattice reduction after every step; the point in
// moduli space (and every function of it used here) is unchanged.
inline double random_walk_average(const OrbitFunction& f, const OrbitPoint& x, int n, std::uint64_t seed,
                                  const SchemeSettings& cfg = {}) {
    if (n < 1) throw validation_error("random walk needs n >= 1");
    const auto per_path = parallel_map<double>(static_cast<std::size_t>(cfg.paths), [&](std::size_t p) {
        Stream rng(seed, p);
        CompensatedSum acc;
        if (x.genus() == 1) {
            const Vec2 w1 = x.base_periods().columns[0], w2 = x.base_periods().columns[1];
            const double det = cross(w1, w2);
            // (v1 v2) = g (w1 w2) recovers g from the current basis
            const GroupElement winv{w2.y / det, -w2.x / det, -w1.y / det, w1.x / det};
            Vec2 v1 = w1, v2 = w2;
            for (int k = 1; k <= n; ++k) {
                const GroupElement h = sample_step(rng);
                const LatticeBasis b = reduce_lattice(h * v1, h * v2);
                v1 = b.c1;
                v2 = b.c2;
                const double val = f(x, GroupElement{v1.x, v2.x, v1.y, v2.y} * winv);
                if (std::isinf(val)) return infinity;
                acc.add(val);
            }
        } else {
            GroupElement g;
            for (int k = 1; k <= n; ++k) {
                g = sample_step(rng) * g;
                const double val = f(x, g);
                if (std::isinf(val)) return infinity;
                acc.add(val);
            }
        }
        return acc.value() / n;
    });
    return checked_mean(per_path);
}

// Radial KAK parts t of g_n = h_n ... h_1 over independent samples.
inline std::vector<double> walk_radial_samples(int n, int samples, std::uint64_t seed) {
    return parallel_map<double>(static_cast<std::size_t>(samples), [&](std::size_t p) {
        Stream rng(seed, p);
        GroupElement g;
        for (int k = 0; k < n; ++k) g = sample_step(rng) * g;
        return kak(g).t;
    });
}

// ---------------------------------------------------------------- drift experiments

struct DriftReport {
    double t = 0.0;
    int samples = 0;
    double empirical_average = 0.0;
    double input_value = 0.0;
    double fitted_c = 0.0;
    double fitted_b = 0.0;
    double sigma_bound = 1.0;
    double target_c = 0.0;
    double target_b = 0.0;
    bool pass = false;
};

inline DriftReport drift_check(const OrbitFunction& f, const OrbitPoint& x, double t, int nodes, double target_c,
                               double target_b = 0.0) {
    const double fx = f(x, GroupElement{});
    if (std::isinf(fx)) throw validation_error("function is infinite at the base point");
    DriftReport r;
    r.t = t;
    r.samples = nodes;
    r.input_value = fx;
    r.target_c = target_c;
    r.target_b = target_b;
    r.empirical_average = circle_average(f, x, t, nodes);
    r.fitted_c = r.empirical_average / fx;
    r.fitted_b = std::max(0.0, r.empirical_average - target_c * fx);
    double sigma = 1.0;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double v = f(x, a_t(tau));
        sigma = std::max({sigma, v / fx, fx / v});
    }
    r.sigma_bound = sigma;
    r.pass = r.empirical_average <= target_c * fx + target_b;
    return r;
}

// Abstract iteration: from A_tau f <= c0 f + b0 on the sampled orbit pieces and the measured
// sigma' in A_{t+tau} f <= sigma' A_t A_tau f, bound A_{n tau} f(x) and recheck at n = 2, 3.
struct IterationReport {
    double tau = 0.0;
    double sigma_prime = 1.0;
    double c0 = 0.0;
    double kappa = 0.0;
    double b0 = 0.0;
    double f_x = 0.0;
    std::vector<double> measured;  // A_{n tau} f(x), n = 1, 2, 3
    std::vector<double> bound;     // kappa^n f + sigma' b0 (1 - kappa^n)/(1 - kappa)
    bool recheck_pass = false;
};

inline IterationReport iterate_drift(const OrbitFunction& f, const OrbitPoint& x, double tau, int nodes,
                                     double slack = 1e-9) {
    IterationReport r;
    r.tau = tau;
    r.f_x = f(x, GroupElement{});
    if (std::isinf(r.f_x)) throw validation_error("function is infinite at the base point");
    const std::size_t N = static_cast<std::size_t>(nodes);
    // A_{j tau} f(x) for j = 1..3 and, on Y_j = {a_{j tau} r_theta x}, the values f and A_tau f
    std::vector<double> A(4, r.f_x);
    std::vector<std::vector<double>> fY(3), AY(3);
    for (int j = 0; j < 3; ++j) {
        const auto pair = parallel_map<std::pair<double, double>>(N, [&](std::size_t i) {
            const GroupElement gy = a_t(j * tau) * r_theta(two_pi * static_cast<double>(i) / nodes);
            return std::make_pair(f(x, gy), circle_average(f, x, tau, nodes, gy));
        });
        for (const auto& [fy, ay] : pair) {
            fY[static_cast<std::size_t>(j)].push_back(fy);
            AY[static_cast<std::size_t>(j)].push_back(ay);
        }
    }
    // A_{j tau} f(x) is the mean of f over Y_j
    A[1] = checked_mean(fY[1]);
    A[2] = checked_mean(fY[2]);
    A[3] = circle_average(f, x, 3.0 * tau, nodes);
    r.sigma_prime = 1.0;
    for (int j = 1; j <= 2; ++j) {
        const double mean_AY = checked_mean(AY[static_cast<std::size_t>(j)]);
        r.sigma_prime = std::max(r.sigma_prime, A[static_cast<std::size_t>(j) + 1] / mean_AY);
    }
    r.c0 = 0.5 / r.sigma_prime;
    r.kappa = r.c0 * r.sigma_prime;
    r.b0 = 0.0;
    for (int j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < N; ++i)
            r.b0 = std::max(r.b0, AY[static_cast<std::size_t>(j)][i] - r.c0 * fY[static_cast<std::size_t>(j)][i]);
    r.measured = {A[1], A[2], A[3]};
    r.recheck_pass = true;
    for (int n = 1; n <= 3; ++n) {
        const double kn = std::pow(r.kappa, n);
        const double B = kn * r.f_x + r.sigma_prime * r.b0 * (1.0 - kn) / (1.0 - r.kappa);
        r.bound.push_back(B);
        if (n >= 2 && !(r.measured[static_cast<std::size_t>(n) - 1] <= B + slack * std::max(1.0, B))) r.recheck_pass = false;
    }
    return r;
}

// ---------------------------------------------------------------- hyperbolic sandwich

struct HyperbolicReport {
    double fraction = 0.0;
    double delta_obs = 0.0;
    double max_excess = 0.0;  // largest d - (t + s); should not be positive
};

// Deficit t + s - d(a_t r_phi a_s o, o) over an equispaced phi grid; delta_obs is the
// deficit quantile at `target` and fraction the share of nodes with deficit <= delta_obs.
inline HyperbolicReport hyperbolic_fraction(double t, double s, int nodes, double target = 0.5) {
    if (t < 0.0 || s < 0.0) throw validation_error("t and s must be nonnegative");
    if (nodes < 1) throw validation_error("nodes must be positive");
    std::vector<double> deficit(static_cast<std::size_t>(nodes));
    HyperbolicReport r;
    r.max_excess = -infinity;
    for (int i = 0; i < nodes; ++i) {
        const double phi = two_pi * static_cast<double>(i) / nodes;
        // radial part, normalised so that d(a_t o, o) = t
        const double d = kak(a_t(t) * r_theta(phi) * a_t(s)).t;
        deficit[static_cast<std::size_t>(i)] = t + s - d;
        r.max_excess = std::max(r.max_excess, d - (t + s));
    }
    std::vector<double> sorted = deficit;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q = std::min<std::size_t>(sorted.size() - 1,
                                                static_cast<std::size_t>(std::ceil(target * nodes - 1e-12)) - 1);
    r.delta_obs = std::max(0.0, sorted[q]);
    std::size_t count = 0;
    for (double x : deficit)
        if (x <= r.delta_obs + 1e-12) ++count;  // rounding noise in the KAK radius
    r.fraction = static_cast<double>(count) / nodes;
    return r;
}

// ---------------------------------------------------------------- recurrence

// Share of theta on the grid whose occupation time of {systole >= eps_K} along
// a_tau r_theta x, tau in [0, t], is at most t/2.
inline double recurrence_fraction(const OrbitPoint& x, double t, double eps_K, int nodes, double step = 0.05) {
    if (!(t > 0.0)) throw validation_error("t must be positive");
    if (step > 0.05) step = 0.05;
    const int nt = detail::time_intervals(t, step);
    const auto w = detail::trapezoid_weights(nt);
    const double h = t / nt;
    const auto low = parallel_map<int>(static_cast<std::size_t>(nodes), [&](std::size_t i) {
        const double theta = two_pi * static_cast<double>(i) / nodes;
        CompensatedSum occ;
        for (int k = 0; k <= nt; ++k) {
            const double tau = t * static_cast<double>(k) / nt;
            if (x.systole_at(a_t(tau) * r_theta(theta)) >= eps_K) occ.add(w[static_cast<std::size_t>(k)] * h);
        }
        return occ.value() <= 0.5 * t ? 1 : 0;
    });
    long long c = 0;
    for (int v : low) c += v;
    return static_cast<double>(c) / nodes;
}

}  // namespace tsf

#endif  // TSF_DRIFT_HPP
