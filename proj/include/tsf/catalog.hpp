#ifndef TSF_CATALOG_HPP
#define TSF_CATALOG_HPP

#include <cmath>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "billiards.hpp"
#include "drift.hpp"
#include "origami.hpp"
#include "surface.hpp"

namespace tsf {

using CatalogItem = std::variant<TranslationSurface, Origami, RationalPolygon, AffineSubspaceSpec>;

struct CatalogEntry {
    std::string name;
    std::string kind;  // surface | origami | polygon | sheet
    std::string description;
};

inline const std::vector<CatalogEntry>& catalog_entries() {
    static const std::vector<CatalogEntry> entries = {
        {"torus", "surface", "unit square torus"},
        {"octagon", "surface", "regular octagon with side 1, opposite sides glued (H(2))"},
        {"l-origami", "origami", "3-square L-shaped origami, h=(1 2), v=(1 3) (H(2))"},
        {"h11-origami", "origami", "4-square origami h=(1 2)(3 4), v=(1 3) (H(1,1))"},
        {"square-billiard", "polygon", "unit square table"},
        {"right-isosceles", "polygon", "triangle with angles (1/2, 1/4, 1/4) pi, legs 1"},
        {"triangle-pi5", "polygon", "triangle with angles (1/2, 1/5, 3/10) pi"},
        {"triangle-pi8", "polygon", "triangle with angles (1/2, 1/8, 3/8) pi"},
        {"zero-rel-h11", "sheet", "sheet of H(1,1) on which the relative period vanishes"},
    };
    return entries;
}

namespace detail {

inline std::string octagon_text() {
    const double s = std::sqrt(0.5);
    const std::vector<Vec2> v = {{0.0, 0.0}, {1.0, 0.0}, {1.0 + s, s}, {1.0 + s, 1.0 + s},
                                 {1.0, 1.0 + 2.0 * s}, {0.0, 1.0 + 2.0 * s}, {-s, 1.0 + s}, {-s, s}};
    std::string t = "format tsf 1\nlabel octagon\npolygon O";
    for (auto p : v) t += " " + fmt17(p.x) + " " + fmt17(p.y);
    t += "\n";
    for (int i = 0; i < 4; ++i) t += "glue O.e" + std::to_string(i) + " O.e" + std::to_string(i + 4) + "\n";
    return t;
}

inline std::string right_triangle_text(int p, int q) {
    // right angle at the origin, angle p/q pi at (1, 0)
    const double h = std::tan(pi * p / q);
    std::string t = "format poly 1\nvertex 0 0\nvertex 1 0\nvertex 0 " + fmt17(h) + "\n";
    // remaining angle at the apex: (1/2 - p/q) pi
    const int den = std::lcm(2, q);
    int num = den / 2 - p * (den / q);
    const int g = std::gcd(num, den);
    t += "angles 1/2 " + std::to_string(p) + "/" + std::to_string(q) + " " + std::to_string(num / g) + "/" +
         std::to_string(den / g) + "\n";
    return t;
}

}  // namespace detail

inline const char* torus_text =
    "format tsf 1\n"
    "label torus\n"
    "polygon sq 0 0 1 0 1 1 0 1\n"
    "glue sq.e0 sq.e2\n"
    "glue sq.e1 sq.e3\n";

inline std::string catalog_text(const std::string& name);

inline CatalogItem catalog_load(const std::string& name) {
    if (name == "torus") return parse_surface(torus_text);
    if (name == "octagon") return parse_surface(detail::octagon_text());
    if (name == "l-origami" || name == "h11-origami") return parse_origami(catalog_text(name));
    if (name == "square-billiard" || name == "right-isosceles" || name == "triangle-pi5" || name == "triangle-pi8")
        return parse_polygon(catalog_text(name));
    if (name == "zero-rel-h11") return parse_sheets(catalog_text(name)).front();
    throw validation_error("unknown catalog name '" + name + "'");
}

inline std::string catalog_text(const std::string& name) {
    if (name == "torus") return torus_text;
    if (name == "octagon") return detail::octagon_text();
    if (name == "l-origami") return "format origami 1\nsquares 3\nh (1 2)(3)\nv (1 3)(2)\n";
    if (name == "h11-origami") return "format origami 1\nsquares 4\nh (1 2)(3 4)\nv (1 3)(2)(4)\n";
    if (name == "square-billiard")
        return "format poly 1\nvertex 0 0\nvertex 1 0\nvertex 1 1\nvertex 0 1\nangles 1/2 1/2 1/2 1/2\n";
    if (name == "right-isosceles") return detail::right_triangle_text(1, 4);
    if (name == "triangle-pi5") return detail::right_triangle_text(1, 5);
    if (name == "triangle-pi8") return detail::right_triangle_text(1, 8);
    if (name == "zero-rel-h11") {
        // relative period of the h11 origami (unit-normalised) constrained to zero
        const TranslationSurface s = normalize_area(origami_surface(parse_origami(catalog_text("h11-origami"))));
        return "format sheet 1\nbasis " + basis_tag(s) + "\nabsolute 0 1 2 3\neq 0 0 0 0 1\noffset 0 0 0 0 0 0 0 0 0 0\n";
    }
    throw validation_error("unknown catalog name '" + name + "'");
}

inline TranslationSurface catalog_surface(const std::string& name) {
    const CatalogItem item = catalog_load(name);
    if (auto* s = std::get_if<TranslationSurface>(&item)) return *s;
    if (auto* o = std::get_if<Origami>(&item)) return origami_surface(*o, name);
    if (auto* q = std::get_if<RationalPolygon>(&item)) {
        TranslationSurface s = unfold(*q);
        s.label = name;
        return s;
    }
    throw validation_error("catalog entry '" + name + "' is not a surface");
}

}  // namespace tsf

#endif  // TSF_CATALOG_HPP
