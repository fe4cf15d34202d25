#ifndef TSF_MODULAR_HPP
#define TSF_MODULAR_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "common.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "surface.hpp"
#include "sl2.hpp"

namespace tsf {

// Unit-area tori are points tau = x + iy of the standard fundamental domain
// |x| <= 1/2, |tau| >= 1, with Haar measure dx dy / y^2 (total mass pi/3).
struct ModularPoint {
    double x = 0.0;
    double y = 1.0;
    double weight = 1.0;  // importance weight (1 for the plain sampler)

    Vec2 period1() const { return Vec2{1.0, 0.0} * (1.0 / std::sqrt(y)); }
    Vec2 period2() const { return Vec2{x, y} * (1.0 / std::sqrt(y)); }
    double systole() const { return 1.0 / std::sqrt(y); }
};

inline TranslationSurface modular_torus(const ModularPoint& p) { return parallelogram_torus(p.period1(), p.period2()); }

inline constexpr double fundamental_domain_floor = 0.86602540378443864676;  // sqrt(3)/2

// Exact Haar sample: y has density proportional to y^-2 above sqrt(3)/2, rejection on |tau| < 1.
inline ModularPoint haar_sample(Stream& rng) {
    for (;;) {
        const double x = rng.uniform(-0.5, 0.5);
        const double y = fundamental_domain_floor / rng.uniform_open0();
        if (x * x + y * y >= 1.0) return {x, y, 1.0};
    }
}

// Heavier cusp: y density proportional to y^{-5/4}, weighted by y^{-3/4} to restore Haar.
// Functions growing like y^{3/4} (the recurrence function with exponent 3/2) then have
// bounded weighted values, so the estimator keeps finite variance.
inline ModularPoint cusp_weighted_sample(Stream& rng) {
    for (;;) {
        const double x = rng.uniform(-0.5, 0.5);
        const double u = rng.uniform_open0();
        const double y = fundamental_domain_floor / (u * u * u * u);
        if (x * x + y * y >= 1.0) return {x, y, std::pow(y / fundamental_domain_floor, -0.75)};
    }
}

enum class HaarSampler { plain, cusp_weighted };

struct HaarEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Self-normalised estimate of the Haar mean of f; sample i uses stream (seed, i).
inline HaarEstimate haar_mean(const std::function<double(const ModularPoint&)>& f, std::size_t samples,
                              std::uint64_t seed, HaarSampler kind = HaarSampler::plain) {
    if (samples < 2) throw validation_error("need at least two samples");
    struct Item {
        double w, wf;
    };
    const auto items = parallel_map<Item>(samples, [&](std::size_t i) {
        Stream rng(seed, i);
        const ModularPoint p = kind == HaarSampler::plain ? haar_sample(rng) : cusp_weighted_sample(rng);
        return Item{p.weight, p.weight * f(p)};
    });
    CompensatedSum sw, swf;
    for (const auto& it : items) {
        sw.add(it.w);
        swf.add(it.wf);
    }
    HaarEstimate e;
    e.samples = samples;
    e.mean = swf.value() / sw.value();
    // delta-method standard error of the ratio estimator
    CompensatedSum r2;
    for (const auto& it : items) {
        const double r = it.wf - e.mean * it.w;
        r2.add(r * r);
    }
    const double wbar = sw.value() / static_cast<double>(samples);
    e.std_error = std::sqrt(r2.value() / static_cast<double>(samples - 1) / static_cast<double>(samples)) / wbar;
    return e;
}

}  // namespace tsf

#endif  // TSF_MODULAR_HPP
