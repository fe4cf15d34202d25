#ifndef TSF_COMMON_HPP
#define TSF_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsf {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Errors. The CLI maps each family to an exit code.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class parse_error : public error {
public:
    parse_error(int line, const std::string& what)
        : error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class validation_error : public error {
public:
    using error::error;
};

class cap_exceeded : public error {
public:
    using error::error;
};

class io_error : public error {
public:
    using error::error;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm2(Vec2 a) { return dot(a, a); }

// Counterclockwise angle from a to b, in [0, 2pi).
inline double ccw_angle(Vec2 a, Vec2 b) {
    double t = std::atan2(cross(a, b), dot(a, b));
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t -= two_pi;
    return t;
}

inline Vec2 rotate(Vec2 v, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Lexicographically positive: dx > 0, or dx == 0 and dy > 0 (with tolerance on dx).
inline bool lex_positive(Vec2 v, double tol = 1e-9) {
    const double scale = std::max(1.0, norm(v));
    if (v.x > tol * scale) return true;
    if (v.x < -tol * scale) return false;
    return v.y > 0.0;
}

inline double wrap_angle(double a, double period) {
    double r = std::fmod(a, period);
    if (r < 0.0) r += period;
    if (r >= period) r -= period;
    return r;
}

// Neumaier compensated summation; the result depends only on the input order.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& xs) {
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

inline std::uint64_t fnv1a(const std::string& text, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

}  // namespace tsf

#endif  // TSF_COMMON_HPP
