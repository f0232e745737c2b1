#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

#include "diskrot/errors.hpp"

namespace diskrot {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kGolden = 0.6180339887498948482;  // (sqrt 5 - 1) / 2

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Signed angle from a to b in (-pi, pi].
inline double angle_between(const Vec2& a, const Vec2& b) { return std::atan2(cross(a, b), a.dot(b)); }

/// Representative of `angle` in (-pi, pi].
inline double wrap_angle(double angle) {
    double w = std::remainder(angle, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

/// Representative of `angle` in [0, 2pi).
inline double principal_angle(double angle) {
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;
    return a;
}

inline Mat2 rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat2 m;
    m << c, -s, s, c;
    return m;
}

/// Rotation by a quarter turn, z -> i z.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

/// A point of the closed unit disk (or of the plane, for extended maps).
struct DiskPoint {
    double x = 0.0;
    double y = 0.0;

    DiskPoint() = default;
    DiskPoint(double x_, double y_) : x(x_), y(y_) {}
    explicit DiskPoint(const Vec2& v) : x(v.x()), y(v.y()) {}

    static DiskPoint polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

    Vec2 vec() const { return {x, y}; }
    double r() const { return std::hypot(x, y); }
    double theta() const { return principal_angle(std::atan2(y, x)); }

    friend bool operator==(const DiskPoint&, const DiskPoint&) = default;
};

inline double distance(const DiskPoint& a, const DiskPoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// A point of the universal cover of the punctured plane. The lifted angle
/// is theta + 2 pi sheet with theta in [0, 2pi), so deck maps are exact.
struct CoverPoint {
    double theta = 0.0;
    long long sheet = 0;
    double r = 0.0;

    static CoverPoint from_lift(double theta_lift, double r) {
        const double s = std::floor(theta_lift / kTwoPi);
        double t = theta_lift - kTwoPi * s;
        auto sheet = static_cast<long long>(s);
        if (t >= kTwoPi) {
            t -= kTwoPi;
            ++sheet;
        }
        if (t < 0.0) t = 0.0;
        return {t, sheet, r};
    }

    double theta_lift() const { return theta + kTwoPi * static_cast<double>(sheet); }
    DiskPoint project() const { return DiskPoint::polar(r, theta); }

    friend bool operator==(const CoverPoint&, const CoverPoint&) = default;
};

/// Deck transformation T^k: theta_lift -> theta_lift + 2 pi k.
inline CoverPoint deck(const CoverPoint& p, long long k = 1) { return {p.theta, p.sheet + k, p.r}; }

/// Lift of z. With a hint, the branch within pi of the hint's lifted angle;
/// otherwise the representative in [0, 2pi).
inline CoverPoint lift(const DiskPoint& z, std::optional<CoverPoint> hint = std::nullopt) {
    const double r = z.r();
    if (r == 0.0) fail(ErrorKind::ZeroPoint, "the origin has no lift to the universal cover");
    const double theta = z.theta();
    long long sheet = 0;
    if (hint) sheet = static_cast<long long>(std::round((hint->theta_lift() - theta) / kTwoPi));
    return {theta, sheet, r};
}

/// Unit tangent vector at a base point; a point of the blow-up of the diagonal.
struct TangentPair {
    DiskPoint base;
    Vec2 direction;

    TangentPair(DiskPoint b, const Vec2& d) : base(b), direction(d) {
        const double n = d.norm();
        if (!(n > 0.0)) fail(ErrorKind::InvalidArgument, "tangent direction must be nonzero");
        direction /= n;
    }
};

}  // namespace diskrot
