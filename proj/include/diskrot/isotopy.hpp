#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "diskrot/conjugacy.hpp"
#include "diskrot/geometry.hpp"

namespace diskrot {

enum class FamilyTag { RigidRotation, RadialProfile, Conjugated, PlaneExtension, Iterated };

inline std::string to_string(FamilyTag tag) {
    switch (tag) {
        case FamilyTag::RigidRotation: return "rigid";
        case FamilyTag::RadialProfile: return "radial";
        case FamilyTag::Conjugated: return "conjugated";
        case FamilyTag::PlaneExtension: return "plane-extension";
        case FamilyTag::Iterated: return "iterated";
    }
    return "unknown";
}

/// Returns a warning when x is within tol of p/q for some q <= max_q.
inline std::optional<std::string> near_rational(double x, double tol = 1e-12, int max_q = 64) {
    for (int q = 1; q <= max_q; ++q) {
        const double p = std::round(x * q);
        if (std::abs(x - p / q) <= tol)
            return "NearRational: " + std::to_string(x) + " is within " + std::to_string(tol) + " of " +
                   std::to_string(static_cast<long long>(p)) + "/" + std::to_string(q);
    }
    return std::nullopt;
}

struct RigidRotation {
    double alpha = 0.0;
};

/// f_t(z) = R_{2 pi t rho(|z|)} z. Exactly area-preserving for any profile.
struct RadialProfile {
    std::function<double(double)> rho;
    std::function<double(double)> rho_prime;
    std::string name;
};

/// f_t = g o R_{2 pi t alpha} o g^-1.
struct Conjugated {
    double alpha = 0.0;
    ConjugacyMap g;
};

/// A pseudo-rotation of the unit disk (rigid, or conjugated by an inner g)
/// extended to the plane by the piecewise-linear rotation profile
/// rho(r) = alpha + r - 1 on 1 <= r <= 1 + beta - alpha and beta beyond.
struct PlaneExtension {
    double alpha = 0.0;
    double beta = 0.0;
    ConjugacyMap inner;

    double rho(double r) const {
        if (r <= 1.0) return alpha;
        if (r <= 1.0 + beta - alpha) return alpha + r - 1.0;
        return beta;
    }
    double rho_prime(double r) const { return (r > 1.0 && r < 1.0 + beta - alpha) ? 1.0 : 0.0; }
};

class Isotopy;

/// The n-fold concatenation t -> f_{nt - i}(f^i z) on [i/n, (i+1)/n].
struct Iterated {
    std::shared_ptr<const Isotopy> base;
    int n = 1;
};

/// An identity isotopy t -> f_t of area-preserving maps, t in [0, 1].
/// Immutable; evaluation is a pure function of (t, z).
class Isotopy {
public:
    using Family = std::variant<RigidRotation, RadialProfile, Conjugated, PlaneExtension, Iterated>;

    explicit Isotopy(Family family, std::vector<std::string> warnings = {})
        : family_(std::move(family)), warnings_(std::move(warnings)) {}

    FamilyTag tag() const { return static_cast<FamilyTag>(family_.index()); }
    const Family& family() const { return family_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Rotation number of the boundary isotopy, in turns.
    double boundary_rot() const {
        return std::visit(
            [](const auto& f) -> double {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, RigidRotation> || std::is_same_v<F, Conjugated> ||
                              std::is_same_v<F, PlaneExtension>)
                    return f.alpha;
                else if constexpr (std::is_same_v<F, RadialProfile>)
                    return f.rho(1.0);
                else
                    return f.n * f.base->boundary_rot();
            },
            family_);
    }

    Vec2 eval(double t, const Vec2& z) const {
        return std::visit(
            [&](const auto& f) -> Vec2 {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, RigidRotation>) {
                    return rotate(z, kTwoPi * t * f.alpha);
                } else if constexpr (std::is_same_v<F, RadialProfile>) {
                    return rotate(z, kTwoPi * t * f.rho(z.norm()));
                } else if constexpr (std::is_same_v<F, Conjugated>) {
                    return f.g.forward(rotate(f.g.inverse(z), kTwoPi * t * f.alpha));
                } else if constexpr (std::is_same_v<F, PlaneExtension>) {
                    const double r = z.norm();
                    if (r <= 1.0) return f.inner.forward(rotate(f.inner.inverse(z), kTwoPi * t * f.alpha));
                    return rotate(z, kTwoPi * t * f.rho(r));
                } else {
                    auto [i, local] = split(f.n, t);
                    Vec2 p = z;
                    for (int k = 0; k < i; ++k) p = f.base->map(p);
                    return f.base->eval(local, p);
                }
            },
            family_);
    }

    Vec2 map(const Vec2& z) const { return eval(1.0, z); }
    DiskPoint map(const DiskPoint& z) const { return DiskPoint(eval(1.0, z.vec())); }

    /// f_t(z) together with its Jacobian.
    std::pair<Vec2, Mat2> eval_jac(double t, const Vec2& z) const {
        return std::visit(
            [&](const auto& f) -> std::pair<Vec2, Mat2> {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, RigidRotation>) {
                    const double a = kTwoPi * t * f.alpha;
                    return {rotate(z, a), rotation(a)};
                } else if constexpr (std::is_same_v<F, RadialProfile>) {
                    return radial_eval_jac(z, t, f.rho(z.norm()), f.rho_prime(z.norm()));
                } else if constexpr (std::is_same_v<F, Conjugated>) {
                    return conjugated_eval_jac(f.g, f.alpha, t, z);
                } else if constexpr (std::is_same_v<F, PlaneExtension>) {
                    const double r = z.norm();
                    if (r <= 1.0) return conjugated_eval_jac(f.inner, f.alpha, t, z);
                    return radial_eval_jac(z, t, f.rho(r), f.rho_prime(r));
                } else {
                    auto [i, local] = split(f.n, t);
                    Vec2 p = z;
                    Mat2 acc = Mat2::Identity();
                    for (int k = 0; k < i; ++k) {
                        auto [q, j] = f.base->eval_jac(1.0, p);
                        p = q;
                        acc = j * acc;
                    }
                    auto [q, j] = f.base->eval_jac(local, p);
                    return {q, j * acc};
                }
            },
            family_);
    }

    Mat2 jac(double t, const Vec2& z) const { return eval_jac(t, z).second; }

    /// d/dt f_t(z).
    Vec2 velocity(double t, const Vec2& z) const {
        return std::visit(
            [&](const auto& f) -> Vec2 {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, RigidRotation>) {
                    return kTwoPi * f.alpha * perp(rotate(z, kTwoPi * t * f.alpha));
                } else if constexpr (std::is_same_v<F, RadialProfile>) {
                    const double rho = f.rho(z.norm());
                    return kTwoPi * rho * perp(rotate(z, kTwoPi * t * rho));
                } else if constexpr (std::is_same_v<F, Conjugated>) {
                    return conjugated_velocity(f.g, f.alpha, t, z);
                } else if constexpr (std::is_same_v<F, PlaneExtension>) {
                    const double r = z.norm();
                    if (r <= 1.0) return conjugated_velocity(f.inner, f.alpha, t, z);
                    const double rho = f.rho(r);
                    return kTwoPi * rho * perp(rotate(z, kTwoPi * t * rho));
                } else {
                    auto [i, local] = split(f.n, t);
                    Vec2 p = z;
                    for (int k = 0; k < i; ++k) p = f.base->map(p);
                    return static_cast<double>(f.n) * f.base->velocity(local, p);
                }
            },
            family_);
    }

    /// Samples f_{k/steps}(z) for k = 0..steps into out (size steps + 1).
    /// Evaluations agree bit-for-bit with eval() at the same times.
    void sample_path(const Vec2& z, int steps, std::span<Vec2> out) const {
        if (const auto* c = std::get_if<Conjugated>(&family_)) {
            const Vec2 w = c->g.inverse(z);
            for (int k = 0; k <= steps; ++k)
                out[k] = c->g.forward(rotate(w, kTwoPi * (static_cast<double>(k) / steps) * c->alpha));
            return;
        }
        for (int k = 0; k <= steps; ++k) out[k] = eval(static_cast<double>(k) / steps, z);
    }

    /// Jacobians of f_{k/steps} at z for k = 0..steps.
    void sample_jacobians(const Vec2& z, int steps, std::span<Mat2> out) const {
        if (const auto* c = std::get_if<Conjugated>(&family_)) {
            Mat2 jinv;
            const Vec2 w = c->g.inverse(z, jinv);
            Mat2 jf;
            for (int k = 0; k <= steps; ++k) {
                const double a = kTwoPi * (static_cast<double>(k) / steps) * c->alpha;
                c->g.forward(rotate(w, a), jf);
                out[k] = jf * rotation(a) * jinv;
            }
            return;
        }
        for (int k = 0; k <= steps; ++k) out[k] = jac(static_cast<double>(k) / steps, z);
    }

    static Vec2 rotate(const Vec2& z, double angle) {
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        return {c * z.x() - s * z.y(), s * z.x() + c * z.y()};
    }

private:
    static std::pair<int, double> split(int n, double t) {
        const double s = t * n;
        int i = static_cast<int>(std::floor(s));
        if (i >= n) i = n - 1;
        if (i < 0) i = 0;
        return {i, s - i};
    }

    static std::pair<Vec2, Mat2> radial_eval_jac(const Vec2& z, double t, double rho, double rho_prime) {
        const double a = kTwoPi * t * rho;
        const Mat2 rot = rotation(a);
        const Vec2 out = rot * z;
        Mat2 j = rot;
        const double r = z.norm();
        if (r > 0.0 && rho_prime != 0.0) j += perp(out) * ((kTwoPi * t * rho_prime / r) * z).transpose();
        return {out, j};
    }

    static std::pair<Vec2, Mat2> conjugated_eval_jac(const ConjugacyMap& g, double alpha, double t, const Vec2& z) {
        Mat2 jinv;
        const Vec2 w = g.inverse(z, jinv);
        const double a = kTwoPi * t * alpha;
        Mat2 jf;
        const Vec2 out = g.forward(rotate(w, a), jf);
        return {out, jf * rotation(a) * jinv};
    }

    static Vec2 conjugated_velocity(const ConjugacyMap& g, double alpha, double t, const Vec2& z) {
        const Vec2 w = g.inverse(z);
        const Vec2 rw = rotate(w, kTwoPi * t * alpha);
        Mat2 jf;
        g.forward(rw, jf);
        return jf * (kTwoPi * alpha * perp(rw));
    }

    Family family_;
    std::vector<std::string> warnings_;
};

inline Isotopy make_rigid_rotation(double alpha) { return Isotopy(RigidRotation{alpha}); }

/// rho(r) = alpha + twist (1 - r^2)^2 inside the disk; a smooth twist map
/// that is the rotation R_alpha on the boundary.
inline Isotopy make_radial_twist(double alpha, double twist) {
    RadialProfile p;
    p.rho = [alpha, twist](double r) {
        if (r >= 1.0) return alpha;
        const double u = 1.0 - r * r;
        return alpha + twist * u * u;
    };
    p.rho_prime = [twist](double r) {
        if (r >= 1.0) return 0.0;
        return -4.0 * twist * r * (1.0 - r * r);
    };
    p.name = "twist";
    return Isotopy(std::move(p));
}

/// g o R_{2 pi t alpha} o g^-1. Near-rational alpha only produces a warning.
inline Isotopy make_conjugated_rotation(double alpha, ConjugacyMap g) {
    std::vector<std::string> warnings;
    if (auto w = near_rational(alpha)) warnings.push_back(*w);
    return Isotopy(Conjugated{alpha, std::move(g)}, std::move(warnings));
}

inline Isotopy make_plane_extension(double alpha, double beta, ConjugacyMap inner = ConjugacyMap::identity()) {
    if (!(beta > alpha)) fail(ErrorKind::BadInterval, "plane extension needs beta > alpha");
    const double tol = 1e-12;
    if (std::floor(beta - tol) >= std::ceil(alpha + tol) || std::abs(alpha - std::round(alpha)) <= tol ||
        std::abs(beta - std::round(beta)) <= tol)
        fail(ErrorKind::BadInterval, "plane extension needs (alpha, beta) to avoid the integers");
    std::vector<std::string> warnings;
    if (auto w = near_rational(alpha)) warnings.push_back("alpha " + *w);
    if (auto w = near_rational(beta)) warnings.push_back("beta " + *w);
    return Isotopy(PlaneExtension{alpha, beta, std::move(inner)}, std::move(warnings));
}

/// The concatenation of n copies of iso, reparametrized to [0, 1].
inline Isotopy make_iterated(const Isotopy& iso, int n) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "iterated isotopy needs n >= 1");
    return Isotopy(Iterated{std::make_shared<const Isotopy>(iso), n});
}

/// Orbit f^i(z), i < n, of the time-one map.
inline std::vector<Vec2> orbit(const Isotopy& iso, const Vec2& z, int n) {
    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    Vec2 p = z;
    for (int i = 0; i < n; ++i) {
        pts.push_back(p);
        if (i + 1 < n) p = iso.map(p);
    }
    return pts;
}

}  // namespace diskrot
