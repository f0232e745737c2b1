#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "diskrot/geometry.hpp"

namespace diskrot {

/// Compactly supported vortex: the Hamiltonian H = G(|S(z - c)|^2) with
/// S = diag(stretch, 1/stretch). Its flow is solved in closed form: points
/// turn along the level ellipses with angular speed
/// amplitude * (1 - q)^4, q = |S(z - c)|^2 / radius^2, and stay put for q >= 1.
struct Bump {
    Vec2 center{0.0, 0.0};
    double stretch = 1.0;
    double radius = 0.5;
    double amplitude = 1.0;

    /// Largest distance from the centre to a point of the support.
    double extent() const { return radius * std::max(stretch, 1.0 / stretch); }
};

/// Exact time-t flow of a bump; optionally the Jacobian of that map.
inline Vec2 bump_flow(const Bump& b, double t, const Vec2& z, Mat2* jac = nullptr) {
    const Vec2 d = z - b.center;
    const Vec2 w(b.stretch * d.x(), d.y() / b.stretch);
    const double r2 = b.radius * b.radius;
    const double q = w.squaredNorm() / r2;
    if (q >= 1.0 || t == 0.0) {
        if (jac) jac->setIdentity();
        return z;
    }
    const double u = 1.0 - q;
    const double u3 = u * u * u;
    const double phi = t * b.amplitude * u3 * u;
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const Vec2 wr(c * w.x() - s * w.y(), s * w.x() + c * w.y());
    if (jac) {
        // In w-coordinates: D = R(phi) + perp(R w) (grad phi)^T, grad phi = -8 t A u^3 w / radius^2.
        const double g = -8.0 * t * b.amplitude * u3 / r2;
        Mat2 dw;
        dw << c, -s, s, c;
        dw += perp(wr) * (g * w).transpose();
        const double sx = b.stretch;
        const double sy = 1.0 / b.stretch;
        // Back to z-coordinates: S^{-1} dw S.
        (*jac)(0, 0) = dw(0, 0);
        (*jac)(0, 1) = dw(0, 1) * sy / sx;
        (*jac)(1, 0) = dw(1, 0) * sx / sy;
        (*jac)(1, 1) = dw(1, 1);
    }
    return b.center + Vec2(wr.x() / b.stretch, wr.y() * b.stretch);
}

/// Area-preserving diffeomorphism g of the disk built from `steps` Strang
/// splitting steps of H = sum of bumps. Every sub-flow is exact, so g and its
/// inverse are exactly symplectic up to roundoff, and g is the identity on
/// r >= support_radius. All bumps either are centred at 0 or avoid it, so g(0) = 0.
class ConjugacyMap {
public:
    ConjugacyMap() = default;

    ConjugacyMap(std::vector<Bump> bumps, int steps, double support_radius, std::string tag)
        : bumps_(std::move(bumps)), steps_(steps), support_radius_(support_radius), tag_(std::move(tag)) {
        if (steps_ < 1) fail(ErrorKind::InvalidArgument, "ConjugacyMap: steps must be >= 1");
        if (!(support_radius_ > 0.0 && support_radius_ < 1.0))
            fail(ErrorKind::InvalidArgument, "ConjugacyMap: support_radius must lie in (0, 1)");
        for (const Bump& b : bumps_) {
            if (!(b.radius > 0.0 && b.stretch > 0.0))
                fail(ErrorKind::InvalidArgument, "ConjugacyMap: bump radius and stretch must be positive");
            if (b.center.norm() + b.extent() > support_radius_ * (1.0 + 1e-12))
                fail(ErrorKind::InvalidArgument, "ConjugacyMap: bump support leaves the support disk");
            const Vec2 w(-b.stretch * b.center.x(), -b.center.y() / b.stretch);
            if (b.center.norm() > 0.0 && w.squaredNorm() < b.radius * b.radius)
                fail(ErrorKind::InvalidArgument, "ConjugacyMap: off-centre bump would move the origin");
        }
        build_schedule();
    }

    static ConjugacyMap identity() { return ConjugacyMap({}, 1, 0.9, "identity"); }

    /// Built-in Hamiltonians, scaled into the disk of radius support_radius.
    static ConjugacyMap named(std::string_view name, int steps = 8, double support_radius = 0.9) {
        const double R = support_radius;
        auto at = [R](double rho, double angle) { return Vec2(R * rho * std::cos(angle), R * rho * std::sin(angle)); };
        std::vector<Bump> bumps;
        if (name == "identity") {
        } else if (name == "vortex-pair") {
            bumps = {{{0.0, 0.0}, 1.0, 0.42 * R, 3.0},
                     {at(0.56, 0.0), 1.0, 0.40 * R, 5.0},
                     {at(0.56, 2.3), 1.0, 0.40 * R, -4.0}};
        } else if (name == "tripole") {
            bumps = {{at(0.55, 0.4), 1.0, 0.42 * R, 5.0},
                     {at(0.55, 2.5), 1.0, 0.42 * R, -3.5},
                     {at(0.55, 4.6), 1.0, 0.42 * R, 4.5}};
        } else if (name == "elliptic") {
            // The central vortex is elliptic, so Dg(0) is not conformal.
            bumps = {{{0.0, 0.0}, 1.6, 0.45 * R, 3.5},
                     {at(0.58, 0.5 * kPi), 1.0, 0.38 * R, -5.0}};
        } else {
            fail(ErrorKind::InvalidArgument, "unknown hamiltonian '" + std::string(name) + "'");
        }
        return ConjugacyMap(std::move(bumps), steps, support_radius, std::string(name));
    }

    static std::vector<std::string> hamiltonian_names() { return {"identity", "vortex-pair", "tripole", "elliptic"}; }

    Vec2 forward(const Vec2& z) const {
        Vec2 p = z;
        for (const auto& s : schedule_) p = bump_flow(bumps_[s.bump], s.time, p);
        return p;
    }

    Vec2 inverse(const Vec2& z) const {
        Vec2 p = z;
        for (auto it = schedule_.rbegin(); it != schedule_.rend(); ++it) p = bump_flow(bumps_[it->bump], -it->time, p);
        return p;
    }

    Vec2 forward(const Vec2& z, Mat2& jac) const {
        Vec2 p = z;
        jac.setIdentity();
        Mat2 step;
        for (const auto& s : schedule_) {
            p = bump_flow(bumps_[s.bump], s.time, p, &step);
            jac = step * jac;
        }
        return p;
    }

    Vec2 inverse(const Vec2& z, Mat2& jac) const {
        Vec2 p = z;
        jac.setIdentity();
        Mat2 step;
        for (auto it = schedule_.rbegin(); it != schedule_.rend(); ++it) {
            p = bump_flow(bumps_[it->bump], -it->time, p, &step);
            jac = step * jac;
        }
        return p;
    }

    /// Continuous change of the polar angle of z while it is carried by the
    /// sub-flows of g (or of g^-1); this picks the lift of g to the universal
    /// cover determined by its isotopy.
    double angular_displacement(const Vec2& z, bool inverse_map = false) const {
        if (z.norm() == 0.0) fail(ErrorKind::ZeroPoint, "angular displacement undefined at the origin");
        Vec2 p = z;
        double total = 0.0;
        auto run = [&](const Bump& b, double time) {
            for (int pieces = 8; pieces <= (1 << 14); pieces *= 2) {
                Vec2 prev = p;
                double acc = 0.0;
                bool ok = true;
                for (int k = 1; k <= pieces; ++k) {
                    const Vec2 q = bump_flow(b, time * k / pieces, p);
                    const double d = angle_between(prev, q);
                    if (std::abs(d) >= 0.5 * kPi) {
                        ok = false;
                        break;
                    }
                    acc += d;
                    prev = q;
                }
                if (ok) {
                    total += acc;
                    p = prev;
                    return;
                }
            }
            fail(ErrorKind::RefinementExhausted, "angular displacement of conjugacy could not be resolved");
        };
        if (!inverse_map) {
            for (const auto& s : schedule_) run(bumps_[s.bump], s.time);
        } else {
            for (auto it = schedule_.rbegin(); it != schedule_.rend(); ++it) run(bumps_[it->bump], -it->time);
        }
        return total;
    }

    bool is_identity() const { return bumps_.empty(); }
    int steps() const { return steps_; }
    double support_radius() const { return support_radius_; }
    const std::string& tag() const { return tag_; }
    const std::vector<Bump>& bumps() const { return bumps_; }

private:
    struct Substep {
        std::size_t bump;
        double time;
    };

    void build_schedule() {
        schedule_.clear();
        if (bumps_.empty()) return;
        const double dt = 1.0 / steps_;
        const std::size_t last = bumps_.size() - 1;
        for (int k = 0; k < steps_; ++k) {
            for (std::size_t j = 0; j < last; ++j) schedule_.push_back({j, 0.5 * dt});
            schedule_.push_back({last, dt});
            for (std::size_t j = last; j-- > 0;) schedule_.push_back({j, 0.5 * dt});
        }
    }

    std::vector<Bump> bumps_;
    int steps_ = 1;
    double support_radius_ = 0.9;
    std::string tag_ = "identity";
    std::vector<Substep> schedule_;
};

}  // namespace diskrot
