#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "diskrot/isotopy.hpp"

namespace diskrot {

struct WindingOptions {
    int initial_steps = 64;
    int max_refinements = 24;
    double merge_eps = 1e-9;
};

/// Unwrapped angle trajectory of a moving vector. Consecutive angles differ
/// by less than pi/2, which certifies that no turn was aliased.
struct AngleLedger {
    std::vector<double> times;
    std::vector<double> angles;
    int refinements = 0;

    double turns() const { return (angles.back() - angles.front()) / kTwoPi; }

    bool certified() const {
        if (times.empty() || times.front() != 0.0 || times.back() != 1.0) return false;
        for (std::size_t k = 1; k < angles.size(); ++k)
            if (!(times[k] > times[k - 1]) || std::abs(angles[k] - angles[k - 1]) >= 0.5 * kPi) return false;
        return true;
    }
};

/// f_t(z) on the uniform grid t = k / steps.
struct SampledPath {
    Vec2 base;
    std::vector<Vec2> points;

    int steps() const { return static_cast<int>(points.size()) - 1; }
    const Vec2& end() const { return points.back(); }
};

inline SampledPath sample_path(const Isotopy& iso, const Vec2& z, int steps = 64) {
    SampledPath p{z, std::vector<Vec2>(static_cast<std::size_t>(steps) + 1)};
    iso.sample_path(z, steps, p.points);
    return p;
}

namespace detail {

/// Angle swept by f_t(y) - f_t(x) over [t0, t1], bisecting until every
/// increment is below pi/2.
inline double sweep(const Isotopy& iso, const Vec2& x, const Vec2& y, double t0, double t1, const Vec2& d0,
                    const Vec2& d1, int depth, const WindingOptions& opt, int& refinements, AngleLedger* ledger) {
    const double delta = angle_between(d0, d1);
    if (std::abs(delta) < 0.5 * kPi) {
        if (ledger) {
            ledger->times.push_back(t1);
            ledger->angles.push_back(ledger->angles.back() + delta);
        }
        return delta;
    }
    if (depth >= opt.max_refinements)
        fail(ErrorKind::RefinementExhausted, "winding: angle increments stay above pi/2 after maximal refinement");
    ++refinements;
    const double tm = 0.5 * (t0 + t1);
    const Vec2 dm = iso.eval(tm, y) - iso.eval(tm, x);
    if (!(dm.norm() > 0.0)) fail(ErrorKind::CoincidentPoints, "winding: the two paths meet");
    const double a = sweep(iso, x, y, t0, tm, d0, dm, depth + 1, opt, refinements, ledger);
    return a + sweep(iso, x, y, tm, t1, dm, d1, depth + 1, opt, refinements, ledger);
}

inline void check_distinct(const Vec2& x, const Vec2& y, const WindingOptions& opt) {
    if ((x - y).norm() <= opt.merge_eps)
        fail(ErrorKind::CoincidentPoints, "winding: points closer than merge_eps; use winding_tangent");
}

}  // namespace detail

/// Winding of y around x from precomputed paths sharing one grid. Swapping
/// the two paths gives the identical double.
inline double winding(const Isotopy& iso, const SampledPath& px, const SampledPath& py, const WindingOptions& opt = {},
                      int* refinements = nullptr) {
    detail::check_distinct(px.base, py.base, opt);
    const int n = px.steps();
    if (py.steps() != n) fail(ErrorKind::InvalidArgument, "winding: paths sampled on different grids");
    int refs = 0;
    double total = 0.0;
    Vec2 prev = py.points[0] - px.points[0];
    for (int k = 1; k <= n; ++k) {
        const Vec2 d = py.points[k] - px.points[k];
        const double delta = angle_between(prev, d);
        if (std::abs(delta) < 0.5 * kPi) {
            total += delta;
        } else {
            if (!(d.norm() > 0.0)) fail(ErrorKind::CoincidentPoints, "winding: the two paths meet");
            total += detail::sweep(iso, px.base, py.base, static_cast<double>(k - 1) / n, static_cast<double>(k) / n,
                                   prev, d, 0, opt, refs, nullptr);
        }
        prev = d;
    }
    if (refinements) *refinements = refs;
    return total / kTwoPi;
}

/// The full angle ledger of f_t(y) - f_t(x).
inline AngleLedger winding_ledger(const Isotopy& iso, const Vec2& x, const Vec2& y, const WindingOptions& opt = {}) {
    detail::check_distinct(x, y, opt);
    const SampledPath px = sample_path(iso, x, opt.initial_steps);
    const SampledPath py = sample_path(iso, y, opt.initial_steps);
    AngleLedger ledger;
    ledger.times.push_back(0.0);
    ledger.angles.push_back(std::atan2((y - x).y(), (y - x).x()));
    const int n = opt.initial_steps;
    for (int k = 1; k <= n; ++k)
        detail::sweep(iso, x, y, static_cast<double>(k - 1) / n, static_cast<double>(k) / n,
                      py.points[k - 1] - px.points[k - 1], py.points[k] - px.points[k], 0, opt, ledger.refinements,
                      &ledger);
    ledger.times.back() = 1.0;
    return ledger;
}

/// W(x, y): turns of the vector from f_t(x) to f_t(y), t in [0, 1].
inline double winding(const Isotopy& iso, const Vec2& x, const Vec2& y, const WindingOptions& opt = {},
                      int* refinements = nullptr) {
    detail::check_distinct(x, y, opt);
    return winding(iso, sample_path(iso, x, opt.initial_steps), sample_path(iso, y, opt.initial_steps), opt,
                   refinements);
}

inline double winding(const Isotopy& iso, const DiskPoint& x, const DiskPoint& y, const WindingOptions& opt = {}) {
    return winding(iso, x.vec(), y.vec(), opt);
}

/// Turns of t -> Df_t(x) xi; the extension of W to the diagonal.
inline double winding_tangent(const Isotopy& iso, const TangentPair& p, const WindingOptions& opt = {}) {
    const Vec2 x = p.base.vec();
    const Vec2& xi = p.direction;
    const int n = opt.initial_steps;
    std::vector<Mat2> jacs(static_cast<std::size_t>(n) + 1);
    iso.sample_jacobians(x, n, jacs);
    auto image = [&](const Mat2& j) {
        const Vec2 v = j * xi;
        if (v.norm() < 1e-14) fail(ErrorKind::SingularJacobian, "winding_tangent: Df_t xi vanishes");
        return v;
    };
    std::function<double(double, double, const Vec2&, const Vec2&, int)> sweep =
        [&](double t0, double t1, const Vec2& v0, const Vec2& v1, int depth) -> double {
        const double delta = angle_between(v0, v1);
        if (std::abs(delta) < 0.5 * kPi) return delta;
        if (depth >= opt.max_refinements)
            fail(ErrorKind::RefinementExhausted, "winding_tangent: increments stay above pi/2");
        const double tm = 0.5 * (t0 + t1);
        const Vec2 vm = image(iso.jac(tm, x));
        return sweep(t0, tm, v0, vm, depth + 1) + sweep(tm, t1, vm, v1, depth + 1);
    };
    double total = 0.0;
    Vec2 prev = image(jacs[0]);
    for (int k = 1; k <= n; ++k) {
        const Vec2 v = image(jacs[k]);
        total += sweep(static_cast<double>(k - 1) / n, static_cast<double>(k) / n, prev, v, 0);
        prev = v;
    }
    return total / kTwoPi;
}

/// Per-step windings W(f^i x, f^i y), i < n; their partial sums are the
/// windings of the n-fold concatenated isotopy.
inline std::vector<double> winding_steps(const Isotopy& iso, const Vec2& x, const Vec2& y, int n,
                                         const WindingOptions& opt = {}) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "winding_iterate needs n >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    SampledPath px = sample_path(iso, x, opt.initial_steps);
    SampledPath py = sample_path(iso, y, opt.initial_steps);
    for (int i = 0; i < n; ++i) {
        if ((px.base - py.base).norm() <= opt.merge_eps)
            fail(ErrorKind::OrbitCollision, "winding_iterate: orbits meet at step " + std::to_string(i));
        out.push_back(winding(iso, px, py, opt));
        if (i + 1 < n) {
            px = sample_path(iso, px.end(), opt.initial_steps);
            py = sample_path(iso, py.end(), opt.initial_steps);
        }
    }
    return out;
}

/// W of the pair under the n-fold concatenation of the isotopy.
inline double winding_iterate(const Isotopy& iso, const Vec2& x, const Vec2& y, int n, const WindingOptions& opt = {}) {
    double total = 0.0;
    for (double w : winding_steps(iso, x, y, n, opt)) total += w;
    return total;
}

/// (1/n) sum_i W(0, Df^i xi) at a fixed point: the linearized rotation number.
inline double linearized_rotation_number(const Isotopy& iso, const Vec2& fixed_point, const Vec2& xi, long n,
                                         const WindingOptions& opt = {}) {
    if (n < 1) fail(ErrorKind::InvalidArgument, "linearized rotation number needs n >= 1");
    if ((iso.map(fixed_point) - fixed_point).norm() > 1e-12)
        fail(ErrorKind::InvalidArgument, "linearized rotation number needs a fixed point");
    const int steps = opt.initial_steps;
    std::vector<Mat2> jacs(static_cast<std::size_t>(steps) + 1);
    iso.sample_jacobians(fixed_point, steps, jacs);
    double total = 0.0;
    Vec2 v = xi.normalized();
    for (long i = 0; i < n; ++i) {
        const TangentPair tp(DiskPoint(fixed_point), v);
        Vec2 prev = v;
        double step = 0.0;
        for (int k = 1; k <= steps; ++k) {
            const Vec2 w = jacs[k] * v;
            const double delta = angle_between(prev, w);
            if (std::abs(delta) >= 0.5 * kPi) {
                // Rare: fall back to the refined tangent winding for this step.
                step = kTwoPi * winding_tangent(iso, tp, opt);
                prev = jacs[steps] * v;
                break;
            }
            step += delta;
            prev = w;
        }
        total += step;
        v = prev.normalized();
    }
    return total / (kTwoPi * static_cast<double>(n));
}

/// Largest |W_a - W_b| over sampled pairs for two isotopies of the same map.
inline double winding_crosscheck(const Isotopy& a, const Isotopy& b, std::span<const std::pair<Vec2, Vec2>> pairs,
                                 const WindingOptions& opt = {}) {
    double worst = 0.0;
    for (const auto& [x, y] : pairs) worst = std::max(worst, std::abs(winding(a, x, y, opt) - winding(b, x, y, opt)));
    return worst;
}

}  // namespace diskrot
