#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "diskrot/isotopy.hpp"
#include "diskrot/parallel.hpp"

namespace diskrot {

/// A primitive of omega = (1/pi) dx ^ dy, evaluated on tangent vectors.
struct PrimitiveOneForm {
    std::function<double(const Vec2& z, const Vec2& v)> eval;
    std::string name;

    double operator()(const Vec2& z, const Vec2& v) const { return eval(z, v); }

    /// beta = (r^2 / 2pi) dtheta = (x dy - y dx) / 2pi.
    static PrimitiveOneForm standard() {
        return {[](const Vec2& z, const Vec2& v) { return cross(z, v) / kTwoPi; }, "standard"};
    }

    /// beta + dh for a smooth function h given through its gradient.
    static PrimitiveOneForm shifted(std::function<Vec2(const Vec2&)> grad_h, std::string name) {
        return {[g = std::move(grad_h)](const Vec2& z, const Vec2& v) { return cross(z, v) / kTwoPi + g(z).dot(v); },
                std::move(name)};
    }

    /// d beta / (dx ^ dy) at z by a centred finite-difference circulation.
    double exterior_derivative(const Vec2& z, double h = 1e-4) const {
        const Vec2 ex(1.0, 0.0);
        const Vec2 ey(0.0, 1.0);
        const double dby_dx = (eval(z + h * ex, ey) - eval(z - h * ex, ey)) / (2.0 * h);
        const double dbx_dy = (eval(z + h * ey, ex) - eval(z - h * ey, ex)) / (2.0 * h);
        return dby_dx - dbx_dy;
    }
};

struct ActionOptions {
    double path_tol = 1e-7;
    double abs_tol = 1e-12;
    int max_depth = 18;
};

/// The action a with da = f*beta - beta, normalized on the boundary by the
/// integral of beta along the isotopy path of the boundary point.
class ActionField {
public:
    explicit ActionField(const Isotopy& iso, PrimitiveOneForm beta = PrimitiveOneForm::standard(),
                         ActionOptions options = {})
        : iso_(iso), beta_(std::move(beta)), options_(options) {}

    const Isotopy& isotopy() const { return iso_; }
    const PrimitiveOneForm& beta() const { return beta_; }

    /// (f*beta - beta)_z(v).
    double integrand(const Vec2& z, const Vec2& v) const {
        const auto [fz, j] = iso_.eval_jac(1.0, z);
        return beta_(fz, j * v) - beta_(z, v);
    }

    /// Integral of beta along t -> f_t(x0).
    double boundary_value(const Vec2& x0) const {
        return integrate([&](double t) { return beta_(iso_.eval(t, x0), iso_.velocity(t, x0)); }, 0.0, 1.0);
    }

    /// a(x) along the radial segment from the boundary point on the ray of x.
    double operator()(const Vec2& x) const {
        const Vec2 u = unit_ray(x);
        const double r = x.norm();
        double a = boundary_value(u);
        if (r < 1.0) a += segment(u, r, u);
        return a;
    }

    double operator()(const DiskPoint& x) const { return (*this)(x.vec()); }

    /// a(x) along a second route: down the ray at angle theta + offset, then
    /// along the circle of radius |x| back to x.
    double via_arc(const Vec2& x, double offset = 1.0) const {
        const double r = x.norm();
        const double theta = r > 0.0 ? std::atan2(x.y(), x.x()) : 0.0;
        const double phi = theta + offset;
        const Vec2 u(std::cos(phi), std::sin(phi));
        double a = boundary_value(u);
        if (r < 1.0) a += segment(u, r, u);
        if (r > 0.0) {
            a += integrate(
                [&](double s) {
                    const double ang = phi + (theta - phi) * s;
                    const Vec2 z(r * std::cos(ang), r * std::sin(ang));
                    return integrand(z, (theta - phi) * perp(z));
                },
                0.0, 1.0);
        }
        return a;
    }

    /// a at points of one ray, radii in decreasing order, by accumulating
    /// the segment integrals between consecutive radii.
    std::vector<double> along_ray(double angle, const std::vector<double>& radii_desc) const {
        const Vec2 u(std::cos(angle), std::sin(angle));
        std::vector<double> out(radii_desc.size());
        double a = boundary_value(u);
        double r_prev = 1.0;
        for (std::size_t i = 0; i < radii_desc.size(); ++i) {
            const double r = radii_desc[i];
            if (r > r_prev) fail(ErrorKind::InvalidArgument, "along_ray needs decreasing radii");
            if (r < r_prev) a += segment(r_prev * u, r, u);
            out[i] = a;
            r_prev = r;
        }
        return out;
    }

private:
    static Vec2 unit_ray(const Vec2& x) {
        const double r = x.norm();
        return r > 0.0 ? Vec2(x / r) : Vec2(1.0, 0.0);
    }

    // Integral of the integrand from `from` along the ray u down to radius r.
    double segment(const Vec2& from, double r, const Vec2& u) const {
        const Vec2 to = r * u;
        const Vec2 v = to - from;
        return integrate([&](double s) { return integrand(from + s * v, v); }, 0.0, 1.0);
    }

    template <class F>
    double integrate(F&& f, double a, double b) const {
        double err = 0.0;
        const double val = adapt(f, a, b, options_.max_depth, err);
        if (!(err <= options_.path_tol) || !std::isfinite(val))
            fail(ErrorKind::QuadratureFailure, "action quadrature error " + std::to_string(err) + " above path_tol");
        return val;
    }

    // Bisect until each piece's Kronrod error is below abs_tol times its share of [0, 1].
    template <class F>
    double adapt(F& f, double a, double b, int depth, double& err) const {
        double e = 0.0;
        const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &e);
        if (e <= options_.abs_tol * (b - a) || depth == 0) {
            err += e;
            return val;
        }
        const double m = 0.5 * (a + b);
        return adapt(f, a, m, depth - 1, err) + adapt(f, m, b, depth - 1, err);
    }

    Isotopy iso_;
    PrimitiveOneForm beta_;
    ActionOptions options_;
};

/// Circulation of f*beta - beta around the circle of radius rho at c; zero
/// for an exact form.
inline double loop_integral(const ActionField& field, const Vec2& c, double rho, int nodes = 64) {
    double total = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double t = kTwoPi * k / nodes;
        const Vec2 e(std::cos(t), std::sin(t));
        total += field.integrand(c + rho * e, rho * perp(e));
    }
    return total * kTwoPi / nodes;
}

struct CalabiEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::string method;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
};

/// Monte Carlo estimate of the integral of a against omega in the
/// coordinates u = r^2, v = theta / 2pi, where omega = du dv. The v-range is
/// cut into an even number of strata with one random ray each; on each ray
/// the u-range is stratified. Adjacent strata are paired for the error
/// estimate, which is conservative.
inline CalabiEstimate calabi_monte_carlo(const ActionField& field, std::size_t samples, std::uint64_t seed) {
    if (samples < 4) fail(ErrorKind::InvalidArgument, "calabi needs at least 4 samples");
    std::size_t rays = static_cast<std::size_t>(std::sqrt(static_cast<double>(samples)));
    rays += rays % 2;
    const std::size_t per_ray = std::max<std::size_t>(1, samples / rays);
    std::vector<double> ray_mean(rays);
    parallel_for(rays, [&](std::size_t j) {
        auto rng = shard_rng(seed, j);
        const double v = (static_cast<double>(j) + uniform01(rng)) / static_cast<double>(rays);
        std::vector<double> radii(per_ray);
        for (std::size_t i = 0; i < per_ray; ++i) {
            const double u = (static_cast<double>(i) + uniform01(rng)) / static_cast<double>(per_ray);
            radii[per_ray - 1 - i] = std::sqrt(u);
        }
        const std::vector<double> a = field.along_ray(kTwoPi * v, radii);
        double s = 0.0;
        for (double x : a) s += x;
        ray_mean[j] = s / static_cast<double>(per_ray);
    });
    double total = 0.0;
    double var = 0.0;
    for (std::size_t j = 0; j < rays; j += 2) {
        total += ray_mean[j] + ray_mean[j + 1];
        const double d = ray_mean[j] - ray_mean[j + 1];
        var += d * d;
    }
    const double n = static_cast<double>(rays);
    return {total / n, std::sqrt(var) / n, "stratified-monte-carlo", seed, rays * per_ray};
}

/// Gauss-Legendre nodes and weights on [0, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - t);
        w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    return {x, w};
}

/// Tensor Gauss-Legendre in (r^2, theta / 2pi); the error is the difference
/// to the half-resolution grid.
inline CalabiEstimate calabi_gauss(const ActionField& field, int nodes = 64) {
    auto grid = [&](int n) {
        const auto [x, w] = gauss_legendre(n);
        std::vector<double> radii(x.size());
        std::vector<std::size_t> order(x.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
        for (std::size_t i = 0; i < order.size(); ++i) radii[i] = std::sqrt(x[order[i]]);
        std::vector<double> row(static_cast<std::size_t>(n));
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
            const std::vector<double> a = field.along_ray(kTwoPi * x[j], radii);
            double s = 0.0;
            for (std::size_t i = 0; i < order.size(); ++i) s += w[order[i]] * a[i];
            row[j] = s;
        });
        double total = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) total += w[j] * row[j];
        return total;
    };
    const double fine = grid(nodes);
    const double coarse = grid(nodes / 2);
    return {fine, std::abs(fine - coarse), "gauss-legendre", 0, static_cast<std::size_t>(nodes) * nodes};
}

}  // namespace diskrot
