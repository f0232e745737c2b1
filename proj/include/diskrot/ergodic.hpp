#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diskrot/action.hpp"
#include "diskrot/exact_sum.hpp"
#include "diskrot/parallel.hpp"
#include "diskrot/sampling.hpp"
#include "diskrot/winding.hpp"

namespace diskrot {

/// Orbit f^i(x), i < n, with the isotopy path of every point kept for reuse.
struct OrbitCache {
    Vec2 base;
    std::vector<Vec2> points;
    std::vector<SampledPath> paths;
    std::string map_tag;

    OrbitCache(const Isotopy& iso, const Vec2& x, int n, int steps = 64) : base(x), map_tag(to_string(iso.tag())) {
        extend(iso, n, steps);
    }

    int size() const { return static_cast<int>(points.size()); }

    void extend(const Isotopy& iso, int n, int steps = 64) {
        points.reserve(static_cast<std::size_t>(n));
        paths.reserve(static_cast<std::size_t>(n));
        while (size() < n) {
            const Vec2 z = points.empty() ? base : paths.back().end();
            points.push_back(z);
            paths.push_back(sample_path(iso, z, steps));
        }
    }

    /// Largest |points[i+1] - f(points[i])| over a random subset of indices.
    double recurrence_defect(const Isotopy& iso, double fraction, std::uint64_t seed) const {
        auto rng = shard_rng(seed, 0);
        double worst = 0.0;
        for (int i = 0; i + 1 < size(); ++i)
            if (uniform01(rng) < fraction) worst = std::max(worst, (points[i + 1] - iso.map(points[i])).norm());
        return worst;
    }
};

struct EmpiricalMeasure {
    std::vector<Vec2> atoms;
    std::vector<double> weights;

    static EmpiricalMeasure of_orbit(const std::vector<Vec2>& pts, std::size_t n) {
        EmpiricalMeasure m;
        m.atoms.assign(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(n));
        m.weights.assign(n, 1.0 / static_cast<double>(n));
        return m;
    }

    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    double integrate(const std::function<double(const Vec2&)>& phi) const {
        double s = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * phi(atoms[i]);
        return s;
    }
};

enum class Verdict { Converged, Undecided };

/// Partial averages on a schedule of n with a Cauchy-window diagnostic.
struct ConvergenceReport {
    std::vector<long> n_values;
    std::vector<double> partial_averages;
    std::optional<double> target;
    double tol = 0.01;
    int window = 3;
    std::string label = "probe";

    /// max - min over the last `window` schedule points ending at index k.
    double window_at(std::size_t k) const {
        const std::size_t lo = k + 1 >= static_cast<std::size_t>(window) ? k + 1 - window : 0;
        const auto [mn, mx] = std::minmax_element(partial_averages.begin() + static_cast<std::ptrdiff_t>(lo),
                                                  partial_averages.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        return *mx - *mn;
    }

    double cauchy_window() const { return window_at(partial_averages.size() - 1); }
    double last() const { return partial_averages.back(); }
    Verdict verdict() const { return cauchy_window() < tol ? Verdict::Converged : Verdict::Undecided; }

    /// Cauchy windows at the schedule points n >= from.
    std::vector<double> windows_from(long from) const {
        std::vector<double> out;
        for (std::size_t k = 0; k < n_values.size(); ++k)
            if (n_values[k] >= from) out.push_back(window_at(k));
        return out;
    }

    bool windows_nonincreasing(long from) const {
        const auto w = windows_from(from);
        for (std::size_t k = 1; k < w.size(); ++k)
            if (w[k] > w[k - 1]) return false;
        return true;
    }
};

inline std::string to_string(Verdict v) { return v == Verdict::Converged ? "converged" : "undecided"; }

/// 1, 2, 4, ... up to n_max, with n_max appended when it is not a power of two.
inline std::vector<long> doubling_schedule(long n_max) {
    std::vector<long> s;
    for (long n = 1; n <= n_max; n *= 2) s.push_back(n);
    if (s.back() != n_max) s.push_back(n_max);
    return s;
}

inline ConvergenceReport report_from_terms(const std::vector<double>& terms, const std::vector<long>& schedule,
                                           std::optional<double> target, double tol) {
    ConvergenceReport rep;
    rep.target = target;
    rep.tol = tol;
    double s = 0.0;
    std::size_t next = 0;
    for (std::size_t i = 0; i < terms.size() && next < schedule.size(); ++i) {
        s += terms[i];
        if (static_cast<long>(i + 1) == schedule[next]) {
            rep.n_values.push_back(schedule[next]);
            rep.partial_averages.push_back(s / static_cast<double>(i + 1));
            ++next;
        }
    }
    return rep;
}

/// Birkhoff averages (1/n) sum_{i<n} a(f^i x) of the action.
inline ConvergenceReport mean_action(const ActionField& field, const Vec2& x, long n_max, double tol = 0.01,
                                     std::vector<long> schedule = {}) {
    if (n_max < 1) fail(ErrorKind::InvalidArgument, "mean_action needs n_max >= 1");
    if (schedule.empty()) schedule = doubling_schedule(n_max);
    const std::vector<Vec2> pts = orbit(field.isotopy(), x, static_cast<int>(n_max));
    std::vector<double> a(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) { a[i] = field(pts[i]); });
    auto rep = report_from_terms(a, schedule, field.isotopy().boundary_rot(), tol);
    rep.label = "mean-action probe";
    return rep;
}

/// Minimum distance between the orbit segments; throws OrbitCollision.
inline double check_disjoint_orbits(const std::vector<Vec2>& xs, const std::vector<Vec2>& ys, double merge_eps) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double d = (xs[i] - ys[j]).norm();
            if (d <= merge_eps)
                fail(ErrorKind::OrbitCollision,
                     "orbits collide at (i, j) = (" + std::to_string(i) + ", " + std::to_string(j) + ")");
            best = std::min(best, d);
        }
    return best;
}

/// Double sums sum_{i,j<n} W(f^i x, f^j y), grown one index at a time.
/// The sum is exact, so the incremental and the naive engines agree bit for bit.
class LinkingEngine {
public:
    LinkingEngine(const Isotopy& iso, const Vec2& x, const Vec2& y, WindingOptions opt = {})
        : iso_(iso), ox_(iso, x, 0, opt.initial_steps), oy_(iso, y, 0, opt.initial_steps), opt_(opt) {}

    int n() const { return n_; }
    const ExactSum& sum() const { return sum_; }
    double average() const { return sum_.value() / (static_cast<double>(n_) * n_); }

    /// Adds the 2n - 1 pairs that involve the new index n - 1.
    void step() {
        const int m = n_;
        ox_.extend(iso_, m + 1, opt_.initial_steps);
        oy_.extend(iso_, m + 1, opt_.initial_steps);
        for (int j = 0; j <= m; ++j) check(m, j);
        for (int i = 0; i < m; ++i) check(i, m);
        std::vector<double> w(static_cast<std::size_t>(2 * m + 1));
        parallel_for(w.size(), [&](std::size_t k) {
            const int kk = static_cast<int>(k);
            w[k] = kk <= m ? winding(iso_, ox_.paths[m], oy_.paths[kk], opt_)
                           : winding(iso_, ox_.paths[kk - m - 1], oy_.paths[m], opt_);
        });
        for (double v : w) sum_ += v;
        ++n_;
    }

    /// Plain O(n^2) recomputation from scratch.
    static ExactSum naive(const Isotopy& iso, const Vec2& x, const Vec2& y, int n, WindingOptions opt = {}) {
        OrbitCache ox(iso, x, n, opt.initial_steps);
        OrbitCache oy(iso, y, n, opt.initial_steps);
        ExactSum s;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += winding(iso, ox.paths[i], oy.paths[j], opt);
        return s;
    }

private:
    void check(int i, int j) const {
        if ((ox_.points[i] - oy_.points[j]).norm() <= opt_.merge_eps)
            fail(ErrorKind::OrbitCollision,
                 "orbits collide at (i, j) = (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }

    Isotopy iso_;
    OrbitCache ox_;
    OrbitCache oy_;
    WindingOptions opt_;
    ExactSum sum_;
    int n_ = 0;
};

/// S_n = (1/n^2) sum_{i,j<n} W(f^i x, f^j y) on a schedule up to n_max.
inline ConvergenceReport linking_average(const Isotopy& iso, const Vec2& x, const Vec2& y, long n_max,
                                         double tol = 0.05, WindingOptions opt = {}) {
    if (n_max < 1) fail(ErrorKind::InvalidArgument, "linking_average needs n >= 1");
    LinkingEngine eng(iso, x, y, opt);
    ConvergenceReport rep;
    rep.target = iso.boundary_rot();
    rep.tol = tol;
    rep.label = "linking probe";
    const auto schedule = doubling_schedule(n_max);
    std::size_t next = 0;
    while (eng.n() < n_max) {
        eng.step();
        if (eng.n() == schedule[next]) {
            rep.n_values.push_back(eng.n());
            rep.partial_averages.push_back(eng.average());
            ++next;
        }
    }
    return rep;
}

/// S_n at a single n from cached orbit paths.
inline double double_average(const Isotopy& iso, const OrbitCache& ox, const OrbitCache& oy, int n,
                             const WindingOptions& opt = {}) {
    ExactSum s;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += winding(iso, ox.paths[i], oy.paths[j], opt);
    return s.value() / (static_cast<double>(n) * n);
}

struct HandednessReport {
    bool right_handed_mode = true;
    int pairs = 0;
    int n = 0;
    double min_average = 0.0;
    double max_average = 0.0;
    double linearized_rotation = 0.0;
    long linearization_iterates = 0;
    bool ok = false;
    std::string violation;
};

/// Positivity (or negativity, for a negative boundary rotation) of sampled
/// double averages S_n, and of the linearized rotation number at the origin.
inline HandednessReport right_handedness_certificate(const Isotopy& iso, int pair_samples, int n, std::uint64_t seed,
                                                     long linearization_iterates = 1L << 16,
                                                     const PointSampler& sampler = lebesgue_disk(),
                                                     WindingOptions opt = {}) {
    HandednessReport rep;
    const double rho = iso.boundary_rot();
    if (rho == 0.0) fail(ErrorKind::InvalidArgument, "handedness needs a nonzero boundary rotation");
    rep.right_handed_mode = rho > 0.0;
    rep.pairs = pair_samples;
    rep.n = n;
    const double sign = rep.right_handed_mode ? 1.0 : -1.0;
    std::vector<double> s(static_cast<std::size_t>(pair_samples));
    parallel_for(s.size(), [&](std::size_t k) {
        auto rng = shard_rng(seed, k);
        for (;;) {
            const Vec2 x = sampler(rng);
            const Vec2 y = sampler(rng);
            if (x.norm() == 0.0 || y.norm() == 0.0) continue;
            OrbitCache ox(iso, x, n, opt.initial_steps);
            OrbitCache oy(iso, y, n, opt.initial_steps);
            try {
                check_disjoint_orbits(ox.points, oy.points, opt.merge_eps);
            } catch (const Error&) {
                continue;
            }
            s[k] = double_average(iso, ox, oy, n, opt);
            return;
        }
    });
    rep.min_average = *std::min_element(s.begin(), s.end());
    rep.max_average = *std::max_element(s.begin(), s.end());
    rep.linearization_iterates = linearization_iterates;
    rep.linearized_rotation = linearized_rotation_number(iso, Vec2(0.0, 0.0), Vec2(1.0, 0.0), linearization_iterates, opt);
    rep.ok = sign * rep.linearized_rotation > 0.0;
    if (!rep.ok) rep.violation = "linearized rotation number at the fixed point has the wrong sign";
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(sign * s[k] > 0.0)) {
            rep.ok = false;
            rep.violation = "pair sample " + std::to_string(k) + " has S_n = " + std::to_string(s[k]);
            break;
        }
    }
    return rep;
}

inline void require(const HandednessReport& rep) {
    if (!rep.ok) fail(ErrorKind::CertificateFailed, rep.violation);
}

/// Test functions cos(p x + q y), sin(p x + q y) with |p|, |q| <= degree, and r^2.
struct TestFunction {
    std::string name;
    std::function<double(const Vec2&)> phi;
    double sup = 1.0;
};

inline std::vector<TestFunction> moment_dictionary(int degree) {
    std::vector<TestFunction> out;
    out.push_back({"r2", [](const Vec2& z) { return z.squaredNorm(); }, 1.0});
    for (int p = 0; p <= degree; ++p)
        for (int q = -degree; q <= degree; ++q) {
            if (p == 0 && q <= 0) continue;
            const std::string tag = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
            out.push_back({"cos" + tag, [p, q](const Vec2& z) { return std::cos(p * z.x() + q * z.y()); }, 1.0});
            out.push_back({"sin" + tag, [p, q](const Vec2& z) { return std::sin(p * z.x() + q * z.y()); }, 1.0});
        }
    return out;
}

struct MomentRow {
    std::string name;
    long n = 0;
    double moment = 0.0;
    double invariance_defect = 0.0;
    double defect_bound = 0.0;
};

struct WeakConvergenceDiagnostic {
    std::vector<MomentRow> rows;

    bool defects_within_bounds() const {
        for (const auto& r : rows)
            if (r.invariance_defect > r.defect_bound * (1.0 + 1e-12) + 1e-15) return false;
        return true;
    }
};

/// Moments of mu_{n_k}(x_k) and their invariance defects
/// |int phi o f dmu - int phi dmu| <= (2/n) sup |phi|.
inline WeakConvergenceDiagnostic empirical_weak_convergence(const Isotopy& iso, const std::vector<Vec2>& xs,
                                                            const std::vector<long>& ns, int degree = 2) {
    if (xs.size() != ns.size()) fail(ErrorKind::InvalidArgument, "x and n sequences differ in length");
    const auto dict = moment_dictionary(degree);
    WeakConvergenceDiagnostic diag;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const auto pts = orbit(iso, xs[k], static_cast<int>(ns[k]) + 1);
        const std::vector<Vec2> head(pts.begin(), pts.end() - 1);
        const std::vector<Vec2> shifted(pts.begin() + 1, pts.end());
        const auto mu = EmpiricalMeasure::of_orbit(head, head.size());
        const auto pushed = EmpiricalMeasure{shifted, mu.weights};
        for (const auto& tf : dict) {
            const double m = mu.integrate(tf.phi);
            const double mf = pushed.integrate(tf.phi);
            diag.rows.push_back({tf.name, ns[k], m, std::abs(mf - m), 2.0 * tf.sup / static_cast<double>(ns[k])});
        }
    }
    return diag;
}

/// Integral of phi (x) psi against mu_n x nu_n, as a double sum.
inline double product_moment(const std::function<double(const Vec2&)>& phi,
                             const std::function<double(const Vec2&)>& psi, const std::vector<Vec2>& xs,
                             const std::vector<Vec2>& ys) {
    double s = 0.0;
    for (const auto& x : xs) {
        const double px = phi(x);
        for (const auto& y : ys) s += px * psi(y);
    }
    return s / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

struct GapResult {
    Vec2 x;
    int n = 0;
    double action = 0.0;
    double integral = 0.0;
    double stderr_ = 0.0;
    double gap = 0.0;
    std::size_t samples = 0;

    /// The action/winding inequality in its n-scaled form.
    bool within_bound(double constant = 8.0) const { return gap <= constant + 3.0 * n * stderr_; }
};

/// |a_{f^n}(x) - int W_{f^n}(x, y) domega(y)| for every x and n at once. The
/// y-samples are shared; the n-fold windings are prefix sums of per-step windings.
inline std::vector<GapResult> action_winding_gaps(const Isotopy& iso, const std::vector<Vec2>& xs,
                                                  const std::vector<int>& ns, std::size_t samples, std::uint64_t seed,
                                                  WindingOptions opt = {}) {
    if (ns.empty() || xs.empty()) return {};
    const int n_max = *std::max_element(ns.begin(), ns.end());
    if (*std::min_element(ns.begin(), ns.end()) < 1) fail(ErrorKind::InvalidArgument, "gap needs n >= 1");
    std::vector<OrbitCache> ox;
    ox.reserve(xs.size());
    for (const auto& x : xs) ox.emplace_back(iso, x, n_max, opt.initial_steps);

    const std::size_t shards = std::min<std::size_t>(samples, 64);
    const std::size_t cells = xs.size() * ns.size();
    std::vector<std::vector<double>> sum(shards, std::vector<double>(cells, 0.0));
    std::vector<std::vector<double>> sum2(shards, std::vector<double>(cells, 0.0));
    const auto sampler = lebesgue_disk();
    parallel_for(shards, [&](std::size_t sh) {
        auto rng = shard_rng(seed, sh);
        const std::size_t lo = samples * sh / shards;
        const std::size_t hi = samples * (sh + 1) / shards;
        for (std::size_t s = lo; s < hi; ++s) {
            for (;;) {
                const Vec2 y = sampler(rng);
                OrbitCache oy(iso, y, n_max, opt.initial_steps);
                bool collided = false;
                std::vector<double> row(cells);
                for (std::size_t ix = 0; ix < xs.size() && !collided; ++ix) {
                    double acc = 0.0;
                    for (int i = 0; i < n_max; ++i) {
                        if ((ox[ix].points[i] - oy.points[i]).norm() <= opt.merge_eps) {
                            collided = true;
                            break;
                        }
                        acc += winding(iso, ox[ix].paths[i], oy.paths[i], opt);
                        for (std::size_t kn = 0; kn < ns.size(); ++kn)
                            if (ns[kn] == i + 1) row[ix * ns.size() + kn] = acc;
                    }
                }
                if (collided) continue;
                for (std::size_t c = 0; c < cells; ++c) {
                    sum[sh][c] += row[c];
                    sum2[sh][c] += row[c] * row[c];
                }
                break;
            }
        }
    });

    std::vector<GapResult> out;
    const double N = static_cast<double>(samples);
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        for (std::size_t kn = 0; kn < ns.size(); ++kn) {
            const std::size_t c = ix * ns.size() + kn;
            double s = 0.0;
            double s2 = 0.0;
            for (std::size_t sh = 0; sh < shards; ++sh) {
                s += sum[sh][c];
                s2 += sum2[sh][c];
            }
            const double mean = s / N;
            const double var = std::max(0.0, (s2 - N * mean * mean) / (N - 1.0));
            GapResult g;
            g.x = xs[ix];
            g.n = ns[kn];
            g.integral = mean;
            g.stderr_ = std::sqrt(var / N);
            g.samples = samples;
            const ActionField field(make_iterated(iso, ns[kn]));
            g.action = field(xs[ix]);
            g.gap = std::abs(g.action - g.integral);
            out.push_back(g);
        }
    }
    return out;
}

inline GapResult action_winding_gap(const Isotopy& iso, const Vec2& x, int n, std::size_t samples,
                                    std::uint64_t seed) {
    return action_winding_gaps(iso, {x}, {n}, samples, seed).front();
}

}  // namespace diskrot
