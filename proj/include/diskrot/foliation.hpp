#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diskrot/ergodic.hpp"
#include "diskrot/isotopy.hpp"
#include "diskrot/winding.hpp"

namespace diskrot {

/// An element of (1/2) Z, stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    static constexpr HalfInt from_twice(long long t) {
        HalfInt h;
        h.twice_ = t;
        return h;
    }
    static constexpr HalfInt integer(long long v) { return from_twice(2 * v); }

    constexpr long long twice() const { return twice_; }
    constexpr double value() const { return 0.5 * static_cast<double>(twice_); }

    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    HalfInt& operator+=(HalfInt o) {
        twice_ += o.twice_;
        return *this;
    }
    constexpr auto operator<=>(const HalfInt&) const = default;

    std::string str() const {
        if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

private:
    long long twice_ = 0;
};

inline HalfInt abs(HalfInt h) { return h.twice() < 0 ? -h : h; }

inline long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline bool multiple_of_four(long long k) { return k % 4 == 0; }

/// lambda(k, l): signed count of multiples of 4 passed by a lifted path from
/// k to l, endpoints counted one half.
inline HalfInt lambda_int(long long k, long long l) {
    if (k == l) return {};
    if (k > l) return -lambda_int(l, k);
    const long long inside = floor_div(l - 1, 4) - floor_div(k, 4);
    return HalfInt::from_twice(2 * inside + (multiple_of_four(k) ? 1 : 0) + (multiple_of_four(l) ? 1 : 0));
}

/// An element of Z/4Z.
struct QuarterTurn {
    int value = 0;

    explicit QuarterTurn(long long v = 0) : value(static_cast<int>(((v % 4) + 4) % 4)) {}

    QuarterTurn operator+(QuarterTurn o) const { return QuarterTurn(value + o.value); }
    QuarterTurn operator-(QuarterTurn o) const { return QuarterTurn(value - o.value); }
    bool operator==(const QuarterTurn&) const = default;
};

/// The radial foliation h(F_*) for a chart h fixing the origin; h = id gives
/// the Euclidean foliation F_* by rays.
class RadialFoliation {
public:
    RadialFoliation() : chart_(ConjugacyMap::identity()) {}
    explicit RadialFoliation(ConjugacyMap chart) : chart_(std::move(chart)) {}

    static RadialFoliation euclidean() { return {}; }

    bool is_euclidean() const { return chart_.is_identity(); }
    const ConjugacyMap& chart() const { return chart_; }
    std::string tag() const { return is_euclidean() ? "euclidean" : "chart(" + chart_.tag() + ")"; }

    /// h^-1(z): leaf angle and position along the leaf in polar form.
    Vec2 straighten(const Vec2& z) const { return is_euclidean() ? z : chart_.inverse(z); }

    double leaf_angle(const Vec2& z) const {
        const Vec2 w = straighten(z);
        return principal_angle(std::atan2(w.y(), w.x()));
    }
    double along(const Vec2& z) const { return straighten(z).norm(); }

    /// Lifted leaf coordinate; shifts by 2 pi under the deck map.
    double leaf_lift(const CoverPoint& p) const {
        if (is_euclidean()) return p.theta_lift();
        return p.theta_lift() + chart_.angular_displacement(p.project().vec(), true);
    }

    /// The point at position s on the leaf of angle psi.
    Vec2 leaf_point(double psi, double s) const {
        const Vec2 w(s * std::cos(psi), s * std::sin(psi));
        return is_euclidean() ? w : chart_.forward(w);
    }

private:
    ConjugacyMap chart_;
};

/// Lift of g(z) obtained by following the isotopy of g from a lift of z.
inline CoverPoint push_lift(const ConjugacyMap& g, const CoverPoint& p) {
    const Vec2 z = p.project().vec();
    const Vec2 gz = g.forward(z);
    return CoverPoint::from_lift(p.theta_lift() + g.angular_displacement(z), gz.norm());
}

inline constexpr double kLeafTie = 1e-12;

/// Position of z' relative to z: 1 to the left of the leaf of z, 3 to the
/// right, 0 further along the same leaf, 2 behind it.
inline QuarterTurn quarter_turn(const CoverPoint& z, const CoverPoint& zp, const RadialFoliation& F,
                                double tie = kLeafTie) {
    const double d = F.leaf_lift(zp) - F.leaf_lift(z);
    if (d > tie) return QuarterTurn(1);
    if (d < -tie) return QuarterTurn(3);
    const double s = F.along(z.project().vec());
    const double sp = F.along(zp.project().vec());
    if (sp > s + tie) return QuarterTurn(0);
    if (sp < s - tie) return QuarterTurn(2);
    fail(ErrorKind::SamePoint, "quarter_turn: the two lifted points coincide");
}

struct TrackerOptions {
    int steps_per_unit = 64;
    int max_depth = 24;
    int near_depth = 4;
    double near_level = kPi / 32.0;
    double tie = kLeafTie;
    int k_max = 8;
};

/// Lifted quarter-turn path of one deck copy (z, T^k z').
struct CopyTrack {
    int k = 0;
    long long start = 0;
    long long end = 0;

    long long tau() const { return end - start; }
    HalfInt lambda() const { return lambda_int(start, end); }
};

struct AnnulusSums {
    long long tau_bar = 0;
    long long tau_sum = 0;
    HalfInt lambda_sum;
    std::vector<CopyTrack> copies;
    int events = 0;

    long long tau_of_copy(int k) const {
        for (const auto& c : copies)
            if (c.k == k) return c.tau();
        return 0;
    }
};

namespace detail {

/// Concatenated isotopy path s in [0, n] of one point, seen through a chart.
class ChartedPath {
public:
    ChartedPath(const Isotopy& iso, const RadialFoliation& F, const Vec2& z, int n, int steps)
        : iso_(&iso), F_(&F), steps_(steps) {
        paths_.reserve(static_cast<std::size_t>(n));
        Vec2 p = z;
        for (int i = 0; i < n; ++i) {
            paths_.push_back(sample_path(iso, p, steps));
            p = paths_.back().end();
        }
    }

    int n() const { return static_cast<int>(paths_.size()); }
    const Vec2& orbit_point(int i) const { return paths_[static_cast<std::size_t>(i)].base; }
    Vec2 end_point() const { return paths_.back().end(); }

    /// Position at the grid index g in [0, n * steps].
    Vec2 at_grid(long g) const {
        const long i = std::min<long>(g / steps_, n() - 1);
        return paths_[static_cast<std::size_t>(i)].points[static_cast<std::size_t>(g - i * steps_)];
    }
    Vec2 at(double s) const {
        int i = static_cast<int>(std::floor(s));
        i = std::clamp(i, 0, n() - 1);
        return iso_->eval(s - i, paths_[static_cast<std::size_t>(i)].base);
    }
    Vec2 charted(const Vec2& p) const { return F_->straighten(p); }

private:
    const Isotopy* iso_;
    const RadialFoliation* F_;
    int steps_;
    std::vector<SampledPath> paths_;
};

struct TrackSample {
    double s;
    Vec2 w;
    Vec2 wp;
    double L;
    double Lp;
    double D() const { return Lp - L; }
};

inline int residue(double d, const Vec2& w, const Vec2& wp, double tie) {
    if (d > tie) return 1;
    if (d < -tie) return 3;
    const double s = w.norm();
    const double sp = wp.norm();
    if (sp > s + tie) return 0;
    if (sp < s - tie) return 2;
    fail(ErrorKind::SamePoint, "pair tracker: the two lifted points meet");
}

inline int mod4(long long v) { return static_cast<int>(((v % 4) + 4) % 4); }

/// Passes the odd state through the even value e.
inline long long pass_through(long long state, int e) {
    const long long up = state + 1;
    return mod4(up) == e ? state + 2 : state - 2;
}

}  // namespace detail

/// Tracks the quarter-turn paths s -> theta(f_s(z~), f_s(T^k z~')) for all
/// deck copies k along the n-fold concatenated isotopy. The lifts enter
/// through their leaf coordinates L0 and L0p.
inline AnnulusSums track_pair(const Isotopy& iso, const RadialFoliation& F, const Vec2& z, const Vec2& zp, double L0,
                              double L0p, int n = 1, const TrackerOptions& opt = {}) {
    using detail::TrackSample;
    if (z.norm() == 0.0 || zp.norm() == 0.0) fail(ErrorKind::ZeroPoint, "pair tracker: the origin has no lift");
    const detail::ChartedPath P(iso, F, z, n, opt.steps_per_unit);
    const detail::ChartedPath Q(iso, F, zp, n, opt.steps_per_unit);
    const double tie = opt.tie;

    auto make = [&](double s, const Vec2& p, const Vec2& q, const TrackSample& ref) {
        TrackSample t{s, P.charted(p), Q.charted(q), 0.0, 0.0};
        t.L = ref.L + angle_between(ref.w, t.w);
        t.Lp = ref.Lp + angle_between(ref.wp, t.wp);
        return t;
    };

    std::vector<TrackSample> samples;
    TrackSample first{0.0, P.charted(z), Q.charted(zp), L0, L0p};
    samples.push_back(first);

    auto near_level = [&](double lo, double hi) {
        const double below = lo - kTwoPi * std::floor(lo / kTwoPi);
        const double above = kTwoPi * std::ceil(hi / kTwoPi) - hi;
        const bool crosses = std::floor(lo / kTwoPi) != std::floor(hi / kTwoPi);
        if (crosses) return false;
        return (below > tie && below < opt.near_level) || (above > tie && above < opt.near_level);
    };

    std::function<void(const TrackSample&, double, const Vec2&, const Vec2&, int)> refine =
        [&](const TrackSample& A, double sb, const Vec2& pb, const Vec2& qb, int depth) {
            const Vec2 wb = P.charted(pb);
            const Vec2 wpb = Q.charted(qb);
            const bool alias = std::abs(angle_between(A.w, wb)) >= 0.5 * kPi ||
                               std::abs(angle_between(A.wp, wpb)) >= 0.5 * kPi;
            bool split = alias;
            TrackSample B{};
            if (!alias) {
                B = make(sb, pb, qb, A);
                const double lo = std::min(A.D(), B.D());
                const double hi = std::max(A.D(), B.D());
                if (hi - lo >= 0.25 * kPi) {
                    if (depth >= opt.max_depth)
                        fail(ErrorKind::StepTooCoarse, "pair tracker: quarter-turn jumps within one refined step");
                    split = true;
                } else if (near_level(lo, hi)) {
                    // A double crossing within the step can only matter if the along-order flips.
                    const bool flips = (A.wp.norm() > A.w.norm()) != (B.wp.norm() > B.w.norm());
                    split = depth < opt.near_depth || (flips && depth < opt.max_depth);
                }
            } else if (depth >= opt.max_depth) {
                fail(ErrorKind::RefinementExhausted, "pair tracker: leaf angles cannot be unwrapped");
            }
            if (!split) {
                samples.push_back(B);
                return;
            }
            const double sm = 0.5 * (A.s + sb);
            refine(A, sm, P.at(sm), Q.at(sm), depth + 1);
            const TrackSample M = samples.back();
            refine(M, sb, pb, qb, depth + 1);
        };

    const long grid = static_cast<long>(n) * opt.steps_per_unit;
    for (long g = 1; g <= grid; ++g) {
        const TrackSample A = samples.back();
        refine(A, static_cast<double>(g) / opt.steps_per_unit, P.at_grid(g), Q.at_grid(g), 0);
    }

    double dmin = samples.front().D();
    double dmax = dmin;
    for (const auto& t : samples) {
        dmin = std::min(dmin, t.D());
        dmax = std::max(dmax, t.D());
    }
    // Copy k sees D + 2 pi k; it can change state only if that reaches 0.
    const long long jlo = static_cast<long long>(std::ceil((dmin - tie) / kTwoPi));
    const long long jhi = static_cast<long long>(std::floor((dmax + tie) / kTwoPi));
    const long long limit = static_cast<long long>(opt.k_max) * n;
    const auto j0 = static_cast<long long>(std::floor(samples.front().D() / kTwoPi));
    if (jhi - j0 > limit || j0 - jlo > limit)
        fail(ErrorKind::TailNotCertified, "pair tracker: deck copies beyond k_max are not locked");

    AnnulusSums out;
    for (long long j = jlo; j <= jhi; ++j) {
        const double c = kTwoPi * static_cast<double>(j);
        const int r0 = detail::residue(samples.front().D() - c, samples.front().w, samples.front().wp, tie);
        long long state = r0 == 3 ? -1 : r0;
        const long long start = state;
        for (std::size_t m = 1; m < samples.size(); ++m) {
            const TrackSample& A = samples[m - 1];
            const TrackSample& B = samples[m];
            const double da = A.D() - c;
            const double db = B.D() - c;
            const int rb = detail::residue(db, B.w, B.wp, tie);
            if ((da > tie && db < -tie) || (da < -tie && db > tie)) {
                double s0 = A.s;
                double s1 = B.s;
                TrackSample mid = A;
                for (int it = 0; it < 60 && s1 - s0 > 1e-14; ++it) {
                    const double sm = 0.5 * (s0 + s1);
                    mid = make(sm, P.at(sm), Q.at(sm), A);
                    const double dm = mid.D() - c;
                    if ((dm > 0.0) == (da > 0.0))
                        s0 = sm;
                    else
                        s1 = sm;
                }
                const int e = mid.wp.norm() > mid.w.norm() ? 0 : 2;
                state = detail::pass_through(state, e);
                ++out.events;
                if (detail::mod4(state) != rb)
                    fail(ErrorKind::StepTooCoarse, "pair tracker: inconsistent quarter-turn crossing");
                continue;
            }
            const int ra = detail::mod4(state);
            const int diff = detail::mod4(rb - ra);
            if (diff == 1) {
                state += 1;
                ++out.events;
            } else if (diff == 3) {
                state -= 1;
                ++out.events;
            } else if (diff == 2) {
                fail(ErrorKind::StepTooCoarse, "pair tracker: quarter-turn changed by 2 in one step");
            }
        }
        CopyTrack ct{static_cast<int>(-j), start, state};
        out.copies.push_back(ct);
        out.tau_sum += ct.tau();
        out.tau_bar += std::llabs(ct.tau());
        out.lambda_sum += ct.lambda();
    }
    std::sort(out.copies.begin(), out.copies.end(), [](const CopyTrack& a, const CopyTrack& b) { return a.k < b.k; });
    return out;
}

/// tau_bar, tau and lambda of (z, z', F, f^-n(F)) summed over deck copies.
inline AnnulusSums annulus_sums(const Vec2& z, const Vec2& zp, const Isotopy& iso, const RadialFoliation& F, int n = 1,
                                const TrackerOptions& opt = {}) {
    if ((z - zp).norm() == 0.0) fail(ErrorKind::SamePoint, "annulus_sums needs distinct points");
    const double L0 = F.leaf_lift(lift(DiskPoint(z)));
    const double L0p = F.leaf_lift(lift(DiskPoint(zp)));
    return track_pair(iso, F, z, zp, L0, L0p, n, opt);
}

/// tau(z~, z~', F, f^-n(F)) for one lifted pair.
inline long long tau(const CoverPoint& z, const CoverPoint& zp, const Isotopy& iso, const RadialFoliation& F, int n = 1,
                     const TrackerOptions& opt = {}) {
    const Vec2 a = z.project().vec();
    const Vec2 b = zp.project().vec();
    const AnnulusSums s = track_pair(iso, F, a, b, F.leaf_lift(z), F.leaf_lift(zp), n, opt);
    return s.tau_of_copy(0);
}

/// lambda_{f^n, F}(z, z').
inline HalfInt lambda_f(const Vec2& z, const Vec2& zp, const Isotopy& iso, const RadialFoliation& F, int n = 1,
                        const TrackerOptions& opt = {}) {
    return annulus_sums(z, zp, iso, F, n, opt).lambda_sum;
}

/// Change of the lifted leaf coordinate of f_s(z), s in [0, n].
inline double leaf_angle_change(const Vec2& z, const Isotopy& iso, const RadialFoliation& F, int n = 1,
                                int steps = 64, int max_depth = 24) {
    if (z.norm() == 0.0) fail(ErrorKind::ZeroPoint, "displacement undefined at the origin");
    const detail::ChartedPath P(iso, F, z, n, steps);
    std::function<double(double, double, const Vec2&, const Vec2&, int)> sweep =
        [&](double s0, double s1, const Vec2& w0, const Vec2& w1, int depth) -> double {
        const double d = angle_between(w0, w1);
        if (std::abs(d) < 0.5 * kPi) return d;
        if (depth >= max_depth) fail(ErrorKind::RefinementExhausted, "leaf angle cannot be unwrapped");
        const double sm = 0.5 * (s0 + s1);
        const Vec2 wm = P.charted(P.at(sm));
        return sweep(s0, sm, w0, wm, depth + 1) + sweep(sm, s1, wm, w1, depth + 1);
    };
    double total = 0.0;
    Vec2 prev = P.charted(z);
    const long grid = static_cast<long>(n) * steps;
    for (long g = 1; g <= grid; ++g) {
        const Vec2 w = P.charted(P.at_grid(g));
        total += sweep(static_cast<double>(g - 1) / steps, static_cast<double>(g) / steps, prev, w, 0);
        prev = w;
    }
    return total;
}

/// m_{f^n, phi}(z) for the leaf phi of angle phi0, lifted through the isotopy.
inline long long displacement(const Vec2& z, const Isotopy& iso, const RadialFoliation& F, double phi0 = 0.0,
                              int n = 1) {
    const double start = phi0 + principal_angle(F.leaf_angle(z) - phi0);
    const double end = start + leaf_angle_change(z, iso, F, n);
    return static_cast<long long>(std::floor((end - phi0) / kTwoPi));
}

inline long long displacement(const DiskPoint& z, const Isotopy& iso, const RadialFoliation& F, double phi0 = 0.0,
                              int n = 1) {
    return displacement(z.vec(), iso, F, phi0, n);
}

/// Lambda = lambda_{f^n, F}(z, z') + m_{f^n, phi}(z).
inline HalfInt big_lambda(const Vec2& z, const Vec2& zp, const Isotopy& iso, const RadialFoliation& F,
                          double phi0 = 0.0, int n = 1, const TrackerOptions& opt = {}) {
    return lambda_f(z, zp, iso, F, n, opt) + HalfInt::integer(displacement(z, iso, F, phi0, n));
}

/// Angular distance from the leaf phi0 to the leaf of z, in (-pi, pi].
inline double leaf_gap(const Vec2& z, const RadialFoliation& F, double phi0) {
    return wrap_angle(F.leaf_angle(z) - phi0);
}

struct RotationProbe {
    ConvergenceReport report;
    ConvergenceReport second_ray;
    std::optional<ConvergenceReport> pushed_foliation;
    double min_radius = 0.0;
};

/// Averages (1/n) sum m_{f, phi}(f^i z) on a doubling schedule, recomputed for
/// a second ray and, when given, for a second foliation.
inline RotationProbe rotation_number(const Vec2& z, const Isotopy& iso, long n_max, const RadialFoliation& F,
                                     double r_floor = 1e-3, double phi0 = 0.0, double phi1 = 1.0,
                                     std::optional<RadialFoliation> G = std::nullopt, double tol = 0.02) {
    if (z.norm() == 0.0) fail(ErrorKind::ZeroPoint, "rotation number undefined at the origin");
    const auto pts = orbit(iso, z, static_cast<int>(n_max));
    RotationProbe probe;
    probe.min_radius = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) probe.min_radius = std::min(probe.min_radius, p.norm());
    if (probe.min_radius < r_floor)
        fail(ErrorKind::OrbitEscapesCompact, "orbit comes within " + std::to_string(probe.min_radius) + " of 0");
    std::vector<double> m0(pts.size());
    std::vector<double> m1(pts.size());
    std::vector<double> m2(G ? pts.size() : 0);
    parallel_for(pts.size(), [&](std::size_t i) {
        const double change = leaf_angle_change(pts[i], iso, F);
        const double a0 = phi0 + principal_angle(F.leaf_angle(pts[i]) - phi0);
        const double a1 = phi1 + principal_angle(F.leaf_angle(pts[i]) - phi1);
        m0[i] = std::floor((a0 + change - phi0) / kTwoPi);
        m1[i] = std::floor((a1 + change - phi1) / kTwoPi);
        if (G) m2[i] = static_cast<double>(displacement(pts[i], iso, *G, phi0));
    });
    const auto sched = doubling_schedule(n_max);
    const double rho = iso.boundary_rot();
    probe.report = report_from_terms(m0, sched, rho, tol);
    probe.second_ray = report_from_terms(m1, sched, rho, tol);
    if (G) probe.pushed_foliation = report_from_terms(m2, sched, rho, tol);
    return probe;
}

/// Largest |tau| over sampled pairs and deck copies for (F, f^-n(F)); a lower
/// bound for the winding distance.
inline long long winding_distance_probe(const RadialFoliation& F, const Isotopy& iso,
                                        const std::vector<std::pair<Vec2, Vec2>>& pairs, int n = 1,
                                        const TrackerOptions& opt = {}) {
    long long worst = 0;
    for (const auto& [z, zp] : pairs)
        for (const auto& c : annulus_sums(z, zp, iso, F, n, opt).copies) worst = std::max(worst, std::llabs(c.tau()));
    return worst;
}

}  // namespace diskrot
