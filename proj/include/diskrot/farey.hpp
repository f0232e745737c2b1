#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "diskrot/foliation.hpp"
#include "diskrot/sampling.hpp"
#include "diskrot/winding.hpp"

namespace diskrot {

struct Convergent {
    long long a = 0;
    long long b = 1;
    double defect = 0.0;  // a - b alpha
    long long partial_quotient = 0;

    double value() const { return static_cast<double>(a) / static_cast<double>(b); }
};

/// Continued-fraction convergents a/b of alpha with b >= 2, in order.
inline std::vector<Convergent> convergents(double alpha, int count, double rational_tol = 1e-12) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "convergents need alpha in (0, 1)");
    std::vector<Convergent> out;
    long long h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    double x = alpha;
    for (int guard = 0; static_cast<int>(out.size()) < count; ++guard) {
        if (guard > 60) fail(ErrorKind::RationalInput, "continued fraction of alpha is too long to resolve");
        const double c = std::floor(x);
        const auto ci = static_cast<long long>(c);
        const long long h = ci * h1 + h2;
        const long long k = ci * k1 + k2;
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
        if (k >= 2)
            out.push_back({h, k, static_cast<double>(h) - static_cast<double>(k) * alpha, ci});
        const double frac = x - c;
        if (std::abs(alpha - static_cast<double>(h) / static_cast<double>(k)) < rational_tol || frac <= 0.0) {
            if (static_cast<int>(out.size()) < count)
                fail(ErrorKind::RationalInput, "alpha is within " + std::to_string(rational_tol) + " of " +
                                                   std::to_string(h) + "/" + std::to_string(k));
            break;
        }
        x = 1.0 / frac;
    }
    return out;
}

/// The circle S_{a/b} of the plane extension, made of points of period b.
struct InvariantCircleSpec {
    long long a = 0;
    long long b = 1;
    double radius = 1.0;

    InvariantCircleSpec(long long a_, long long b_, double alpha, double beta) : a(a_), b(b_) {
        const double q = static_cast<double>(a) / static_cast<double>(b);
        if (!(q > alpha && q < beta)) fail(ErrorKind::InvalidArgument, "a/b must lie in (alpha, beta)");
        radius = 1.0 + q - alpha;
    }
};

struct StripEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    double expected = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool transverse = true;
    std::size_t lock_failures = 0;
};

struct StripOptions {
    double phi0 = 0.0;
    bool require_lock = true;
};

/// Multiplicity of the sample z in the strip between the leaf phi0 and its
/// preimage under f^b T^-a: the number of lifts z~ with phi0 <= l(z~) and
/// l(f^b T^-a z~) < phi0. Equals a - m_{f^b, phi}(z) when the leaf is moved
/// to its right.
inline long long strip_multiplicity(const Vec2& z, const Isotopy& iso, const RadialFoliation& F, long long a,
                                    long long b, double phi0, bool* locked = nullptr) {
    const double change = leaf_angle_change(z, iso, F, static_cast<int>(b));
    if (locked) *locked = change - kTwoPi * static_cast<double>(a) < 0.0;
    const double start = phi0 + principal_angle(F.leaf_angle(z) - phi0);
    const auto m = static_cast<long long>(std::floor((start + change - phi0) / kTwoPi));
    return a - m;
}

/// Monte Carlo mass of the strip O(z~) for the convergent (a, b). For the
/// rigid zone the expected value is a - b alpha.
inline StripEstimate strip_measure(const Isotopy& iso, const Convergent& conv, const RadialFoliation& F,
                                   const PointSampler& measure, std::size_t samples, std::uint64_t seed,
                                   const StripOptions& opt = {}) {
    if (iso.tag() != FamilyTag::PlaneExtension)
        fail(ErrorKind::InvalidArgument, "strip_measure needs a plane-extension isotopy");
    const auto& ext = std::get<PlaneExtension>(iso.family());
    const double q = conv.value();
    if (!(q > ext.alpha && q < ext.beta)) fail(ErrorKind::InvalidArgument, "a/b must lie in (alpha, beta)");
    const std::size_t shards = std::min<std::size_t>(samples, 64);
    std::vector<double> sum(shards, 0.0);
    std::vector<double> sum2(shards, 0.0);
    std::vector<std::size_t> fails(shards, 0);
    parallel_for(shards, [&](std::size_t sh) {
        auto rng = shard_rng(seed, sh);
        const std::size_t lo = samples * sh / shards;
        const std::size_t hi = samples * (sh + 1) / shards;
        for (std::size_t s = lo; s < hi; ++s) {
            Vec2 z = measure(rng);
            while (z.norm() == 0.0) z = measure(rng);
            bool locked = true;
            const double k = static_cast<double>(strip_multiplicity(z, iso, F, conv.a, conv.b, opt.phi0, &locked));
            if (!locked) ++fails[sh];
            sum[sh] += k;
            sum2[sh] += k * k;
        }
    });
    StripEstimate est;
    double s = 0.0;
    double s2 = 0.0;
    for (std::size_t sh = 0; sh < shards; ++sh) {
        s += sum[sh];
        s2 += sum2[sh];
        est.lock_failures += fails[sh];
    }
    const double N = static_cast<double>(samples);
    est.value = s / N;
    est.stderr_ = std::sqrt(std::max(0.0, (s2 - N * est.value * est.value) / (N - 1.0)) / N);
    est.expected = static_cast<double>(conv.a) - static_cast<double>(conv.b) * ext.alpha;
    est.samples = samples;
    est.seed = seed;
    est.transverse = est.lock_failures == 0;
    if (opt.require_lock && !est.transverse)
        fail(ErrorKind::FoliationNotTransverse, std::to_string(est.lock_failures) +
                                                    " samples are not moved to the right of their leaf");
    return est;
}

struct MeasureRotation {
    MeanEstimate winding_based;
    MeanEstimate displacement_based;
    double difference = 0.0;
    double difference_stderr = 0.0;
};

/// int W(0, z) dmu and int m(z) dmu on the same samples, with the standard
/// error of their paired difference.
inline MeasureRotation rotation_of_measure(const Isotopy& iso, const PointSampler& measure, std::size_t samples,
                                           std::uint64_t seed, const RadialFoliation& F = RadialFoliation::euclidean(),
                                           double phi0 = 0.0) {
    if (measure.zero_mass > 0.0) fail(ErrorKind::InvalidArgument, "the measure must not charge the fixed point");
    std::vector<double> w(samples);
    std::vector<double> m(samples);
    const std::size_t shards = std::min<std::size_t>(samples, 64);
    parallel_for(shards, [&](std::size_t sh) {
        auto rng = shard_rng(seed, sh);
        for (std::size_t s = samples * sh / shards; s < samples * (sh + 1) / shards; ++s) {
            Vec2 z = measure(rng);
            while (z.norm() == 0.0) z = measure(rng);
            w[s] = winding(iso, Vec2(0.0, 0.0), z);
            m[s] = static_cast<double>(displacement(z, iso, F, phi0));
        }
    });
    MeasureRotation out;
    out.winding_based = mean_estimate(w);
    out.displacement_based = mean_estimate(m);
    std::vector<double> d(samples);
    for (std::size_t i = 0; i < samples; ++i) d[i] = m[i] - w[i];
    const auto de = mean_estimate(d);
    out.difference = de.value;
    out.difference_stderr = de.stderr_;
    return out;
}

/// Monte Carlo integral of W against mu x nu; near-diagonal pairs are redrawn.
inline MeanEstimate product_integral_winding(const Isotopy& iso, const PointSampler& mu, const PointSampler& nu,
                                             std::size_t samples, std::uint64_t seed, WindingOptions opt = {}) {
    std::vector<double> w(samples);
    const std::size_t shards = std::min<std::size_t>(samples, 64);
    parallel_for(shards, [&](std::size_t sh) {
        auto rng = shard_rng(seed, sh);
        for (std::size_t s = samples * sh / shards; s < samples * (sh + 1) / shards; ++s) {
            for (;;) {
                const Vec2 x = mu(rng);
                const Vec2 y = nu(rng);
                if ((x - y).norm() <= opt.merge_eps) continue;
                w[s] = winding(iso, x, y, opt);
                break;
            }
        }
    });
    return mean_estimate(w);
}

}  // namespace diskrot
