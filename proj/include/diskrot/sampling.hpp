#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "diskrot/conjugacy.hpp"
#include "diskrot/parallel.hpp"

namespace diskrot {

/// A probability measure given by a sampler. zero_mass is the weight of the
/// Dirac mass at the origin, if any.
struct PointSampler {
    std::function<Vec2(std::mt19937_64&)> draw;
    std::string name;
    double zero_mass = 0.0;

    Vec2 operator()(std::mt19937_64& rng) const { return draw(rng); }
};

/// Normalized Lebesgue measure on the disk of radius `radius`.
inline PointSampler lebesgue_disk(double radius = 1.0) {
    return {[radius](std::mt19937_64& rng) {
                const double r = radius * std::sqrt(uniform01(rng));
                const double t = kTwoPi * uniform01(rng);
                return Vec2(r * std::cos(t), r * std::sin(t));
            },
            "lebesgue", 0.0};
}

/// Uniform measure on the circle of radius c carried by g; invariant under
/// g o R o g^-1 for every rotation R.
inline PointSampler invariant_circle(const ConjugacyMap& g, double c) {
    return {[g, c](std::mt19937_64& rng) {
                const double t = kTwoPi * uniform01(rng);
                return g.forward(Vec2(c * std::cos(t), c * std::sin(t)));
            },
            "circle(" + std::to_string(c) + ")", 0.0};
}

/// w delta_0 + (1 - w) base.
inline PointSampler dirac_mixture(double w, PointSampler base) {
    if (!(w >= 0.0 && w <= 1.0)) fail(ErrorKind::InvalidArgument, "mixture weight must lie in [0, 1]");
    const std::string name = std::to_string(w) + " delta0 + " + base.name;
    const double zero = w + (1.0 - w) * base.zero_mass;
    return {[w, b = std::move(base)](std::mt19937_64& rng) {
                if (uniform01(rng) < w) return Vec2(0.0, 0.0);
                return b(rng);
            },
            name, zero};
}

/// Sample mean and standard error.
struct MeanEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

inline MeanEstimate mean_estimate(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n), xs.size()};
}

}  // namespace diskrot
