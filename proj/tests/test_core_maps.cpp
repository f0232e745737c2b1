#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diskrot/conjugacy.hpp"
#include "diskrot/geometry.hpp"
#include "diskrot/isotopy.hpp"
#include "diskrot/parallel.hpp"

using namespace diskrot;

namespace {

Vec2 random_disk_point(std::mt19937_64& rng, double radius = 1.0) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double t = kTwoPi * uniform01(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

std::vector<Isotopy> builtin_families() {
    std::vector<Isotopy> out;
    out.push_back(make_rigid_rotation(kGolden));
    out.push_back(make_radial_twist(kGolden, 0.7));
    for (const auto& name : ConjugacyMap::hamiltonian_names())
        out.push_back(make_conjugated_rotation(kGolden, ConjugacyMap::named(name)));
    out.push_back(make_plane_extension(kGolden, 0.75));
    out.push_back(make_plane_extension(kGolden, 0.75, ConjugacyMap::named("tripole")));
    return out;
}

Mat2 finite_difference(const std::function<Vec2(const Vec2&)>& f, const Vec2& z, double h = 1e-6) {
    Mat2 j;
    for (int c = 0; c < 2; ++c) {
        Vec2 e = Vec2::Zero();
        e[c] = h;
        j.col(c) = (f(z + e) - f(z - e)) / (2.0 * h);
    }
    return j;
}

}  // namespace

TEST(DiskPoint, PolarRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        const double r = uniform01(rng);
        const double t = kTwoPi * uniform01(rng);
        const DiskPoint p = DiskPoint::polar(r, t);
        EXPECT_NEAR(p.r(), r, 1e-12);
        if (r > 1e-6) {
            EXPECT_NEAR(std::abs(wrap_angle(p.theta() - t)), 0.0, 1e-12);
        }
    }
}

TEST(Lift, PrincipalBranchAndHint) {
    EXPECT_NEAR(lift(DiskPoint::polar(0.5, kPi / 4)).theta_lift(), kPi / 4, 1e-15);
    const CoverPoint hinted = lift(DiskPoint::polar(0.5, 0.1), CoverPoint::from_lift(6.3, 0.5));
    EXPECT_NEAR(hinted.theta_lift(), 0.1 + kTwoPi, 1e-12);
}

TEST(Lift, OriginHasNoLift) {
    try {
        lift(DiskPoint(0.0, 0.0));
        FAIL() << "expected ZeroPoint";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroPoint);
    }
}

TEST(Lift, CoherenceAndDeckEquivariance) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const DiskPoint z(random_disk_point(rng));
        const CoverPoint hint = CoverPoint::from_lift(20.0 * (uniform01(rng) - 0.5), 0.5);
        const CoverPoint l = lift(z, hint);
        EXPECT_LT(distance(l.project(), z), 1e-12);
        EXPECT_LE(std::abs(l.theta_lift() - hint.theta_lift()), kPi + 1e-12);
        const CoverPoint shifted = lift(z, deck(hint));
        EXPECT_EQ(shifted, deck(l));
        EXPECT_EQ(deck(deck(l, 1), -1), l);
    }
}

TEST(ConjugacyMap, InverseAndAreaPreservation) {
    std::mt19937_64 rng(3);
    for (const auto& name : ConjugacyMap::hamiltonian_names()) {
        const auto g = ConjugacyMap::named(name);
        for (int i = 0; i < 500; ++i) {
            const Vec2 z = random_disk_point(rng);
            EXPECT_LT((g.forward(g.inverse(z)) - z).norm(), 1e-10) << name;
            EXPECT_LT((g.inverse(g.forward(z)) - z).norm(), 1e-10) << name;
            Mat2 j;
            g.forward(z, j);
            EXPECT_NEAR(j.determinant(), 1.0, 1e-10) << name;
        }
    }
}

TEST(ConjugacyMap, CompactSupport) {
    std::mt19937_64 rng(5);
    for (const double delta : {0.1, 0.3}) {
        for (const auto& name : ConjugacyMap::hamiltonian_names()) {
            const auto g = ConjugacyMap::named(name, 8, 1.0 - delta);
            for (int i = 0; i < 200; ++i) {
                const double r = 1.0 - delta + delta * uniform01(rng);
                const Vec2 z = DiskPoint::polar(r, kTwoPi * uniform01(rng)).vec();
                EXPECT_EQ(g.forward(z), z) << name;
            }
        }
    }
}

TEST(ConjugacyMap, AnalyticJacobianMatchesFiniteDifferences) {
    std::mt19937_64 rng(9);
    for (const auto& name : ConjugacyMap::hamiltonian_names()) {
        const auto g = ConjugacyMap::named(name);
        for (int i = 0; i < 50; ++i) {
            const Vec2 z = random_disk_point(rng, 0.95);
            Mat2 j;
            g.forward(z, j);
            const Mat2 fd = finite_difference([&](const Vec2& p) { return g.forward(p); }, z);
            EXPECT_LT((j - fd).norm(), 1e-6) << name;
        }
    }
}

TEST(ConjugacyMap, FixesOrigin) {
    for (const auto& name : ConjugacyMap::hamiltonian_names()) {
        const auto g = ConjugacyMap::named(name);
        EXPECT_EQ(g.forward(Vec2(0.0, 0.0)), Vec2(0.0, 0.0)) << name;
    }
}

TEST(ConjugacyMap, RejectsBadParameters) {
    EXPECT_THROW(ConjugacyMap::named("no-such-field"), Error);
    EXPECT_THROW(ConjugacyMap::named("tripole", 0), Error);
    EXPECT_THROW(ConjugacyMap::named("tripole", 8, 1.2), Error);
}

TEST(Isotopy, ConjugatedByIdentityIsRigid) {
    const auto iso = make_conjugated_rotation(kGolden, ConjugacyMap::identity());
    const Vec2 z = iso.eval(1.0, Vec2(1.0, 0.0));
    EXPECT_NEAR(z.x(), std::cos(kTwoPi * kGolden), 1e-15);
    EXPECT_NEAR(z.y(), std::sin(kTwoPi * kGolden), 1e-15);
    EXPECT_TRUE(iso.warnings().empty());
    EXPECT_DOUBLE_EQ(iso.boundary_rot(), kGolden);
}

TEST(Isotopy, NearRationalIsOnlyAWarning) {
    const auto iso = make_conjugated_rotation(0.5 + 1e-14, ConjugacyMap::named("tripole"));
    ASSERT_EQ(iso.warnings().size(), 1u);
    EXPECT_NE(iso.warnings().front().find("NearRational"), std::string::npos);
}

TEST(Isotopy, IdentityAtTimeZeroAndAreaPreserving) {
    std::mt19937_64 rng(13);
    for (const auto& iso : builtin_families()) {
        for (int i = 0; i < 1000; ++i) {
            const Vec2 z = random_disk_point(rng);
            const double t = uniform01(rng);
            EXPECT_LT((iso.eval(0.0, z) - z).norm(), 1e-12);
            EXPECT_NEAR(iso.jac(t, z).determinant(), 1.0, 1e-9) << to_string(iso.tag());
        }
    }
}

TEST(Isotopy, BoundaryIsRigidlyRotated) {
    std::mt19937_64 rng(17);
    for (const auto& iso : builtin_families()) {
        for (int i = 0; i < 200; ++i) {
            const double th = kTwoPi * uniform01(rng);
            const double t = uniform01(rng);
            const Vec2 z(std::cos(th), std::sin(th));
            const Vec2 w = iso.eval(t, z);
            EXPECT_NEAR(w.norm(), 1.0, 1e-10);
            EXPECT_LT((w - rotation(kTwoPi * t * kGolden) * z).norm(), 1e-10);
        }
    }
}

TEST(Isotopy, ConjugationConsistency) {
    std::mt19937_64 rng(19);
    const auto g = ConjugacyMap::named("vortex-pair");
    const auto iso = make_conjugated_rotation(kGolden, g);
    for (int i = 0; i < 500; ++i) {
        const Vec2 z = random_disk_point(rng);
        const double t = uniform01(rng);
        const Vec2 direct = g.forward(rotation(kTwoPi * t * kGolden) * g.inverse(z));
        EXPECT_LT((iso.eval(t, z) - direct).norm(), 1e-10);
    }
}

TEST(Isotopy, OriginIsFixedForAllTimes) {
    for (const auto& iso : builtin_families())
        for (double t : {0.0, 0.25, 0.5, 0.9, 1.0}) EXPECT_EQ(iso.eval(t, Vec2(0.0, 0.0)), Vec2(0.0, 0.0));
}

TEST(Isotopy, JacobianAndVelocityMatchFiniteDifferences) {
    std::mt19937_64 rng(23);
    auto families = builtin_families();
    families.push_back(make_iterated(make_conjugated_rotation(kGolden, ConjugacyMap::named("tripole")), 3));
    for (const auto& iso : families) {
        for (int i = 0; i < 30; ++i) {
            const Vec2 z = random_disk_point(rng, 0.97);
            const double t = 0.05 + 0.9 * uniform01(rng);
            const Mat2 fd = finite_difference([&](const Vec2& p) { return iso.eval(t, p); }, z);
            EXPECT_LT((iso.jac(t, z) - fd).norm(), 1e-5) << to_string(iso.tag());
            const double h = 1e-6;
            const Vec2 vfd = (iso.eval(t + h, z) - iso.eval(t - h, z)) / (2.0 * h);
            EXPECT_LT((iso.velocity(t, z) - vfd).norm(), 1e-5) << to_string(iso.tag());
        }
    }
}

TEST(Isotopy, SampledPathMatchesEvaluation) {
    const auto iso = make_conjugated_rotation(kGolden, ConjugacyMap::named("elliptic"));
    const Vec2 z(0.3, -0.2);
    std::vector<Vec2> pts(65);
    iso.sample_path(z, 64, pts);
    for (int k = 0; k <= 64; ++k) EXPECT_EQ(pts[k], iso.eval(k / 64.0, z));
    EXPECT_EQ(pts[64], iso.map(z));
}

TEST(Isotopy, IteratedIsTheNthPower) {
    const auto base = make_conjugated_rotation(kGolden, ConjugacyMap::named("tripole"));
    const auto it = make_iterated(base, 5);
    const Vec2 z(0.41, 0.2);
    Vec2 p = z;
    for (int i = 0; i < 5; ++i) p = base.map(p);
    EXPECT_LT((it.map(z) - p).norm(), 1e-13);
    EXPECT_NEAR(it.boundary_rot(), 5 * kGolden, 1e-15);
}

TEST(PlaneExtension, AngularProfile) {
    const double beta = 0.75;
    const auto iso = make_plane_extension(kGolden, beta);
    auto angle_moved = [&](double r) {
        const Vec2 z(r, 0.0);
        const Vec2 w = iso.map(z);
        return principal_angle(std::atan2(w.y(), w.x()));
    };
    EXPECT_NEAR(angle_moved(1.0), principal_angle(kTwoPi * kGolden), 1e-12);
    const double r23 = 1.0 + 2.0 / 3.0 - kGolden;
    EXPECT_NEAR(angle_moved(r23), principal_angle(kTwoPi * 2.0 / 3.0), 1e-12);
    Vec2 p(r23 * std::cos(0.4), r23 * std::sin(0.4));
    const Vec2 p0 = p;
    for (int i = 0; i < 3; ++i) p = iso.map(p);
    EXPECT_LT((p - p0).norm(), 1e-12);
    for (double r : {1.132, 1.5, 3.0}) EXPECT_NEAR(angle_moved(r), principal_angle(kTwoPi * beta), 1e-12);
}

TEST(PlaneExtension, RejectsBadIntervals) {
    for (auto [a, b] : {std::pair{0.6, 0.6}, std::pair{0.7, 0.6}, std::pair{0.5, 1.5}}) {
        try {
            make_plane_extension(a, b);
            FAIL() << "expected BadInterval";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::BadInterval);
        }
    }
    // beta = 0.75 is rational: allowed, with a warning.
    EXPECT_FALSE(make_plane_extension(kGolden, 0.75).warnings().empty());
}
