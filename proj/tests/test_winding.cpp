#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diskrot/parallel.hpp"
#include "diskrot/winding.hpp"

using namespace diskrot;

namespace {

Vec2 random_disk_point(std::mt19937_64& rng, double radius = 1.0) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double t = kTwoPi * uniform01(rng);
    return {r * std::cos(t), r * std::sin(t)};
}

Isotopy conjugated(const char* name = "vortex-pair") {
    return make_conjugated_rotation(kGolden, ConjugacyMap::named(name));
}

}  // namespace

TEST(Winding, RigidRotationIsExact) {
    const auto iso = make_rigid_rotation(kGolden);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 x = random_disk_point(rng);
        const Vec2 y = random_disk_point(rng);
        EXPECT_NEAR(winding(iso, x, y), kGolden, 1e-12);
    }
}

TEST(Winding, IdentityIsotopyGivesZero) {
    const auto iso = make_rigid_rotation(0.0);
    EXPECT_EQ(winding(iso, Vec2(0.1, 0.2), Vec2(-0.3, 0.5)), 0.0);
}

TEST(Winding, SymmetricBitForBit) {
    const auto iso = conjugated("tripole");
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
        const Vec2 x = random_disk_point(rng);
        const Vec2 y = random_disk_point(rng);
        EXPECT_EQ(winding(iso, x, y), winding(iso, y, x));
    }
}

TEST(Winding, CoincidentPointsRejected) {
    const auto iso = conjugated();
    try {
        winding(iso, Vec2(0.2, 0.2), Vec2(0.2, 0.2 + 1e-10));
        FAIL() << "expected CoincidentPoints";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CoincidentPoints);
    }
}

TEST(Winding, RefinementExhaustedWhenCapIsZero) {
    // A twist of 40 turns cannot be resolved by 64 samples without bisection.
    const auto iso = make_radial_twist(0.0, 40.0);
    WindingOptions opt;
    opt.max_refinements = 0;
    try {
        winding(iso, Vec2(0.0, 0.0), Vec2(0.1, 0.0), opt);
        FAIL() << "expected RefinementExhausted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RefinementExhausted);
    }
    int refinements = 0;
    const double w = winding(iso, Vec2(0.0, 0.0), Vec2(0.1, 0.0), {}, &refinements);
    const double u = 1.0 - 0.01;
    EXPECT_NEAR(w, 40.0 * u * u, 1e-9);
    EXPECT_GT(refinements, 0);
}

TEST(Winding, LedgerIsCertified) {
    const auto iso = make_radial_twist(0.2, 5.0);
    const AngleLedger ledger = winding_ledger(iso, Vec2(0.0, 0.0), Vec2(0.3, 0.1));
    EXPECT_TRUE(ledger.certified());
    EXPECT_DOUBLE_EQ(ledger.turns(), winding(iso, Vec2(0.0, 0.0), Vec2(0.3, 0.1)));
}

TEST(Winding, OriginWindingMatchesRadialProfile) {
    // For f_t(z) = R_{2 pi t rho(|z|)} z and the fixed point 0, W(0, z) = rho(|z|).
    const auto iso = make_radial_twist(kGolden, 0.9);
    for (double r : {0.1, 0.4, 0.8, 0.99}) {
        const double u = 1.0 - r * r;
        EXPECT_NEAR(winding(iso, Vec2(0.0, 0.0), Vec2(0.0, r)), kGolden + 0.9 * u * u, 1e-12);
    }
}

TEST(WindingTangent, RigidRotation) {
    const auto iso = make_rigid_rotation(kGolden);
    EXPECT_NEAR(winding_tangent(iso, TangentPair(DiskPoint(0.3, 0.1), Vec2(1.0, 2.0))), kGolden, 1e-12);
}

TEST(WindingTangent, ConformalFixedPointRotatesByAlpha) {
    for (const char* name : {"vortex-pair", "tripole"}) {
        const auto iso = conjugated(name);
        for (double a : {0.0, 1.0, 2.5})
            EXPECT_NEAR(winding_tangent(iso, TangentPair(DiskPoint(0.0, 0.0), Vec2(std::cos(a), std::sin(a)))),
                        kGolden, 1e-8)
                << name;
    }
}

TEST(WindingTangent, BlowUpContinuity) {
    const auto iso = conjugated("elliptic");
    const Vec2 x(0.25, -0.1);
    const Vec2 xi = Vec2(0.6, 0.8);
    const double wt = winding_tangent(iso, TangentPair(DiskPoint(x), xi));
    double prev = 1e9;
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const double err = std::abs(winding(iso, x, Vec2(x + h * xi)) - wt);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(WindingTangent, SingularJacobianDetected) {
    // Degenerate direction through an explicitly singular linear isotopy is
    // not constructible from area-preserving maps; a zero vector is rejected up front.
    EXPECT_THROW(TangentPair(DiskPoint(0.1, 0.1), Vec2(0.0, 0.0)), Error);
}

TEST(WindingIterate, RigidAdditivity) {
    const auto iso = make_rigid_rotation(kGolden);
    EXPECT_NEAR(winding_iterate(iso, Vec2(0.1, 0.3), Vec2(-0.4, 0.2), 7), 7 * kGolden, 1e-11);
    EXPECT_EQ(winding_iterate(iso, Vec2(0.1, 0.3), Vec2(-0.4, 0.2), 1), winding(iso, Vec2(0.1, 0.3), Vec2(-0.4, 0.2)));
}

TEST(WindingIterate, SumOfStepsAndConcatenatedIsotopy) {
    const auto iso = conjugated("tripole");
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec2 x = random_disk_point(rng);
        const Vec2 y = random_disk_point(rng);
        double steps = 0.0;
        Vec2 a = x;
        Vec2 b = y;
        for (int i = 0; i < 32; ++i) {
            steps += winding(iso, a, b);
            a = iso.map(a);
            b = iso.map(b);
        }
        EXPECT_NEAR(winding_iterate(iso, x, y, 32), steps, 1e-9);
        // Independent route: one coarse grid over the 32-fold isotopy, refined by bisection.
        EXPECT_NEAR(winding(make_iterated(iso, 32), x, y), steps, 1e-9);
    }
}

TEST(WindingIterate, OrbitCollisionDetected) {
    const auto iso = make_rigid_rotation(kGolden);
    // x and y in the same orbit, three steps apart, never coincide at equal times;
    // a genuine collision needs x = y, which the first check reports as a collision.
    try {
        winding_iterate(iso, Vec2(0.3, 0.0), Vec2(0.3, 0.0), 4);
        FAIL() << "expected OrbitCollision";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrbitCollision);
    }
}

TEST(Winding, BoundedAndStableUnderRefinement) {
    const auto iso = conjugated("vortex-pair");
    std::mt19937_64 rng(6);
    WindingOptions fine;
    fine.initial_steps = 256;
    double sup = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vec2 x = random_disk_point(rng);
        const Vec2 y = random_disk_point(rng);
        const double w = winding(iso, x, y);
        sup = std::max(sup, std::abs(w));
        if (i % 100 == 0) {
            EXPECT_NEAR(winding(iso, x, y, fine), w, 1e-9);
        }
    }
    EXPECT_LT(sup, 10.0);
}

TEST(LinearizedRotation, ConvergesToAlphaForNonConformalFixedPoint) {
    const auto iso = conjugated("elliptic");
    const double rho = linearized_rotation_number(iso, Vec2(0.0, 0.0), Vec2(1.0, 0.0), 1L << 14);
    EXPECT_NEAR(rho, kGolden, 1e-3);
    // A single step is not alpha: Dg(0) is not conformal.
    EXPECT_GT(std::abs(winding_tangent(iso, TangentPair(DiskPoint(0.0, 0.0), Vec2(1.0, 0.0))) - kGolden), 1e-4);
}

TEST(WindingCrosscheck, SameMapTwoIsotopies) {
    // R_alpha through the rigid family and through a constant radial profile.
    RadialProfile p{[](double) { return kGolden; }, [](double) { return 0.0; }, "constant"};
    const Isotopy radial{p};
    const std::vector<std::pair<Vec2, Vec2>> pairs{{Vec2(0.1, 0.2), Vec2(-0.5, 0.3)}, {Vec2(0.0, 0.0), Vec2(0.9, 0.0)}};
    EXPECT_LT(winding_crosscheck(make_rigid_rotation(kGolden), radial, pairs), 1e-12);
}
