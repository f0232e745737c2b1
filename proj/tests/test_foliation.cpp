#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "diskrot/foliation.hpp"

using namespace diskrot;

namespace {

Vec2 random_disk_point(std::mt19937_64& rng, double r_min = 0.05) {
    for (;;) {
        const double r = std::sqrt(uniform01(rng));
        if (r < r_min) continue;
        const double t = kTwoPi * uniform01(rng);
        return {r * std::cos(t), r * std::sin(t)};
    }
}

// Multiples of 4 strictly between k and l, plus half of those among {k, l}, counted one by one.
double lambda_brute(long long k, long long l) {
    if (k == l) return 0.0;
    const double sign = k < l ? 1.0 : -1.0;
    const long long lo = std::min(k, l);
    const long long hi = std::max(k, l);
    double count = 0.0;
    for (long long v = lo; v <= hi; ++v) {
        if (((v % 4) + 4) % 4 != 0) continue;
        count += (v == lo || v == hi) ? 0.5 : 1.0;
    }
    return sign * count;
}

std::vector<Isotopy> families() {
    return {make_rigid_rotation(kGolden), make_radial_twist(0.3, 2.0), make_radial_twist(0.1, -1.5),
            make_conjugated_rotation(kGolden, ConjugacyMap::named("tripole")),
            make_conjugated_rotation(kGolden, ConjugacyMap::named("vortex-pair"))};
}

CoverPoint polar(double theta, double r) { return CoverPoint::from_lift(theta, r); }

// f~(z~) for the Euclidean foliation, following the isotopy from the lift z~.
CoverPoint push(const CoverPoint& p, const Isotopy& iso, int n = 1) {
    const Vec2 z = p.project().vec();
    const double change = leaf_angle_change(z, iso, RadialFoliation::euclidean(), n);
    Vec2 fz = z;
    for (int i = 0; i < n; ++i) fz = iso.map(fz);
    return CoverPoint::from_lift(p.theta_lift() + change, fz.norm());
}

}  // namespace

TEST(LambdaInt, Examples) {
    EXPECT_EQ(lambda_int(3, 3), HalfInt());
    EXPECT_EQ(lambda_int(0, 4), HalfInt::integer(1));
    EXPECT_EQ(lambda_int(1, 9), HalfInt::integer(2));
    EXPECT_EQ(lambda_int(-1, 1), HalfInt::integer(1));
    EXPECT_EQ(lambda_int(-1, 0), HalfInt::from_twice(1));
    EXPECT_EQ(lambda_int(1, 3), HalfInt());
    EXPECT_EQ(lambda_int(4, 0).str(), "-1");
    EXPECT_EQ(lambda_int(0, 1).str(), "1/2");
}

TEST(LambdaInt, ExhaustiveCocycleAndBruteForce) {
    for (long long k = -20; k <= 20; ++k)
        for (long long l = -20; l <= 20; ++l) {
            ASSERT_EQ(lambda_int(k, l).value(), lambda_brute(k, l)) << k << " " << l;
            ASSERT_EQ(lambda_int(k, l), -lambda_int(l, k));
            for (long long m = -20; m <= 20; ++m) ASSERT_EQ(lambda_int(k, l) + lambda_int(l, m), lambda_int(k, m));
        }
}

TEST(LambdaInt, PeriodicUnderShiftByFour) {
    for (long long k = -9; k <= 9; ++k)
        for (long long l = -9; l <= 9; ++l) EXPECT_EQ(lambda_int(k + 8, l + 8), lambda_int(k, l));
}

TEST(QuarterTurn, Examples) {
    const auto F = RadialFoliation::euclidean();
    EXPECT_EQ(quarter_turn(polar(0.0, 0.3), polar(0.0, 0.6), F), QuarterTurn(0));
    EXPECT_EQ(quarter_turn(polar(0.0, 0.5), polar(0.7, 0.5), F), QuarterTurn(1));
    EXPECT_EQ(quarter_turn(polar(0.0, 0.6), polar(0.0, 0.3), F), QuarterTurn(2));
    EXPECT_EQ(quarter_turn(polar(0.0, 0.5), polar(-0.7, 0.5), F), QuarterTurn(3));
    // A deck copy is always strictly to one side.
    EXPECT_EQ(quarter_turn(polar(0.0, 0.5), deck(polar(0.0, 0.5)), F), QuarterTurn(1));
    EXPECT_EQ(quarter_turn(polar(0.0, 0.5), deck(polar(0.0, 0.5), -1), F), QuarterTurn(3));
    EXPECT_THROW(quarter_turn(polar(1.0, 0.5), polar(1.0, 0.5), F), Error);
}

TEST(QuarterTurn, SwapAddsTwo) {
    std::mt19937_64 rng(1);
    const RadialFoliation G(ConjugacyMap::named("elliptic"));
    for (int i = 0; i < 500; ++i) {
        const auto z = lift(DiskPoint(random_disk_point(rng)), std::nullopt);
        const auto zp = deck(lift(DiskPoint(random_disk_point(rng)), std::nullopt), static_cast<long long>(i % 3) - 1);
        for (const auto* F : {&G}) {
            EXPECT_EQ(quarter_turn(zp, z, *F), quarter_turn(z, zp, *F) + QuarterTurn(2));
        }
        EXPECT_EQ(quarter_turn(zp, z, RadialFoliation::euclidean()),
                  quarter_turn(z, zp, RadialFoliation::euclidean()) + QuarterTurn(2));
    }
}

TEST(QuarterTurn, EquivariantUnderChartPush) {
    std::mt19937_64 rng(2);
    for (const char* name : {"vortex-pair", "tripole"}) {
        const auto g = ConjugacyMap::named(name);
        const RadialFoliation gF(g);
        for (int i = 0; i < 200; ++i) {
            const auto z = lift(DiskPoint(random_disk_point(rng)), std::nullopt);
            const auto zp = deck(lift(DiskPoint(random_disk_point(rng)), std::nullopt), (i % 5) - 2);
            EXPECT_EQ(quarter_turn(push_lift(g, z), push_lift(g, zp), gF),
                      quarter_turn(z, zp, RadialFoliation::euclidean()))
                << name << " " << i;
        }
    }
}

TEST(RadialFoliation, LeavesAreRaysAndDeckShiftsLift) {
    const RadialFoliation F(ConjugacyMap::named("vortex-pair"));
    for (double psi : {0.0, 1.0, 2.0, 4.0, 6.0}) {
        EXPECT_LT(F.leaf_point(psi, 1e-3).norm(), 2e-3);
        EXPECT_GT(F.leaf_point(psi, 1.0 - 1e-3).norm(), 1.0 - 2e-3);
        const Vec2 p = F.leaf_point(psi, 0.5);
        EXPECT_NEAR(F.along(p), 0.5, 1e-12);
        EXPECT_NEAR(wrap_angle(F.leaf_angle(p) - psi), 0.0, 1e-12);
    }
    const auto z = lift(DiskPoint(0.4, 2.0), std::nullopt);
    EXPECT_NEAR(F.leaf_lift(deck(z)) - F.leaf_lift(z), kTwoPi, 1e-12);
    EXPECT_NEAR(F.leaf_lift(deck(z, -3)) - F.leaf_lift(z), -3 * kTwoPi, 1e-12);
}

TEST(Tau, RigidPairsNeverTurn) {
    const auto iso = make_rigid_rotation(0.2);
    const auto F = RadialFoliation::euclidean();
    EXPECT_EQ(tau(polar(0.5, 0.2), polar(0.5, 0.7), iso, F), 0);
    const auto s = annulus_sums(Vec2(0.2, 0.0), Vec2(0.7, 0.0), iso, F);
    EXPECT_EQ(s.tau_bar, 0);
    EXPECT_EQ(s.tau_sum, 0);
    EXPECT_EQ(s.lambda_sum, HalfInt());
    EXPECT_EQ(s.events, 0);
}

TEST(Tau, FarDeckCopiesAreLocked) {
    const auto iso = make_radial_twist(0.3, 2.0);
    const auto F = RadialFoliation::euclidean();
    const auto z = polar(0.3, 0.2);
    const auto zp = polar(1.1, 0.8);
    for (long long k : {-9LL, -6LL, 6LL, 9LL}) EXPECT_EQ(tau(z, deck(zp, k), iso, F), 0) << k;
}

TEST(Tau, TelescopesOverConcatenation) {
    std::mt19937_64 rng(3);
    const auto F = RadialFoliation::euclidean();
    for (const auto& iso : families()) {
        for (int i = 0; i < 20; ++i) {
            const auto z = lift(DiskPoint(random_disk_point(rng)), std::nullopt);
            const auto zp = deck(lift(DiskPoint(random_disk_point(rng)), std::nullopt), (i % 3) - 1);
            const long long two = tau(z, zp, iso, F, 2);
            EXPECT_EQ(two, tau(z, zp, iso, F, 1) + tau(push(z, iso), push(zp, iso), iso, F, 1));
        }
    }
}

TEST(AnnulusSums, LambdaBoundedByTauBar) {
    std::mt19937_64 rng(4);
    const auto F = RadialFoliation::euclidean();
    for (const auto& iso : families()) {
        for (int i = 0; i < 60; ++i) {
            const Vec2 z = random_disk_point(rng);
            const Vec2 zp = random_disk_point(rng);
            const auto s = annulus_sums(z, zp, iso, F, 1 + i % 4);
            EXPECT_LE(abs(s.lambda_sum).value(), static_cast<double>(s.tau_bar));
            EXPECT_LE(std::llabs(s.tau_sum), s.tau_bar);
        }
    }
}

TEST(AnnulusSums, MatchesPerCopyTau) {
    const auto iso = make_radial_twist(0.3, 2.0);
    const auto F = RadialFoliation::euclidean();
    const Vec2 z(0.2, 0.1);
    const Vec2 zp(-0.3, 0.6);
    const auto s = annulus_sums(z, zp, iso, F);
    ASSERT_FALSE(s.copies.empty());
    const auto lz = lift(DiskPoint(z), std::nullopt);
    const auto lzp = lift(DiskPoint(zp), std::nullopt);
    long long sum = 0;
    for (long long k = -8; k <= 8; ++k) {
        const long long t = tau(lz, deck(lzp, k), iso, F);
        EXPECT_EQ(t, s.tau_of_copy(static_cast<int>(k))) << k;
        sum += t;
    }
    EXPECT_EQ(sum, s.tau_sum);
}

TEST(AnnulusSums, TailNotCertifiedBeyondKMax) {
    TrackerOptions opt;
    opt.k_max = 0;
    try {
        annulus_sums(Vec2(0.05, 0.0), Vec2(0.0, 0.9), make_radial_twist(0.0, 3.0), RadialFoliation::euclidean(), 1, opt);
        FAIL() << "expected TailNotCertified";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TailNotCertified);
    }
}

TEST(AnnulusSums, RefinementCapRaises) {
    TrackerOptions opt;
    opt.steps_per_unit = 1;
    opt.max_depth = 0;
    // 0.3 turns in one step cannot be unwrapped without bisection.
    try {
        annulus_sums(Vec2(0.05, 0.0), Vec2(0.0, 0.9), make_radial_twist(0.0, 0.3), RadialFoliation::euclidean(), 1,
                     opt);
        FAIL() << "expected RefinementExhausted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RefinementExhausted);
    }
}

TEST(Displacement, RigidSectorArithmetic) {
    const double alpha = 0.3;
    const auto iso = make_rigid_rotation(alpha);
    const auto F = RadialFoliation::euclidean();
    for (int i = 0; i < 100; ++i) {
        const double theta = kTwoPi * (i + 0.5) / 100.0;
        const Vec2 z(0.5 * std::cos(theta), 0.5 * std::sin(theta));
        EXPECT_EQ(displacement(z, iso, F), theta < kTwoPi * (1.0 - alpha) ? 0 : 1) << theta;
    }
    EXPECT_THROW(displacement(Vec2(0.0, 0.0), iso, F), Error);
}

TEST(Displacement, DeckShiftedLift) {
    std::mt19937_64 rng(5);
    const auto F = RadialFoliation::euclidean();
    const auto g = ConjugacyMap::named("tripole");
    for (int i = 0; i < 50; ++i) {
        const Vec2 z = random_disk_point(rng);
        const long long m = displacement(z, make_conjugated_rotation(kGolden, g), F, 0.5);
        EXPECT_EQ(displacement(z, make_conjugated_rotation(kGolden + 2.0, g), F, 0.5), m + 2);
        EXPECT_EQ(displacement(z, make_conjugated_rotation(kGolden - 1.0, g), F, 0.5), m - 1);
    }
}

TEST(Birkhoff, IdentitiesHoldExactly) {
    std::mt19937_64 rng(6);
    const auto F = RadialFoliation::euclidean();
    for (const auto& iso : families()) {
        const Vec2 z = random_disk_point(rng, 0.2);
        const Vec2 zp = random_disk_point(rng, 0.2);
        for (int n : {1, 2, 5, 16, 32}) {
            long long m_sum = 0;
            HalfInt l_sum;
            HalfInt L_sum;
            Vec2 a = z;
            Vec2 b = zp;
            for (int i = 0; i < n; ++i) {
                m_sum += displacement(a, iso, F, 0.0);
                l_sum += lambda_f(a, b, iso, F);
                L_sum += big_lambda(a, b, iso, F, 0.0);
                a = iso.map(a);
                b = iso.map(b);
            }
            EXPECT_EQ(m_sum, displacement(z, iso, F, 0.0, n)) << to_string(iso.tag()) << " n=" << n;
            EXPECT_EQ(l_sum, lambda_f(z, zp, iso, F, n)) << to_string(iso.tag()) << " n=" << n;
            EXPECT_EQ(L_sum, big_lambda(z, zp, iso, F, 0.0, n)) << to_string(iso.tag()) << " n=" << n;
        }
    }
}

TEST(WindingBridge, DisplacementAndBigLambdaBounds) {
    std::mt19937_64 rng(7);
    const auto F = RadialFoliation::euclidean();
    for (const auto& iso : families()) {
        for (int i = 0; i < 30; ++i) {
            const Vec2 z = random_disk_point(rng);
            const Vec2 zp = random_disk_point(rng);
            for (int n : {1, 2, 8, 32}) {
                const double W0 = winding_iterate(iso, Vec2(0.0, 0.0), z, n);
                const double W = winding_iterate(iso, z, zp, n);
                EXPECT_LE(std::abs(static_cast<double>(displacement(z, iso, F, 0.0, n)) - W0), 1.0);
                EXPECT_LE(std::abs(big_lambda(z, zp, iso, F, 0.0, n).value() - W), 2.0);
            }
        }
    }
}

TEST(WindingBridge, RigidSameRayPairHasZeroLambda) {
    const auto iso = make_rigid_rotation(0.1);
    const auto F = RadialFoliation::euclidean();
    const Vec2 z(0.3 * std::cos(0.1), 0.3 * std::sin(0.1));
    const Vec2 zp(0.8 * std::cos(0.1), 0.8 * std::sin(0.1));
    EXPECT_EQ(lambda_f(z, zp, iso, F), HalfInt());
    EXPECT_EQ(big_lambda(z, zp, iso, F), HalfInt::integer(displacement(z, iso, F)));
}

TEST(RotationNumber, RigidAndConjugated) {
    const auto rigid = rotation_number(Vec2(0.5, 0.1), make_rigid_rotation(kGolden), 2048,
                                       RadialFoliation::euclidean());
    EXPECT_NEAR(rigid.report.last(), kGolden, 2e-3);
    EXPECT_NEAR(rigid.second_ray.last(), kGolden, 2e-3);

    const auto iso = make_conjugated_rotation(kGolden, ConjugacyMap::named("vortex-pair"));
    const auto probe = rotation_number(Vec2(0.3, -0.4), iso, 4096, RadialFoliation::euclidean(), 1e-3, 0.0, 1.0,
                                       RadialFoliation(ConjugacyMap::named("tripole")));
    EXPECT_NEAR(probe.report.last(), kGolden, 0.02);
    EXPECT_NEAR(probe.second_ray.last(), kGolden, 0.02);
    ASSERT_TRUE(probe.pushed_foliation.has_value());
    EXPECT_NEAR(probe.pushed_foliation->last(), kGolden, 0.02);
}

TEST(RotationNumber, Errors) {
    const auto F = RadialFoliation::euclidean();
    try {
        rotation_number(Vec2(0.0, 0.0), make_rigid_rotation(kGolden), 16, F);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroPoint);
    }
    try {
        rotation_number(Vec2(1e-4, 0.0), make_rigid_rotation(kGolden), 16, F);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OrbitEscapesCompact);
    }
}

TEST(WindingDistance, RigidFamilyIsZero) {
    std::mt19937_64 rng(8);
    std::vector<std::pair<Vec2, Vec2>> pairs;
    for (int i = 0; i < 50; ++i) pairs.emplace_back(random_disk_point(rng), random_disk_point(rng));
    EXPECT_EQ(winding_distance_probe(RadialFoliation::euclidean(), make_rigid_rotation(0.2), pairs), 0);
    EXPECT_EQ(winding_distance_probe(RadialFoliation::euclidean(), make_rigid_rotation(kGolden), pairs, 5), 0);
    EXPECT_GT(winding_distance_probe(RadialFoliation::euclidean(), make_radial_twist(0.2, 2.0), pairs), 0);
}
