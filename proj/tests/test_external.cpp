#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "swarm3d/external.hpp"

using namespace swarm3d;

TEST(Potential, SmoothExamples) {
    EXPECT_EQ(potential_gradient(PotentialKind::smooth, {1, 2, 3}, {1, 2, 3}).value, (Vec3{}));
    const Vec3 g = potential_gradient(PotentialKind::smooth, {std::sqrt(3.0), 0, 0}, {}).value;
    EXPECT_NEAR(g.x, std::sqrt(3.0) / 8, 1e-15);
    EXPECT_EQ(g.y, 0.0);
    EXPECT_NEAR(norm(potential_gradient(PotentialKind::smooth, {1e8, 0, 0}, {}).value), 0.25, 1e-12);
    EXPECT_DOUBLE_EQ(potential(PotentialKind::smooth, {}, {}), 0.25);
}

TEST(Potential, GradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(41);
    const double h = 1e-6;
    for (auto kind : {PotentialKind::smooth, PotentialKind::distance, PotentialKind::none}) {
        for (int n = 0; n < 1000; ++n) {
            const Vec3 x = oracle::random_vec(rng, 10), t = oracle::random_vec(rng, 10);
            const Vec3 g = potential_gradient(kind, x, t).value;
            const Vec3 fd{
                (potential(kind, x + Vec3{h, 0, 0}, t) - potential(kind, x - Vec3{h, 0, 0}, t)) / (2 * h),
                (potential(kind, x + Vec3{0, h, 0}, t) - potential(kind, x - Vec3{0, h, 0}, t)) / (2 * h),
                (potential(kind, x + Vec3{0, 0, h}, t) - potential(kind, x - Vec3{0, 0, h}, t)) / (2 * h)};
            EXPECT_NEAR(g.x, fd.x, 1e-6);
            EXPECT_NEAR(g.y, fd.y, 1e-6);
            EXPECT_NEAR(g.z, fd.z, 1e-6);
            if (kind == PotentialKind::smooth) {
                EXPECT_LT(norm(g), 0.25);
            }
        }
    }
}

TEST(Potential, DistanceKinkIsFlagged) {
    const auto g = potential_gradient(PotentialKind::distance, {1, 1, 1}, {1, 1, 1});
    EXPECT_TRUE(g.degenerate);
    EXPECT_EQ(g.value, (Vec3{}));
}

TEST(Potential, KindNames) {
    for (auto k : {PotentialKind::none, PotentialKind::smooth, PotentialKind::distance}) {
        EXPECT_EQ(parse_potential_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_potential_kind("harmonic"));
}

TEST(ExternalForce, Examples) {
    const DampingNoise d{0.25, 0.0};
    EXPECT_EQ(external_force(PotentialKind::smooth, d, {}, {}, {}), (Vec3{}));
    const Vec3 f = external_force(PotentialKind::smooth, d, {}, {2, 0, 0}, {});
    EXPECT_DOUBLE_EQ(f.x, -0.5);
    EXPECT_EQ(f.y, 0.0);
    EXPECT_EQ(external_force(PotentialKind::none, {0.0, 0.0}, {3, 4, 5}, {1, 2, 3}, {}), (Vec3{}));
}

TEST(ExternalForce, AffineInVelocity) {
    std::mt19937_64 rng(42);
    const DampingNoise d{0.37, 0.0};
    for (int n = 0; n < 100; ++n) {
        const Vec3 x = oracle::random_vec(rng, 5), t = oracle::random_vec(rng, 5);
        const Vec3 v1 = oracle::random_vec(rng, 2), v2 = oracle::random_vec(rng, 2);
        const Vec3 diff = external_force(PotentialKind::smooth, d, x, v1, t) -
                          external_force(PotentialKind::smooth, d, x, v2, t);
        const Vec3 expected = -0.37 * (v1 - v2);
        EXPECT_NEAR(diff.x, expected.x, 1e-14);
        EXPECT_NEAR(diff.y, expected.y, 1e-14);
        EXPECT_NEAR(diff.z, expected.z, 1e-14);
    }
}
