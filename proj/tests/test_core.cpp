#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bellreal/core.hpp"
#include "bellreal/random.hpp"
#include "support.hpp"

using namespace bellreal;
using namespace bellreal::literals;

TEST(CosDeg, ExactAtSpecialAngles) {
  EXPECT_EQ(cos_deg(0), 1.0);
  EXPECT_EQ(cos_deg(60), 0.5);
  EXPECT_EQ(cos_deg(90), 0.0);
  EXPECT_EQ(cos_deg(120), -0.5);
  EXPECT_EQ(cos_deg(180), -1.0);
  EXPECT_EQ(cos_deg(-60), 0.5);
  EXPECT_EQ(cos_deg(420), 0.5);
  EXPECT_EQ(cos_deg(30), std::sqrt(3.0) / 2.0);
  EXPECT_EQ(cos_deg(45), std::sqrt(2.0) / 2.0);
  EXPECT_EQ(sin_deg(30), 0.5);
  EXPECT_EQ(sin_deg(90), 1.0);
}

TEST(CosDeg, MatchesLibmElsewhere) {
  prop::Gen g(11);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    const double x = g.real(-720, 720);
    EXPECT_NEAR(cos_deg(x), std::cos(x * std::numbers::pi / 180.0), 1e-14) << x;
    EXPECT_NEAR(sin_deg(x), std::sin(x * std::numbers::pi / 180.0), 1e-14) << x;
  }
}

TEST(AngleType, ConversionsAndArithmetic) {
  EXPECT_DOUBLE_EQ(Angle::radians(std::numbers::pi).deg(), 180.0);
  EXPECT_DOUBLE_EQ((30_deg).rad(), std::numbers::pi / 6);
  EXPECT_EQ((30_deg + 15_deg).deg(), 45.0);
  EXPECT_EQ((-30_deg).normalized().deg(), 330.0);
  EXPECT_EQ((720_deg).normalized().deg(), 0.0);
  EXPECT_EQ(separation(10_deg, 70_deg).deg(), 60.0);
  EXPECT_LT(10_deg, 20_deg);
}

TEST(ArmOpticsType, ValidatesTransmittances) {
  EXPECT_NO_THROW(ArmOptics(1, 0, 1, 0));
  EXPECT_THROW(ArmOptics(1.1, 0, 1, 0), DomainError);
  EXPECT_THROW(ArmOptics(1, -0.1, 1, 0), DomainError);
  EXPECT_THROW(ArmOptics(1, 0, std::nan(""), 0), DomainError);
  const auto o = ArmOptics(0.9, 0.1, 0.8, 0.05);
  EXPECT_DOUBLE_EQ(o.t_plus(), 1.0);
  EXPECT_DOUBLE_EQ(o.t_minus(), 0.8);
  EXPECT_DOUBLE_EQ(o.r_plus(), 0.85);
  EXPECT_DOUBLE_EQ(o.r_minus(), 0.75);
}

TEST(ApparatusType, ValidatesEtaAndPhi) {
  EXPECT_NO_THROW(Apparatus::symmetric(1.0, 180_deg));
  EXPECT_THROW(Apparatus::symmetric(0.0, 30_deg), DomainError);
  EXPECT_THROW(Apparatus::symmetric(1.01, 30_deg), DomainError);
  EXPECT_THROW(Apparatus::symmetric(0.5, 0_deg), DomainError);
  EXPECT_THROW(Apparatus::symmetric(0.5, 181_deg), DomainError);
}

TEST(JointProbabilitiesType, RejectsInvalidCells) {
  EXPECT_THROW(JointProbabilities(-0.1, 0, 0, 0), DomainError);
  EXPECT_THROW(JointProbabilities(0.6, 0.6, 0, 0), DomainError);
  EXPECT_NO_THROW(JointProbabilities(0.5, 0, 0, 0.5 + 5e-13));
  EXPECT_THROW(SinglesProbabilities(0.7, 0.4), DomainError);
}

TEST(Expectation, Examples) {
  EXPECT_EQ(expectation(JointProbabilities(0.5, 0, 0, 0.5)), 1.0);
  EXPECT_EQ(expectation(JointProbabilities(0.25, 0.25, 0.25, 0.25)), 0.0);
  const double c = std::cos(std::numbers::pi / 6), s = std::sin(std::numbers::pi / 6);
  EXPECT_NEAR(expectation(JointProbabilities(c * c / 2, s * s / 2, s * s / 2, c * c / 2)), 0.5, 1e-15);
}

TEST(Expectation, SwapInvarianceProperty) {
  prop::Gen g(1);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    const auto j = g.joint();
    const JointProbabilities swapped(j.mm(), j.mp(), j.pm(), j.pp());
    EXPECT_NEAR(expectation(j), expectation(swapped), 1e-15);
    EXPECT_LE(std::abs(expectation(j)), j.total() + 1e-15);
  }
}

TEST(Reports, FactorAndNames) {
  const auto r = make_report(InequalityKind::Chsh, 3.0, 2.0);
  EXPECT_DOUBLE_EQ(r.violation_factor, 1.5);
  EXPECT_TRUE(r.violated());
  const auto ch = make_report(InequalityKind::Ch, -0.25, 0.0);
  EXPECT_DOUBLE_EQ(ch.violation_factor, -0.25);
  EXPECT_FALSE(ch.violated());
  for (auto k : kAllInequalities) EXPECT_EQ(parse_inequality(to_string(k)), k);
  EXPECT_FALSE(parse_inequality("nope").has_value());
}

TEST(Reports, FactorAboveOneIffViolatedProperty) {
  prop::Gen g(2);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    const double lhs = g.real(-3, 3);
    const auto r = make_report(InequalityKind::Bell1965, lhs, 1.0);
    EXPECT_EQ(r.violation_factor > 1.0, r.violated());
  }
}

TEST(Random, SeedDerivationIsStable) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Random, ShardedResultsIgnoreThreadCount) {
  auto job = [](std::uint64_t shard, std::uint64_t begin, std::uint64_t end) {
    Rng rng(derive_seed(9, shard));
    double s = 0;
    for (auto i = begin; i < end; ++i) s += rng.uniform();
    return s;
  };
  const auto one = run_sharded(10007, 100, 1, job);
  const auto four = run_sharded(10007, 100, 4, job);
  EXPECT_EQ(one.size(), 101u);
  EXPECT_EQ(one, four);
}

TEST(Random, ShardedRethrowsLowestShardError) {
  auto job = [](std::uint64_t shard, std::uint64_t, std::uint64_t) -> int {
    if (shard == 3) throw std::runtime_error("three");
    if (shard == 7) throw std::runtime_error("seven");
    return 0;
  };
  for (unsigned threads : {1u, 4u}) {
    try {
      run_sharded(1000, 100, threads, job);
      FAIL() << "expected a throw";
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "three");
    }
  }
}
