#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "bellreal/lhv.hpp"
#include "support.hpp"

using namespace bellreal;
using namespace bellreal::lhv;
using namespace bellreal::literals;

namespace {

// Everything to the + channel, always detected.
struct AlwaysPlus {
  using hidden_state = double;
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(); }
  ChannelResponse respond_arm1(double, Angle) const { return {1, 0}; }
  ChannelResponse respond_arm2(double, Angle) const { return {1, 0}; }
};

// Detects only away from the reference: q+(a) = 1 but nothing at r = 0°.
struct Adversarial {
  using hidden_state = double;
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(); }
  static ChannelResponse respond(Angle s) { return s.deg() == 0.0 ? ChannelResponse{0, 0} : ChannelResponse{1, 0}; }
  ChannelResponse respond_arm1(double, Angle s) const { return respond(s); }
  ChannelResponse respond_arm2(double, Angle s) const { return respond(s); }
};

// Channel sum shrinks with the setting but never exceeds the reference sum.
struct SettingDependentTotal {
  using hidden_state = double;
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(); }
  static ChannelResponse respond(Angle s) {
    const double t = 0.5 + 0.5 * std::abs(cos_deg(s.deg()));
    return {t / 2, t / 2};
  }
  ChannelResponse respond_arm1(double, Angle s) const { return respond(s); }
  ChannelResponse respond_arm2(double, Angle s) const { return respond(s); }
};

struct Opaque {
  int code;
};

struct OpaqueModel {
  using hidden_state = Opaque;
  hidden_state sample_hidden(Rng& rng) const { return {static_cast<int>(rng.bits() % 7)}; }
  ChannelResponse respond_arm1(const Opaque&, Angle) const { return {0.5, 0.5}; }
  ChannelResponse respond_arm2(const Opaque&, Angle) const { return {0.5, 0.5}; }
};

// Breaks the response contract for λ above 0.75.
struct Broken {
  using hidden_state = double;
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(); }
  ChannelResponse respond_arm1(double l, Angle) const { return l > 0.75 ? ChannelResponse{0.8, 0.8} : ChannelResponse{0.5, 0.5}; }
  ChannelResponse respond_arm2(double, Angle) const { return {0.5, 0.5}; }
};

static_assert(LocalModel<AlwaysPlus>);
static_assert(LocalModel<OpaqueModel>);
static_assert(!UniformScalarModel<OpaqueModel>);
static_assert(UniformScalarModel<MalusProductModel>);

// 1σ of a cell frequency.
double binomial_sigma(double p, double n) { return std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST(Builtins, ValidateScaleAndNames) {
  EXPECT_THROW(NoiseModel(0), DomainError);
  EXPECT_THROW(MalusProductModel(1.5), DomainError);
  EXPECT_THROW(make_builtin("nope", 1), DomainError);
  for (auto name : kBuiltinModelNames) EXPECT_EQ(model_name(make_builtin(name, 0.5)), name);
}

TEST(Estimate, NoiseJointsMatchQuarterSquare) {
  const double d = 0.1, n = 1e6;
  const auto e = estimate(NoiseModel(d), 10_deg, 70_deg, 1000000, 3);
  const double p = d * d / 4;
  for (double cell : {e.joint.pp(), e.joint.pm(), e.joint.mp(), e.joint.mm()}) {
    EXPECT_NEAR(cell, p, 3 * binomial_sigma(p, n));
  }
  EXPECT_TRUE(e.ledger.closed());
  EXPECT_EQ(e.ledger.n_total, 1000000u);
}

TEST(Estimate, AlwaysPlusFillsOneCell) {
  const auto e = estimate(AlwaysPlus{}, 0_deg, 0_deg, 5000, 1);
  EXPECT_EQ(e.ledger.n_pp, 5000u);
  EXPECT_EQ(e.ledger.n_total, 5000u);
}

TEST(Estimate, ThresholdAlignedSendsBothPhotonsTogether) {
  const double n = 1e6;
  const auto e = estimate(ThresholdModel(1.0), 20_deg, 20_deg, 1000000, 4);
  EXPECT_EQ(e.joint.pm(), 0.0);
  EXPECT_EQ(e.joint.mp(), 0.0);
  EXPECT_NEAR(e.joint.pp(), 0.5, 3 * binomial_sigma(0.5, n));
}

TEST(Estimate, ReproducibleAndThreadIndependent) {
  const auto m = make_builtin("malus-product", 0.7);
  const auto a = estimate(m, 15_deg, 40_deg, 200000, 99, 1);
  const auto b = estimate(m, 15_deg, 40_deg, 200000, 99, 1);
  const auto c = estimate(m, 15_deg, 40_deg, 200000, 99, 4);
  EXPECT_EQ(a.ledger, b.ledger);
  EXPECT_EQ(a.ledger, c.ledger);
  EXPECT_NE(a.ledger, estimate(m, 15_deg, 40_deg, 200000, 100, 1).ledger);
}

TEST(Estimate, LedgerClosesProperty) {
  prop::Gen g(41);
  for (int i = 0; i < 100; ++i) {
    const auto m = make_builtin(kBuiltinModelNames[i % 3], g.real(0.05, 1));
    const auto n = 1 + g.bits() % 20000;
    const auto e = estimate(m, g.angle(), g.angle(), n, g.bits());
    EXPECT_TRUE(e.ledger.closed());
    EXPECT_EQ(e.ledger.n_total, n);
    EXPECT_LE(e.joint.total(), 1.0);
  }
}

TEST(Estimate, ContractViolationNamesHiddenState) {
  try {
    estimate(Broken{}, 0_deg, 0_deg, 1000, 1);
    FAIL() << "expected ModelContractError";
  } catch (const ModelContractError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("lambda = 0."), std::string::npos) << what;
    EXPECT_NE(what.find("arm 1"), std::string::npos) << what;
  }
}

TEST(Integrate, Examples) {
  const double d = 0.3;
  const auto noise = integrate(NoiseModel(d), 0_deg, 33_deg);
  EXPECT_DOUBLE_EQ(noise.pp(), d * d / 4);
  EXPECT_DOUBLE_EQ(noise.mm(), d * d / 4);
  const auto malus = integrate(MalusProductModel(d), 12_deg, 12_deg);
  EXPECT_NEAR(malus.pp(), 3.0 / 8.0 * d * d, 1e-14);
  EXPECT_NEAR(malus.mm(), 3.0 / 8.0 * d * d, 1e-14);
  EXPECT_NEAR(expectation(integrate(MalusProductModel(1), 0_deg, 30_deg)), 0.25, 1e-14);
  EXPECT_NEAR(expectation(integrate(ThresholdModel(1), 0_deg, 30_deg)), 1.0 - 30.0 / 45.0, 1e-3);
  EXPECT_THROW(integrate(OpaqueModel{}, 0_deg, 0_deg), CapabilityError);
  EXPECT_THROW(integrate_singles(OpaqueModel{}, Arm::One, 0_deg), CapabilityError);
  const auto s = integrate_singles(MalusProductModel(d), Arm::Two, 40_deg);
  EXPECT_NEAR(s.p_plus(), d / 2, 1e-14);
}

TEST(Integrate, AgreesWithLargeMonteCarlo) {
  const double n = 1e7;
  for (const auto& m : {make_builtin("noise", 0.4), make_builtin("malus-product", 0.9), make_builtin("threshold", 1.0)}) {
    const auto exact = integrate(m, 10_deg, 35_deg, 1u << 16);
    const auto mc = estimate(m, 10_deg, 35_deg, 10000000, 17);
    const double cells_e[] = {exact.pp(), exact.pm(), exact.mp(), exact.mm()};
    const double cells_m[] = {mc.joint.pp(), mc.joint.pm(), mc.joint.mp(), mc.joint.mm()};
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(cells_m[k], cells_e[k], 4 * binomial_sigma(cells_e[k], n) + 1e-12) << model_name(m) << k;
    }
  }
}

TEST(Assumptions, BuiltinsPassBothChecks) {
  const std::vector<Angle> s{30_deg, 60_deg, 0_deg, 0_deg, 45_deg};
  for (auto name : kBuiltinModelNames) {
    const auto m = make_builtin(name, 0.6);
    const auto sup = check_supplementary(m, s, 0_deg, 10000, 1);
    const auto gr = check_gr(m, s, 17_deg, 10000, 2);
    EXPECT_TRUE(sup.passed) << name;
    EXPECT_TRUE(gr.passed) << name;
    EXPECT_EQ(sup.lambdas_checked, 10000u);
    EXPECT_FALSE(sup.witness.has_value());
  }
}

TEST(Assumptions, AdversarialModelFailsWithWitness) {
  const auto r = check_supplementary(Adversarial{}, {30_deg}, 0_deg, 100, 1);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->channel, '+');
  EXPECT_EQ(r.witness->probability, 1.0);
  EXPECT_EQ(r.witness->reference_sum, 0.0);
  EXPECT_EQ(r.witness->setting.deg(), 30.0);
  EXPECT_EQ(r.lambdas_checked, 1u);
}

TEST(Assumptions, SettingDependentTotalFailsGrOnly) {
  const std::vector<Angle> s{30_deg, 60_deg};
  EXPECT_FALSE(check_gr(SettingDependentTotal{}, s, 0_deg, 100, 1).passed);
  EXPECT_TRUE(check_supplementary(SettingDependentTotal{}, s, 0_deg, 100, 1).passed);
}

TEST(Assumptions, GrImpliesSupplementaryProperty) {
  prop::Gen g(42);
  for (int i = 0; i < 300; ++i) {
    const auto m = make_builtin(kBuiltinModelNames[i % 3], g.real(0.05, 1));
    const std::vector<Angle> s{g.angle(), g.angle(), g.angle()};
    const Angle r = g.angle();
    const auto seed = g.bits();
    if (check_gr(m, s, r, 50, seed).passed) {
      EXPECT_TRUE(check_supplementary(m, s, r, 50, seed).passed);
    }
  }
  EXPECT_THROW(check_gr(NoiseModel(1), {}, 0_deg, 10, 1), DomainError);
}

TEST(StrongExperiment, BuiltinsRespectTheLocalBound) {
  const auto s = SettingSet::maximal_violation();
  for (auto name : kBuiltinModelNames) {
    const auto run = strong_experiment(make_builtin(name, 1.0), s, 1000000, 7);
    EXPECT_LE(run.report.lhs, 1.0 + 3 * run.sigma) << name;
    EXPECT_GT(run.sigma, 0.0);
    EXPECT_EQ(run.runs.size(), 7u);
  }
}

TEST(StrongExperiment, AnalyticValuesWithinStatistics) {
  const auto s = SettingSet::maximal_violation();
  const auto malus = strong_experiment(make_builtin("malus-product", 0.5), s, 1000000, 11);
  EXPECT_NEAR(malus.report.lhs, 0.25, 4 * malus.sigma);
  const auto noise = strong_experiment(make_builtin("noise", 0.5), s, 1000000, 12);
  EXPECT_NEAR(noise.report.lhs, -1.0, 4 * noise.sigma);
}

TEST(StrongExperiment, SigmaMatchesSeedToSeedSpread) {
  const auto s = SettingSet::maximal_violation();
  const auto m = make_builtin("malus-product", 0.8);
  constexpr int kRuns = 40;
  double sum = 0, sum2 = 0, sigma = 0;
  for (int i = 0; i < kRuns; ++i) {
    const auto r = strong_experiment(m, s, 20000, 1000 + i);
    sum += r.report.lhs;
    sum2 += r.report.lhs * r.report.lhs;
    sigma += r.sigma / kRuns;
  }
  const double spread = std::sqrt((sum2 - sum * sum / kRuns) / (kRuns - 1));
  EXPECT_GT(spread / sigma, 0.6);
  EXPECT_LT(spread / sigma, 1.5);
}
