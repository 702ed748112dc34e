#include <gtest/gtest.h>

#include <cmath>

#include "bellreal/theorem.hpp"
#include "support.hpp"

using namespace bellreal;
using namespace bellreal::theorem;

namespace {

ZInputs random_box_point(prop::Gen& g, double u, double v) {
  return {g.real(0, u), g.real(0, u), g.real(0, u), g.real(0, u), g.real(0, v), g.real(0, v),
          g.real(0, v), g.real(0, v), u, v};
}

double& variable(ZInputs& p, int i) {
  double* vars[] = {&p.x1p, &p.x1m, &p.x2p, &p.x2m, &p.y1p, &p.y1m, &p.y2p, &p.y2m};
  return *vars[i];
}

// Per-λ left side with arm-1 settings a, a' and arm-2 settings b, b'.
struct Responses {
  double ap, am, app, apm, bp, bm, bpp, bpm;
};

double per_lambda_lhs(const Responses& r) {
  return r.ap * r.bp + r.am * r.bm - r.ap * r.bm - r.am * r.bp + r.bpp * r.ap + r.bpm * r.am - r.bpp * r.am -
         r.bpm * r.ap - r.app * r.bp - r.apm * r.bm + r.app * r.bm + r.apm * r.bp + 2 * r.app * r.bpp +
         2 * r.apm * r.bpm - r.app - r.apm - r.bpp - r.bpm;
}

}  // namespace

TEST(ZValue, Examples) {
  EXPECT_EQ(z_value({}), -1.0);
  ZInputs a{};
  a.x1p = 1;
  a.y1p = 1;
  EXPECT_EQ(z_value(a), 0.0);
  ZInputs b{};
  b.x2p = 1;
  b.y2p = 1;
  EXPECT_EQ(z_value(b), -1.0);
}

TEST(ZValue, RejectsPointsOutsideTheBox) {
  ZInputs p{};
  p.x1p = 1.5;
  EXPECT_THROW(z_value(p), DomainError);
  ZInputs q{};
  q.y2m = -0.1;
  EXPECT_THROW(z_value(q), DomainError);
  ZInputs r{};
  r.u = 0;
  EXPECT_THROW(z_value(r), DomainError);
  EXPECT_THROW(verify_vertices(-1, 1), DomainError);
}

TEST(VerifyVertices, Examples) {
  const auto unit = verify_vertices(1, 1);
  EXPECT_EQ(unit.max_z, 0.0);
  EXPECT_EQ(z_value(unit.argmax), 0.0);
  EXPECT_EQ(verify_vertices(2, 3).max_z, 0.0);
  EXPECT_LE(std::abs(verify_vertices(1e-6, 1e-6).max_z), 1e-18);
  EXPECT_EQ(verify_vertices(1e3, 1).max_z, 0.0);
}

TEST(VerifyVertices, MaximumIsAttainedOnTwentyEightVertices) {
  int count = 0;
  for (unsigned mask = 0; mask < 256; ++mask) count += z_value(vertex(1, 1, mask)) == 0.0;
  EXPECT_EQ(count, 28);
  ZInputs x1y1{};
  x1y1.x1p = 1;
  x1y1.y1p = 1;
  bool found = false;
  for (unsigned mask = 0; mask < 256; ++mask) found |= vertex(1, 1, mask) == x1y1;
  EXPECT_TRUE(found);
}

TEST(VerifyRandom, StaysBelowVertexMaximum) {
  const auto r = verify_random(1, 1, 1000000, 42);
  EXPECT_LE(r.max_z, 1e-12);
  EXPECT_LT(r.max_z, 0.0);
  const auto s = verify_random(1, 1, 1000000, 43);
  EXPECT_LE(s.max_z, 1e-12);
  EXPECT_NE(r.max_z, s.max_z);
}

TEST(VerifyRandom, SingleSampleIsTheFirstDrawOfShardZero) {
  const auto r = verify_random(2, 3, 1, 5);
  Rng rng(derive_seed(5, 0));
  EXPECT_EQ(r.argmax, random_point(rng, 2, 3));
  EXPECT_EQ(r.max_z, z_value(r.argmax));
  EXPECT_THROW(verify_random(1, 1, 0, 5), DomainError);
}

TEST(VerifyRandom, ThreadCountDoesNotChangeTheResult) {
  const auto one = verify_random(1, 2, 300000, 8, 1);
  const auto four = verify_random(1, 2, 300000, 8, 4);
  EXPECT_EQ(one.max_z, four.max_z);
  EXPECT_EQ(one.argmax, four.argmax);
}

TEST(Properties, ZIsAffineInEachVariable) {
  prop::Gen g(31);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    const double u = g.real(0.1, 5), v = g.real(0.1, 5);
    ZInputs p = random_box_point(g, u, v);
    for (int k = 0; k < 8; ++k) {
      const double cap = k < 4 ? u : v;
      ZInputs lo = p, mid = p, hi = p;
      variable(lo, k) = 0;
      variable(mid, k) = cap / 2;
      variable(hi, k) = cap;
      EXPECT_NEAR(z_value(mid), 0.5 * (z_value(lo) + z_value(hi)), 1e-12 * (1 + u * v));
    }
  }
}

TEST(Properties, ZScalesWithEachSide) {
  prop::Gen g(32);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    const double u = g.real(0.1, 3), v = g.real(0.1, 3);
    const ZInputs p = random_box_point(g, u, v);
    for (double k : {0.5, 2.0, 10.0}) {
      ZInputs xs = p;
      xs.x1p *= k, xs.x1m *= k, xs.x2p *= k, xs.x2m *= k, xs.u *= k;
      EXPECT_NEAR(z_value(xs), k * z_value(p), 1e-12 * k * (1 + u * v));
      ZInputs ys = p;
      ys.y1p *= k, ys.y1m *= k, ys.y2p *= k, ys.y2m *= k, ys.v *= k;
      EXPECT_NEAR(z_value(ys), k * z_value(p), 1e-12 * k * (1 + u * v));
    }
  }
}

TEST(Properties, GlobalBoundOnRandomBoxes) {
  prop::Gen g(33);
  for (int i = 0; i < 200; ++i) {
    const double u = std::exp(g.real(-10, 7)), v = std::exp(g.real(-10, 7));
    const double tol = kTolerance * std::max(1.0, u) * std::max(1.0, v);
    const double vmax = verify_vertices(u, v).max_z;
    EXPECT_LE(vmax, tol);
    EXPECT_LE(verify_random(u, v, 2000, g.bits()).max_z, vmax + tol);
  }
}

TEST(Properties, ProbabilityInputsReproducePerLambdaLeftSide) {
  prop::Gen g(34);
  for (int i = 0; i < prop::kPropertyCases; ++i) {
    auto [ap, am] = g.response();
    auto [app, apm] = g.response();
    auto [bp, bm] = g.response();
    auto [bpp, bpm] = g.response();
    const Responses r{ap, am, app, apm, bp, bm, bpp, bpm};
    const ZInputs z{ap, am, app, apm, bp, bm, bpp, bpm, 1, 1};
    EXPECT_NEAR(z_value(z), per_lambda_lhs(r) - 1.0, 1e-14);
    EXPECT_LE(per_lambda_lhs(r), 1.0 + 1e-12);
  }
}
