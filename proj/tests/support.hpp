/**
 * support.hpp — hand-rolled generators for the property tests.
 *
 * Every property draws from a fixed seed so failures reproduce; the case
 * count is modest because each case is cheap and deterministic.
 */

#pragma once

#include <array>
#include <cstdint>

#include "bellreal/bellreal.hpp"

namespace bellreal::prop {

inline constexpr int kPropertyCases = 2000;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double unit() { return rng_.uniform(); }
  double real(double lo, double hi) { return rng_.uniform(lo, hi); }
  Angle angle(double lo = -180.0, double hi = 180.0) { return Angle::degrees(real(lo, hi)); }

  /// Four non-negative cells whose total is `total`.
  JointProbabilities joint_with_total(double total) {
    std::array<double, 4> w{};
    double s = 0.0;
    for (auto& x : w) s += (x = unit() + 1e-3);
    return JointProbabilities(total * w[0] / s, total * w[1] / s, total * w[2] / s, total * w[3] / s);
  }

  JointProbabilities normalized_joint() { return joint_with_total(1.0); }

  /// Sub-normalized cells, total in (0, 1].
  JointProbabilities joint() { return joint_with_total(real(1e-3, 1.0)); }

  /// A single-arm response pair q+ + q- <= 1.
  std::pair<double, double> response() {
    const double total = unit();
    const double split = unit();
    return {total * split, total * (1.0 - split)};
  }

  ArmOptics optics() {
    const double t_par = real(0.6, 1.0), r_par = real(0.6, 1.0);
    return ArmOptics(t_par, real(0.0, 0.1), r_par, real(0.0, 0.1));
  }

  std::uint64_t bits() { return rng_.bits(); }

 private:
  Rng rng_;
};

}  // namespace bellreal::prop
