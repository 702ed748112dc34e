/**
 * quantum.hpp — quantum-mechanical predictions for the J=1 → J=0 atomic
 * cascade viewed by two two-channel polarizers.
 *
 * Ideal branch (perfect polarizers and detectors, θ = |m - n|):
 *
 *   E(θ) = cos 2θ,  p++ = p-- = cos²θ / 2,  p+- = p-+ = sin²θ / 2,
 *   p±(single) = 1/2
 *
 * Real branch (detectors back to back, half-angle φ, efficiency η):
 *
 *   Ω       = 2π(1 - cos φ)
 *   g(π,φ)  = 1 + (1/8) cos²φ (1 + cos φ)²
 *   F(π,φ) ≈ 1 - (2/3)(1 - cos φ)²                    (small φ)
 *   c       = η² (Ω/8π)² g(π,φ)
 *
 *   p++ = c [T+¹T+² + T-¹T-² F cos 2(a-b)]
 *   p-- = c [R+¹R+² + R-¹R-² F cos 2(a-b)]
 *   p+- = c [T+¹R+² - T-¹R-² F cos 2(a-b)]
 *   p-+ = c [R+¹T+² - R-¹T-² F cos 2(a-b)]
 *   p±(single) = η Ω / 8π
 *
 * The single-arm rates do not depend on the prism transmittances; that is
 * the published form and it is kept as is.
 */

#pragma once

#include <cmath>
#include <numbers>

#include "bellreal/core.hpp"

namespace bellreal::quantum {

/// Half-angles above this lie outside the small-aperture regime where the
/// depolarization approximation is normally quoted.
inline constexpr double kSmallApertureLimitDeg = 30.0;

/// Largest half-angle depolarization() accepts; beyond it the approximation
/// turns negative.
inline constexpr double kDepolarizationMaxDeg = 90.0;

/// Ω = 2π(1 - cos φ), steradians; φ ∈ (0°, 180°].
inline double solid_angle(Angle phi) {
  if (!(phi.deg() > 0.0 && phi.deg() <= 180.0)) {
    throw DomainError(detail::concat("solid_angle: phi = ", phi.deg(), " deg is outside (0, 180]"));
  }
  return 2.0 * std::numbers::pi * (1.0 - cos_deg(phi.deg()));
}

/// g(π, φ). φ = 0 is admitted as the limit value 1.5.
inline double angular_correlation(Angle phi) {
  if (!(phi.deg() >= 0.0 && phi.deg() <= 180.0)) {
    throw DomainError(detail::concat("angular_correlation: phi = ", phi.deg(), " deg is outside [0, 180]"));
  }
  const double c = cos_deg(phi.deg());
  return 1.0 + 0.125 * c * c * (1.0 + c) * (1.0 + c);
}

struct Depolarization {
  double value;
  /// Set when φ exceeds kSmallApertureLimitDeg.
  bool approximate;
};

/// F(π, φ) ≈ 1 - (2/3)(1 - cos φ)², φ ∈ [0°, 90°].
inline Depolarization depolarization(Angle phi) {
  if (!(phi.deg() >= 0.0 && phi.deg() <= kDepolarizationMaxDeg)) {
    throw DomainError(detail::concat("depolarization: phi = ", phi.deg(), " deg is outside [0, ",
                                     kDepolarizationMaxDeg, "]"));
  }
  const double one_minus_cos = 1.0 - cos_deg(phi.deg());
  return {1.0 - (2.0 / 3.0) * one_minus_cos * one_minus_cos, phi.deg() > kSmallApertureLimitDeg};
}

struct IdealPrediction {
  double correlation;
  JointProbabilities joint;
  SinglesProbabilities singles;
};

/// Perfect polarizers and detectors at separation θ = |m - n|.
inline IdealPrediction ideal_predictions(Angle theta) {
  // (1 ± cos 2θ)/4 equals cos²θ/2 and sin²θ/2; this form keeps the
  // pairs exact whenever cos 2θ is.
  const double c = cos_deg(2.0 * theta.deg());
  const double same = (1.0 + c) / 4.0;
  const double opposite = (1.0 - c) / 4.0;
  return {c, JointProbabilities(same, opposite, opposite, same), SinglesProbabilities(0.5, 0.5)};
}

/// η² (Ω/8π)² g(π, φ).
inline double coincidence_prefactor(const Apparatus& app) {
  const double fraction = app.solid_angle() / (8.0 * std::numbers::pi);
  return app.eta() * app.eta() * fraction * fraction * angular_correlation(app.phi());
}

/// Depolarization factor in effect for this apparatus (1 when disabled).
inline double effective_depolarization(const Apparatus& app) {
  return app.use_depolarization() ? depolarization(app.phi()).value : 1.0;
}

/// Coincidence probabilities with arm 1 at `a` and arm 2 at `b`.
inline JointProbabilities real_joint(const Apparatus& app, Angle a, Angle b) {
  const double c = coincidence_prefactor(app);
  const double modulation = effective_depolarization(app) * cos_deg(2.0 * (a.deg() - b.deg()));
  const ArmOptics& o1 = app.arm1();
  const ArmOptics& o2 = app.arm2();

  auto line = [&](double sum_term, double diff_term, const char* name) {
    const double bracket = sum_term + diff_term * modulation;
    // Rounding residue on an exact zero is not a negative probability.
    if (bracket < -1e-14 * (sum_term + std::abs(diff_term))) {
      throw DomainError(detail::concat("real_joint: ", name, " bracket evaluates to ", bracket,
                                       " < 0 at a - b = ", a.deg() - b.deg(), " deg"));
    }
    return c * (bracket < 0.0 ? 0.0 : bracket);
  };

  const double pp = line(o1.t_plus() * o2.t_plus(), o1.t_minus() * o2.t_minus(), "p++");
  const double mm = line(o1.r_plus() * o2.r_plus(), o1.r_minus() * o2.r_minus(), "p--");
  const double pm = line(o1.t_plus() * o2.r_plus(), -o1.t_minus() * o2.r_minus(), "p+-");
  const double mp = line(o1.r_plus() * o2.t_plus(), -o1.r_minus() * o2.t_minus(), "p-+");
  return JointProbabilities(pp, pm, mp, mm);
}

/// p+ = p- = η Ω / 8π on either arm.
inline SinglesProbabilities real_singles(const Apparatus& app) {
  const double p = app.eta() * app.solid_angle() / (8.0 * std::numbers::pi);
  return SinglesProbabilities(p, p);
}

}  // namespace bellreal::quantum
