/**
 * optimizer.hpp — orientation search for the largest inequality left side.
 *
 * scan_symmetric() fixes a' = b' = r = 0° (rotation symmetry lets one angle
 * be pinned; the aligned primes are the maximal-violation choice) and walks
 * the one-parameter family a = t, b = 2t over t ∈ [0°, 90°], so that
 * |a - b| = |b' - a| = t and |a' - b| = 2t. The best grid cell is then
 * refined by golden-section search.
 *
 * For the ideal source and the two-channel inequality the objective is
 * 2cos 2t - cos 4t + const, maximized at t = 30°.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "bellreal/core.hpp"
#include "bellreal/inequalities.hpp"
#include "bellreal/lhv.hpp"
#include "bellreal/quantum.hpp"
#include "bellreal/random.hpp"

namespace bellreal::optimizer {

// ── probability sources ────────────────────────────────────────────────────

struct IdealQuantumSource {
  JointProbabilities joint(Angle a, Angle b) const {
    return quantum::ideal_predictions(separation(a, b)).joint;
  }
  SinglesProbabilities singles(Arm, Angle) const { return SinglesProbabilities(0.5, 0.5); }
};

struct RealQuantumSource {
  Apparatus apparatus;

  JointProbabilities joint(Angle a, Angle b) const { return quantum::real_joint(apparatus, a, b); }
  SinglesProbabilities singles(Arm, Angle) const { return quantum::real_singles(apparatus); }
};

/// Hidden-variable model evaluated by quadrature (noise-free objective).
struct LhvQuadratureSource {
  lhv::BuiltinModel model;
  std::uint64_t points = lhv::kDefaultQuadraturePoints;

  JointProbabilities joint(Angle a, Angle b) const { return lhv::integrate(model, a, b, points); }
  SinglesProbabilities singles(Arm arm, Angle s) const { return lhv::integrate_singles(model, arm, s, points); }
};

using ProbabilitySource = std::variant<IdealQuantumSource, RealQuantumSource, LhvQuadratureSource>;

inline std::string_view source_name(const ProbabilitySource& s) {
  constexpr std::string_view names[] = {"ideal", "real", "lhv"};
  return names[s.index()];
}

inline JointProbabilities joint(const ProbabilitySource& s, Angle a, Angle b) {
  return std::visit([&](const auto& src) { return src.joint(a, b); }, s);
}

inline SinglesProbabilities singles(const ProbabilitySource& s, Arm arm, Angle setting) {
  return std::visit([&](const auto& src) { return src.singles(arm, setting); }, s);
}

/// Feeds `kind` with the probabilities `source` predicts at `settings`.
/// The symmetric strong form reads E at (a,b) as E(θ), E at (a',b) as E(2θ)
/// and K from (r,r). CH has no built-in one-channel model and throws
/// CapabilityError.
inline InequalityReport evaluate(InequalityKind kind, const ProbabilitySource& source, const SettingSet& s) {
  auto j = [&](Angle x, Angle y) { return joint(source, x, y); };
  auto e = [&](Angle x, Angle y) { return expectation(joint(source, x, y)); };
  switch (kind) {
    case InequalityKind::Bell1965:
      return bell_1965(e(s.a, s.b), e(s.a, s.b_prime), e(s.a_prime, s.b), s.labeled());
    case InequalityKind::Chsh:
      return chsh(e(s.a, s.b), e(s.a, s.b_prime), e(s.a_prime, s.b), e(s.a_prime, s.b_prime), s.labeled());
    case InequalityKind::TwoChannel:
      return two_channel({j(s.a, s.b), j(s.a, s.b_prime), j(s.a_prime, s.b), j(s.a_prime, s.b_prime),
                          singles(source, Arm::One, s.a_prime), singles(source, Arm::Two, s.b_prime)},
                         s.labeled());
    case InequalityKind::TwoChannelStrong:
      return two_channel_strong({j(s.a, s.b), j(s.a, s.b_prime), j(s.a_prime, s.b), j(s.a_prime, s.b_prime),
                                 j(s.a_prime, s.r), j(s.r, s.b_prime), j(s.r, s.r)},
                                s.labeled());
    case InequalityKind::TwoChannelStrongSymmetric:
      return two_channel_strong_symmetric(e(s.a, s.b), e(s.a_prime, s.b), j(s.r, s.r), s.labeled());
    case InequalityKind::Ch:
      break;
  }
  throw CapabilityError(detail::concat("inequality '", to_string(kind),
                                       "' needs one-channel probabilities no built-in source provides"));
}

// ── scans ──────────────────────────────────────────────────────────────────

inline constexpr double kDefaultRefineToleranceDeg = 0.01;
inline constexpr double kMaxGridStepDeg = 15.0;
inline constexpr double kScanUpperDeg = 90.0;

/// a = t, b = 2t, a' = b' = r = 0.
inline SettingSet symmetric_family(double t_deg) {
  return {Angle::degrees(t_deg), Angle::degrees(2.0 * t_deg), Angle::degrees(0), Angle::degrees(0),
          Angle::degrees(0)};
}

struct ScanPoint {
  double t_deg;
  double lhs;
};

struct ScanResult {
  double best_t_deg;
  double best_lhs;
  SettingSet best_settings;
  std::vector<ScanPoint> curve;  ///< grid samples, ascending t
};

/// Grid scan of the symmetric family followed by golden-section refinement
/// of the best cell down to `refine_tolerance_deg`.
inline ScanResult scan_symmetric(InequalityKind kind, const ProbabilitySource& source, double grid_step_deg,
                                 double refine_tolerance_deg = kDefaultRefineToleranceDeg, unsigned threads = 1) {
  if (!(grid_step_deg > 0.0 && grid_step_deg <= kMaxGridStepDeg)) {
    throw DomainError(detail::concat("scan_symmetric: grid step ", grid_step_deg, " deg is outside (0, ",
                                     kMaxGridStepDeg, "]"));
  }
  if (!(refine_tolerance_deg > 0.0)) {
    throw DomainError("scan_symmetric: refine tolerance must be positive");
  }
  auto objective = [&](double t) { return evaluate(kind, source, symmetric_family(t)).lhs; };

  std::vector<double> grid;
  for (std::uint64_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * grid_step_deg;
    if (t >= kScanUpperDeg - 1e-9) break;
    grid.push_back(t);
  }
  grid.push_back(kScanUpperDeg);

  const auto values = run_sharded(grid.size(), 1, threads, [&](std::uint64_t k, std::uint64_t, std::uint64_t) {
    return objective(grid[k]);
  });

  ScanResult result{};
  result.curve.reserve(grid.size());
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    result.curve.push_back({grid[k], values[k]});
    if (values[k] > values[best]) best = k;
  }

  double lo = best == 0 ? grid[0] : grid[best - 1];
  double hi = best + 1 == grid.size() ? grid[best] : grid[best + 1];
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > refine_tolerance_deg) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double t_refined = 0.5 * (lo + hi);
  const double f_refined = objective(t_refined);

  if (f_refined >= values[best]) {
    result.best_t_deg = t_refined;
    result.best_lhs = f_refined;
  } else {
    result.best_t_deg = grid[best];
    result.best_lhs = values[best];
  }
  result.best_settings = symmetric_family(result.best_t_deg);
  return result;
}

struct FullScanResult {
  SettingSet best_settings;
  double best_lhs;
  std::uint64_t evaluations;
};

/// Exploration mode: a, b, a' each over [0°, 180°) on the grid with
/// b' = r = 0. No refinement.
inline FullScanResult scan_full(InequalityKind kind, const ProbabilitySource& source, double grid_step_deg,
                                unsigned threads = 1) {
  if (!(grid_step_deg > 0.0 && grid_step_deg <= kMaxGridStepDeg)) {
    throw DomainError(detail::concat("scan_full: grid step ", grid_step_deg, " deg is outside (0, ",
                                     kMaxGridStepDeg, "]"));
  }
  std::vector<double> axis;
  for (std::uint64_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * grid_step_deg;
    if (t >= 180.0 - 1e-9) break;
    axis.push_back(t);
  }
  const std::uint64_t n = axis.size();
  const std::uint64_t total = n * n * n;
  auto setting_at = [&](std::uint64_t idx) {
    return SettingSet{Angle::degrees(axis[idx / (n * n)]), Angle::degrees(axis[(idx / n) % n]),
                      Angle::degrees(axis[idx % n]), Angle::degrees(0), Angle::degrees(0)};
  };
  struct Best {
    std::uint64_t idx;
    double lhs;
  };
  const auto shards = run_sharded(total, 512, threads, [&](std::uint64_t, std::uint64_t begin, std::uint64_t end) {
    Best best{begin, evaluate(kind, source, setting_at(begin)).lhs};
    for (std::uint64_t i = begin + 1; i < end; ++i) {
      const double v = evaluate(kind, source, setting_at(i)).lhs;
      if (v > best.lhs) best = {i, v};
    }
    return best;
  });
  Best best = shards.front();
  for (const auto& b : shards) {
    if (b.lhs > best.lhs) best = b;
  }
  return {setting_at(best.idx), best.lhs, total};
}

}  // namespace bellreal::optimizer
