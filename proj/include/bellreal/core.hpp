/**
 * core.hpp — domain types shared by every bellreal module.
 *
 * Angles are carried in degrees. Probabilities are validated on
 * construction and never clamped: a value outside its range is a model bug
 * and raises DomainError.
 *
 * Joint probabilities follow the two-channel convention: the first sign is
 * the channel that fired on arm 1, the second the channel on arm 2.
 *
 *   E(m, n) = p++(m,n) - p+-(m,n) - p-+(m,n) + p--(m,n)
 *
 * Undetected fractions (p+0, p0-, p00, ...) are never stored; they are the
 * complement of the detected sum.
 */

#pragma once

#include <cmath>
#include <compare>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bellreal {

// ── errors ─────────────────────────────────────────────────────────────────

/// An input lies outside the domain of the operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A ratio-form inequality was asked to divide by a zero coincidence rate.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The operation needs a model feature the model does not expose.
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A hidden-variable model returned response probabilities outside [0,1]
/// or with channel sum above 1.
class ModelContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename... Args>
std::string concat(Args&&... args) {
  std::ostringstream oss;
  oss.precision(17);
  (oss << ... << std::forward<Args>(args));
  return oss.str();
}

// Slack on probability sums; individual components get none.
inline constexpr double kSumSlack = 1e-12;

inline void require_unit(double p, std::string_view what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(concat(what, " = ", p, " is outside [0, 1]"));
  }
}

}  // namespace detail

// ── angles ─────────────────────────────────────────────────────────────────

/// cos of an angle given in degrees. The argument is reduced exactly to
/// [0°, 90°] and multiples of 30° and 45° map to their exact values, so
/// cos_deg(60) == 0.5 and cos_deg(90) == 0.
inline double cos_deg(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;
  if (r > 180.0) r = 360.0 - r;
  bool negate = false;
  if (r > 90.0) {
    r = 180.0 - r;
    negate = true;
  }
  double v;
  if (r == 0.0) {
    v = 1.0;
  } else if (r == 90.0) {
    v = 0.0;
  } else if (r == 60.0) {
    v = 0.5;
  } else if (r == 30.0) {
    v = std::numbers::sqrt3 / 2.0;
  } else if (r == 45.0) {
    v = std::numbers::sqrt2 / 2.0;
  } else if (r > 45.0) {
    v = std::sin((90.0 - r) * std::numbers::pi / 180.0);
  } else {
    v = std::cos(r * std::numbers::pi / 180.0);
  }
  return negate ? -v : v;
}

inline double sin_deg(double deg) { return cos_deg(deg - 90.0); }

/// Polarizer (or phase) orientation in degrees.
class Angle {
 public:
  constexpr Angle() = default;

  static constexpr Angle degrees(double deg) { return Angle(deg); }
  static Angle radians(double rad) { return Angle(rad * 180.0 / std::numbers::pi); }

  constexpr double deg() const { return deg_; }
  double rad() const { return deg_ * std::numbers::pi / 180.0; }

  /// Representative in [0°, 360°).
  Angle normalized() const {
    double r = std::fmod(deg_, 360.0);
    if (r < 0.0) r += 360.0;
    if (r >= 360.0) r = 0.0;
    return Angle(r);
  }

  friend constexpr Angle operator+(Angle a, Angle b) { return Angle(a.deg_ + b.deg_); }
  friend constexpr Angle operator-(Angle a, Angle b) { return Angle(a.deg_ - b.deg_); }
  friend constexpr Angle operator-(Angle a) { return Angle(-a.deg_); }
  friend constexpr Angle operator*(double k, Angle a) { return Angle(k * a.deg_); }
  friend constexpr auto operator<=>(const Angle&, const Angle&) = default;

 private:
  constexpr explicit Angle(double deg) : deg_(deg) {}
  double deg_ = 0.0;
};

/// |m - n|, the separation the rotation-symmetric predictions depend on.
constexpr Angle separation(Angle m, Angle n) {
  const double d = m.deg() - n.deg();
  return Angle::degrees(d < 0.0 ? -d : d);
}

namespace literals {
constexpr Angle operator""_deg(long double d) { return Angle::degrees(static_cast<double>(d)); }
constexpr Angle operator""_deg(unsigned long long d) { return Angle::degrees(static_cast<double>(d)); }
}  // namespace literals

struct LabeledAngle {
  std::string label;
  Angle angle;

  friend bool operator==(const LabeledAngle&, const LabeledAngle&) = default;
};

enum class Arm { One, Two };

// ── apparatus ──────────────────────────────────────────────────────────────

/// Prism transmittances of one arm. t_* along the transmitted (+) path,
/// r_* along the reflected (-) path; _par/_perp for light polarized
/// parallel/perpendicular to that channel.
class ArmOptics {
 public:
  ArmOptics(double t_par, double t_perp, double r_par, double r_perp)
      : t_par_(t_par), t_perp_(t_perp), r_par_(r_par), r_perp_(r_perp) {
    detail::require_unit(t_par, "t_par");
    detail::require_unit(t_perp, "t_perp");
    detail::require_unit(r_par, "r_par");
    detail::require_unit(r_perp, "r_perp");
  }

  /// Perfect prism: T_par = R_par = 1, T_perp = R_perp = 0.
  static ArmOptics ideal() { return ArmOptics(1.0, 0.0, 1.0, 0.0); }

  double t_par() const { return t_par_; }
  double t_perp() const { return t_perp_; }
  double r_par() const { return r_par_; }
  double r_perp() const { return r_perp_; }

  double t_plus() const { return t_par_ + t_perp_; }
  double t_minus() const { return t_par_ - t_perp_; }
  double r_plus() const { return r_par_ + r_perp_; }
  double r_minus() const { return r_par_ - r_perp_; }

  friend bool operator==(const ArmOptics&, const ArmOptics&) = default;

 private:
  double t_par_, t_perp_, r_par_, r_perp_;
};

/// Detector/polarizer configuration for the back-to-back (θ = π) cascade
/// geometry.
class Apparatus {
 public:
  Apparatus(double eta, Angle phi, ArmOptics arm1, ArmOptics arm2, bool use_depolarization = false)
      : eta_(eta), phi_(phi), arm1_(arm1), arm2_(arm2), use_depolarization_(use_depolarization) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw DomainError(detail::concat("quantum efficiency eta = ", eta, " is outside (0, 1]"));
    }
    if (!(phi.deg() > 0.0 && phi.deg() <= 180.0)) {
      throw DomainError(detail::concat("detector half-angle phi = ", phi.deg(), " deg is outside (0, 180]"));
    }
  }

  /// Same optics on both arms.
  static Apparatus symmetric(double eta, Angle phi, ArmOptics optics = ArmOptics::ideal(),
                             bool use_depolarization = false) {
    return Apparatus(eta, phi, optics, optics, use_depolarization);
  }

  double eta() const { return eta_; }
  Angle phi() const { return phi_; }
  const ArmOptics& arm1() const { return arm1_; }
  const ArmOptics& arm2() const { return arm2_; }
  bool use_depolarization() const { return use_depolarization_; }

  /// Ω = 2π(1 - cos φ).
  double solid_angle() const { return 2.0 * std::numbers::pi * (1.0 - cos_deg(phi_.deg())); }

 private:
  double eta_;
  Angle phi_;
  ArmOptics arm1_, arm2_;
  bool use_depolarization_;
};

// ── probabilities ──────────────────────────────────────────────────────────

/// p++, p+-, p-+, p-- for one setting pair.
class JointProbabilities {
 public:
  JointProbabilities(double pp, double pm, double mp, double mm) : pp_(pp), pm_(pm), mp_(mp), mm_(mm) {
    detail::require_unit(pp, "p++");
    detail::require_unit(pm, "p+-");
    detail::require_unit(mp, "p-+");
    detail::require_unit(mm, "p--");
    if (total() > 1.0 + detail::kSumSlack) {
      throw DomainError(detail::concat("joint probabilities sum to ", total(), " > 1"));
    }
  }

  double pp() const { return pp_; }
  double pm() const { return pm_; }
  double mp() const { return mp_; }
  double mm() const { return mm_; }

  /// Probability that both arms registered a photon.
  double total() const { return pp_ + pm_ + mp_ + mm_; }

  friend bool operator==(const JointProbabilities&, const JointProbabilities&) = default;

 private:
  double pp_, pm_, mp_, mm_;
};

class SinglesProbabilities {
 public:
  SinglesProbabilities(double p_plus, double p_minus) : p_plus_(p_plus), p_minus_(p_minus) {
    detail::require_unit(p_plus, "p+");
    detail::require_unit(p_minus, "p-");
    if (total() > 1.0 + detail::kSumSlack) {
      throw DomainError(detail::concat("single-arm probabilities sum to ", total(), " > 1"));
    }
  }

  double p_plus() const { return p_plus_; }
  double p_minus() const { return p_minus_; }
  double total() const { return p_plus_ + p_minus_; }

  friend bool operator==(const SinglesProbabilities&, const SinglesProbabilities&) = default;

 private:
  double p_plus_, p_minus_;
};

/// Unnormalized correlation pp - pm - mp + mm.
inline double expectation(const JointProbabilities& j) { return j.pp() - j.pm() - j.mp() + j.mm(); }

// ── reports ────────────────────────────────────────────────────────────────

enum class InequalityKind {
  Bell1965,
  Chsh,
  TwoChannel,                 ///< expectation form, detected singles subtracted
  TwoChannelStrong,           ///< coincidence-only ratio form
  TwoChannelStrongSymmetric,  ///< ratio form reduced by rotation symmetry
  Ch,
};

inline constexpr InequalityKind kAllInequalities[] = {
    InequalityKind::Bell1965,         InequalityKind::Chsh,
    InequalityKind::TwoChannel,       InequalityKind::TwoChannelStrong,
    InequalityKind::TwoChannelStrongSymmetric, InequalityKind::Ch,
};

inline std::string_view to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::Bell1965: return "bell1965";
    case InequalityKind::Chsh: return "chsh";
    case InequalityKind::TwoChannel: return "two-channel";
    case InequalityKind::TwoChannelStrong: return "strong";
    case InequalityKind::TwoChannelStrongSymmetric: return "strong-symmetric";
    case InequalityKind::Ch: return "ch";
  }
  return "unknown";
}

inline std::optional<InequalityKind> parse_inequality(std::string_view name) {
  for (auto kind : kAllInequalities) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

struct InequalityReport {
  InequalityKind kind;
  double lhs = 0.0;
  double bound = 0.0;
  /// lhs / bound for positive bounds; lhs - bound (the excess) otherwise.
  double violation_factor = 0.0;
  std::vector<LabeledAngle> settings;
  /// Flattened inputs, e.g. "ab.pp" or "e_ab".
  std::map<std::string, double> inputs;
  std::vector<std::string> notes;

  bool violated() const { return lhs > bound; }
};

inline InequalityReport make_report(InequalityKind kind, double lhs, double bound,
                                    std::vector<LabeledAngle> settings = {},
                                    std::map<std::string, double> inputs = {}) {
  InequalityReport r{kind, lhs, bound, 0.0, std::move(settings), std::move(inputs), {}};
  r.violation_factor = bound > 0.0 ? lhs / bound : lhs - bound;
  return r;
}

}  // namespace bellreal
