/**
 * inequalities.hpp — evaluators for the correlation inequalities.
 *
 * Each evaluator returns an InequalityReport (lhs, bound, violation factor,
 * flattened inputs). Correlations passed in are the unnormalized differences
 * pp - pm - mp + mm; normalizing them is the caller's business.
 *
 * Setting-pair naming: "ab" is arm 1 at a and arm 2 at b; "bpa" is arm 1 at
 * a and arm 2 at b'; "apb" is a', b; "apbp" is a', b'; "apr" is a', r;
 * "rbp" is r, b'; "rr" is both arms at the reference orientation r.
 *
 *   bell1965          E(a,b) + E(b',a) - E(a',b)                       <= 1
 *   chsh              E(a,b) + E(b',a) - E(a',b) + E(a',b')            <= 2
 *   two-channel       E(a,b) + E(b',a) - E(a',b) + 2p++(a',b')
 *                     + 2p--(a',b') - p±(a') - p±(b')                  <= 1
 *   strong            [E(a,b) + E(b',a) - E(a',b) + 2p++(a',b')
 *                     + 2p--(a',b') - Σp(a',r) - Σp(r,b')] / Σp(r,r)   <= 1
 *   strong-symmetric  [2E(θ) - E(2θ) - 2p+-(0) - 2p-+(0)] / K          <= 1
 *   ch                [3p(φ) - p(3φ) - p(a',∞) - p(∞,b)] / p(∞,∞)      <= 0
 */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "bellreal/core.hpp"

namespace bellreal {

/// The five orientations the two-channel inequalities are stated over.
struct SettingSet {
  Angle a, b, a_prime, b_prime, r;

  /// a = 30°, b = 60°, a' = b' = r = 0°: |a-b| = |b'-a| = 30°, |a'-b| = 60°.
  static SettingSet maximal_violation() {
    return {Angle::degrees(30), Angle::degrees(60), Angle::degrees(0), Angle::degrees(0), Angle::degrees(0)};
  }

  std::vector<LabeledAngle> labeled() const {
    return {{"a", a}, {"b", b}, {"a'", a_prime}, {"b'", b_prime}, {"r", r}};
  }
};

struct TwoChannelInputs {
  JointProbabilities ab, bpa, apb, apbp;
  SinglesProbabilities singles_ap;  ///< arm 1 at a'
  SinglesProbabilities singles_bp;  ///< arm 2 at b'
};

struct StrongInputs {
  JointProbabilities ab, bpa, apb, apbp, apr, rbp, rr;
};

namespace detail {

inline void require_correlation(double e, std::string_view name) {
  if (!(e >= -1.0 && e <= 1.0)) {
    throw DomainError(concat(name, " = ", e, " is outside [-1, 1]"));
  }
}

inline void put_joint(std::map<std::string, double>& out, const std::string& key, const JointProbabilities& j) {
  out[key + ".pp"] = j.pp();
  out[key + ".pm"] = j.pm();
  out[key + ".mp"] = j.mp();
  out[key + ".mm"] = j.mm();
}

inline void put_singles(std::map<std::string, double>& out, const std::string& key,
                        const SinglesProbabilities& s) {
  out[key + ".plus"] = s.p_plus();
  out[key + ".minus"] = s.p_minus();
}

}  // namespace detail

inline InequalityReport bell_1965(double e_ab, double e_bpa, double e_apb, std::vector<LabeledAngle> settings = {}) {
  detail::require_correlation(e_ab, "e_ab");
  detail::require_correlation(e_bpa, "e_bpa");
  detail::require_correlation(e_apb, "e_apb");
  return make_report(InequalityKind::Bell1965, e_ab + e_bpa - e_apb, 1.0, std::move(settings),
                     {{"e_ab", e_ab}, {"e_bpa", e_bpa}, {"e_apb", e_apb}});
}

inline InequalityReport chsh(double e_ab, double e_bpa, double e_apb, double e_apbp,
                             std::vector<LabeledAngle> settings = {}) {
  detail::require_correlation(e_ab, "e_ab");
  detail::require_correlation(e_bpa, "e_bpa");
  detail::require_correlation(e_apb, "e_apb");
  detail::require_correlation(e_apbp, "e_apbp");
  return make_report(InequalityKind::Chsh, e_ab + e_bpa - e_apb + e_apbp, 2.0, std::move(settings),
                     {{"e_ab", e_ab}, {"e_bpa", e_bpa}, {"e_apb", e_apb}, {"e_apbp", e_apbp}});
}

/// Expectation form with the detected single rates at a' and b'.
inline InequalityReport two_channel(const TwoChannelInputs& in, std::vector<LabeledAngle> settings = {}) {
  const double lhs = expectation(in.ab) + expectation(in.bpa) - expectation(in.apb) + 2.0 * in.apbp.pp() +
                     2.0 * in.apbp.mm() - in.singles_ap.total() - in.singles_bp.total();
  std::map<std::string, double> digest;
  detail::put_joint(digest, "ab", in.ab);
  detail::put_joint(digest, "bpa", in.bpa);
  detail::put_joint(digest, "apb", in.apb);
  detail::put_joint(digest, "apbp", in.apbp);
  detail::put_singles(digest, "singles_ap", in.singles_ap);
  detail::put_singles(digest, "singles_bp", in.singles_bp);
  return make_report(InequalityKind::TwoChannel, lhs, 1.0, std::move(settings), std::move(digest));
}

/// Numerator of the strong form; shared with the Monte Carlo error
/// propagation in lhv.hpp.
inline double strong_numerator(const StrongInputs& in) {
  return expectation(in.ab) + expectation(in.bpa) - expectation(in.apb) + 2.0 * in.apbp.pp() +
         2.0 * in.apbp.mm() - in.apr.total() - in.rbp.total();
}

/// Coincidence-only ratio form. Independent of the emission count: scaling
/// every input by k > 0 leaves lhs unchanged.
inline InequalityReport two_channel_strong(const StrongInputs& in, std::vector<LabeledAngle> settings = {}) {
  const double denominator = in.rr.total();
  if (denominator == 0.0) {
    throw DegenerateError("strong inequality: no coincidences at (r, r); denominator is zero");
  }
  std::map<std::string, double> digest;
  detail::put_joint(digest, "ab", in.ab);
  detail::put_joint(digest, "bpa", in.bpa);
  detail::put_joint(digest, "apb", in.apb);
  detail::put_joint(digest, "apbp", in.apbp);
  detail::put_joint(digest, "apr", in.apr);
  detail::put_joint(digest, "rbp", in.rbp);
  detail::put_joint(digest, "rr", in.rr);
  return make_report(InequalityKind::TwoChannelStrong, strong_numerator(in) / denominator, 1.0,
                     std::move(settings), std::move(digest));
}

/// Strong form with a' = b' = r and rotation symmetry. `e_theta` is the
/// correlation at separation θ (used twice), `e_two_theta` at 2θ, `aligned`
/// the coincidences at 0° whose total is K.
inline InequalityReport two_channel_strong_symmetric(double e_theta, double e_two_theta,
                                                     const JointProbabilities& aligned,
                                                     std::vector<LabeledAngle> settings = {}) {
  detail::require_correlation(e_theta, "e_theta");
  detail::require_correlation(e_two_theta, "e_two_theta");
  const double k = aligned.total();
  if (k == 0.0) {
    throw DegenerateError("strong-symmetric inequality: K = 0 (no coincidences at 0 deg)");
  }
  const double lhs = (2.0 * e_theta - e_two_theta - 2.0 * aligned.pm() - 2.0 * aligned.mp()) / k;
  std::map<std::string, double> digest{{"e_theta", e_theta}, {"e_two_theta", e_two_theta}};
  detail::put_joint(digest, "aligned", aligned);
  return make_report(InequalityKind::TwoChannelStrongSymmetric, lhs, 1.0, std::move(settings), std::move(digest));
}

/// One-channel CH inequality in ratio form. Inputs are supplied by the
/// caller; no one-channel model is built in.
inline InequalityReport ch(double p_phi, double p_3phi, double p_ap_inf, double p_inf_b, double p_inf_inf,
                           std::vector<LabeledAngle> settings = {}) {
  for (auto [value, name] : {std::pair{p_phi, "p_phi"}, std::pair{p_3phi, "p_3phi"}, std::pair{p_ap_inf, "p_ap_inf"},
                             std::pair{p_inf_b, "p_inf_b"}, std::pair{p_inf_inf, "p_inf_inf"}}) {
    if (!(value >= 0.0)) throw DomainError(detail::concat("ch: ", name, " = ", value, " is negative"));
  }
  if (p_inf_inf == 0.0) {
    throw DegenerateError("ch inequality: p(inf, inf) = 0; denominator is zero");
  }
  const double lhs = (3.0 * p_phi - p_3phi - p_ap_inf - p_inf_b) / p_inf_inf;
  return make_report(InequalityKind::Ch, lhs, 0.0, std::move(settings),
                     {{"p_phi", p_phi},
                      {"p_3phi", p_3phi},
                      {"p_ap_inf", p_ap_inf},
                      {"p_inf_b", p_inf_b},
                      {"p_inf_inf", p_inf_inf}});
}

}  // namespace bellreal
