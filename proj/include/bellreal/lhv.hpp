/**
 * lhv.hpp — local hidden-variable models and their ensemble statistics.
 *
 * A model draws a hidden state λ per emission and maps (λ, own setting) to
 * channel probabilities (q+, q-) on each arm; the photon goes undetected
 * with probability 1 - q+ - q-. respond_arm2 never receives arm 1's
 * setting, so every model expressible here is local by construction.
 *
 *   p±±(a,b) = ∫ p(λ) q±(a|λ) q±(b|λ) dλ
 *
 * estimate() measures these by Monte Carlo; integrate() evaluates them by
 * quadrature for models whose λ is a single uniform real.
 */

#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bellreal/core.hpp"
#include "bellreal/inequalities.hpp"
#include "bellreal/random.hpp"

namespace bellreal::lhv {

struct ChannelResponse {
  double plus;
  double minus;

  double total() const { return plus + minus; }
};

struct HiddenInterval {
  double lo;
  double hi;
};

template <typename M>
concept LocalModel = requires(const M& m, Rng& rng, const typename M::hidden_state& lambda, Angle s) {
  { m.sample_hidden(rng) } -> std::convertible_to<typename M::hidden_state>;
  { m.respond_arm1(lambda, s) } -> std::same_as<ChannelResponse>;
  { m.respond_arm2(lambda, s) } -> std::same_as<ChannelResponse>;
};

/// λ is one real, uniformly distributed over hidden_interval().
template <typename M>
concept UniformScalarModel = LocalModel<M> && std::same_as<typename M::hidden_state, double> &&
                             requires(const M& m) {
                               { m.hidden_interval() } -> std::same_as<HiddenInterval>;
                             };

namespace detail {

template <typename T>
concept Streamable = requires(std::ostream& os, const T& t) { os << t; };

inline void require_scale(double d, std::string_view model) {
  if (!(d > 0.0 && d <= 1.0)) {
    throw DomainError(bellreal::detail::concat(model, ": detection scale d = ", d, " is outside (0, 1]"));
  }
}

}  // namespace detail

template <typename H>
std::string describe_hidden(const H& lambda) {
  if constexpr (detail::Streamable<H>) {
    return bellreal::detail::concat(lambda);
  } else {
    return "<opaque hidden state>";
  }
}

/// Throws ModelContractError naming λ if a response leaves [0,1] or its
/// channel sum exceeds 1.
template <typename H>
void check_response(const ChannelResponse& r, Arm arm, Angle setting, const H& lambda) {
  const bool in_range = r.plus >= 0.0 && r.plus <= 1.0 && r.minus >= 0.0 && r.minus <= 1.0;
  if (!in_range || r.total() > 1.0 + bellreal::detail::kSumSlack) {
    throw ModelContractError(bellreal::detail::concat(
        "model contract violated on arm ", arm == Arm::One ? 1 : 2, " at setting ", setting.deg(),
        " deg: q+ = ", r.plus, ", q- = ", r.minus, " for hidden state lambda = ", describe_hidden(lambda)));
  }
}

// ── built-in models ────────────────────────────────────────────────────────

/// q± = d/2 regardless of λ and setting.
struct NoiseModel {
  using hidden_state = double;

  explicit NoiseModel(double d) : d(d) { detail::require_scale(d, "noise"); }

  HiddenInterval hidden_interval() const { return {0.0, 1.0}; }
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(); }
  ChannelResponse respond_arm1(double, Angle) const { return {d / 2, d / 2}; }
  ChannelResponse respond_arm2(double, Angle) const { return {d / 2, d / 2}; }

  double d;
};

/// λ uniform on [0°, 180°); q+ = d cos²(s - λ), q- = d sin²(s - λ) on both
/// arms. The channel sum is d for every λ and setting.
struct MalusProductModel {
  using hidden_state = double;

  explicit MalusProductModel(double d) : d(d) { detail::require_scale(d, "malus-product"); }

  HiddenInterval hidden_interval() const { return {0.0, 180.0}; }
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(0.0, 180.0); }
  ChannelResponse respond(double lambda, Angle s) const {
    const double c = cos_deg(s.deg() - lambda);
    const double sn = sin_deg(s.deg() - lambda);
    return {d * c * c, d * sn * sn};
  }
  ChannelResponse respond_arm1(double lambda, Angle s) const { return respond(lambda, s); }
  ChannelResponse respond_arm2(double lambda, Angle s) const { return respond(lambda, s); }

  double d;
};

/// λ uniform on [0°, 180°); the photon goes to + with probability d when
/// cos 2(s - λ) >= 0, to - with probability d otherwise.
struct ThresholdModel {
  using hidden_state = double;

  explicit ThresholdModel(double d) : d(d) { detail::require_scale(d, "threshold"); }

  HiddenInterval hidden_interval() const { return {0.0, 180.0}; }
  hidden_state sample_hidden(Rng& rng) const { return rng.uniform(0.0, 180.0); }
  ChannelResponse respond(double lambda, Angle s) const {
    return cos_deg(2.0 * (s.deg() - lambda)) >= 0.0 ? ChannelResponse{d, 0.0} : ChannelResponse{0.0, d};
  }
  ChannelResponse respond_arm1(double lambda, Angle s) const { return respond(lambda, s); }
  ChannelResponse respond_arm2(double lambda, Angle s) const { return respond(lambda, s); }

  double d;
};

using BuiltinModel = std::variant<NoiseModel, MalusProductModel, ThresholdModel>;

inline constexpr std::string_view kBuiltinModelNames[] = {"noise", "malus-product", "threshold"};

/// Built-in model by CLI name; DomainError for an unknown name.
inline BuiltinModel make_builtin(std::string_view name, double d) {
  if (name == "noise") return NoiseModel(d);
  if (name == "malus-product") return MalusProductModel(d);
  if (name == "threshold") return ThresholdModel(d);
  throw DomainError(bellreal::detail::concat("unknown LHV model '", name, "'"));
}

inline std::string_view model_name(const BuiltinModel& m) {
  return kBuiltinModelNames[m.index()];
}

// ── counting ───────────────────────────────────────────────────────────────

enum class Outcome { Plus, Minus, None };

inline Outcome draw_outcome(const ChannelResponse& r, double u) {
  if (u < r.plus) return Outcome::Plus;
  if (u < r.plus + r.minus) return Outcome::Minus;
  return Outcome::None;
}

/// Outcome tallies; first index is arm 1, second arm 2, 0 = undetected.
struct CountLedger {
  std::uint64_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
  std::uint64_t n_p0 = 0, n_m0 = 0, n_0p = 0, n_0m = 0, n_00 = 0;
  std::uint64_t n_total = 0;

  void record(Outcome arm1, Outcome arm2) {
    ++n_total;
    std::uint64_t* cell[3][3] = {{&n_pp, &n_pm, &n_p0}, {&n_mp, &n_mm, &n_m0}, {&n_0p, &n_0m, &n_00}};
    ++*cell[static_cast<int>(arm1)][static_cast<int>(arm2)];
  }

  CountLedger& operator+=(const CountLedger& o) {
    n_pp += o.n_pp;
    n_pm += o.n_pm;
    n_mp += o.n_mp;
    n_mm += o.n_mm;
    n_p0 += o.n_p0;
    n_m0 += o.n_m0;
    n_0p += o.n_0p;
    n_0m += o.n_0m;
    n_00 += o.n_00;
    n_total += o.n_total;
    return *this;
  }

  std::uint64_t cell_sum() const { return n_pp + n_pm + n_mp + n_mm + n_p0 + n_m0 + n_0p + n_0m + n_00; }
  bool closed() const { return cell_sum() == n_total; }

  JointProbabilities joint() const {
    const double n = static_cast<double>(n_total);
    return JointProbabilities(n_pp / n, n_pm / n, n_mp / n, n_mm / n);
  }
  SinglesProbabilities arm1_singles() const {
    const double n = static_cast<double>(n_total);
    return SinglesProbabilities((n_pp + n_pm + n_p0) / n, (n_mp + n_mm + n_m0) / n);
  }
  SinglesProbabilities arm2_singles() const {
    const double n = static_cast<double>(n_total);
    return SinglesProbabilities((n_pp + n_mp + n_0p) / n, (n_pm + n_mm + n_0m) / n);
  }

  friend bool operator==(const CountLedger&, const CountLedger&) = default;
};

struct Estimate {
  JointProbabilities joint;
  SinglesProbabilities arm1;
  SinglesProbabilities arm2;
  CountLedger ledger;
};

inline constexpr std::uint64_t kEstimateShardSize = 1u << 16;

/// Monte Carlo over n emissions with arm 1 at `a` and arm 2 at `b`.
/// Bit-identical for a fixed seed, whatever the thread count.
template <LocalModel M>
Estimate estimate(const M& model, Angle a, Angle b, std::uint64_t n, std::uint64_t seed, unsigned threads = 1) {
  if (n < 1) throw DomainError("estimate: n must be at least 1");
  auto shards = run_sharded(n, kEstimateShardSize, threads,
                            [&](std::uint64_t shard, std::uint64_t begin, std::uint64_t end) {
                              Rng rng(derive_seed(seed, shard));
                              CountLedger ledger;
                              for (std::uint64_t i = begin; i < end; ++i) {
                                const typename M::hidden_state lambda = model.sample_hidden(rng);
                                const ChannelResponse r1 = model.respond_arm1(lambda, a);
                                const ChannelResponse r2 = model.respond_arm2(lambda, b);
                                check_response(r1, Arm::One, a, lambda);
                                check_response(r2, Arm::Two, b, lambda);
                                const Outcome o1 = draw_outcome(r1, rng.uniform());
                                const Outcome o2 = draw_outcome(r2, rng.uniform());
                                ledger.record(o1, o2);
                              }
                              return ledger;
                            });
  CountLedger total;
  for (const auto& s : shards) total += s;
  return {total.joint(), total.arm1_singles(), total.arm2_singles(), total};
}

inline Estimate estimate(const BuiltinModel& model, Angle a, Angle b, std::uint64_t n, std::uint64_t seed,
                         unsigned threads = 1) {
  return std::visit([&](const auto& m) { return estimate(m, a, b, n, seed, threads); }, model);
}

// ── quadrature ─────────────────────────────────────────────────────────────

inline constexpr std::uint64_t kDefaultQuadraturePoints = 4096;

namespace detail {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// Midpoint-rule evaluation of the ensemble integrals. Exact for the
/// trigonometric built-ins once `points` exceeds their harmonic degree.
/// Throws CapabilityError for models whose λ is not a uniform scalar.
template <LocalModel M>
JointProbabilities integrate(const M& model, Angle a, Angle b,
                             std::uint64_t points = kDefaultQuadraturePoints) {
  if constexpr (UniformScalarModel<M>) {
    if (points < 1) throw DomainError("integrate: need at least one quadrature point");
    const HiddenInterval iv = model.hidden_interval();
    const double h = (iv.hi - iv.lo) / static_cast<double>(points);
    detail::CompensatedSum pp, pm, mp, mm;
    for (std::uint64_t i = 0; i < points; ++i) {
      const double lambda = iv.lo + (static_cast<double>(i) + 0.5) * h;
      const ChannelResponse r1 = model.respond_arm1(lambda, a);
      const ChannelResponse r2 = model.respond_arm2(lambda, b);
      check_response(r1, Arm::One, a, lambda);
      check_response(r2, Arm::Two, b, lambda);
      pp.add(r1.plus * r2.plus);
      pm.add(r1.plus * r2.minus);
      mp.add(r1.minus * r2.plus);
      mm.add(r1.minus * r2.minus);
    }
    const double w = 1.0 / static_cast<double>(points);
    return JointProbabilities(pp.value() * w, pm.value() * w, mp.value() * w, mm.value() * w);
  } else {
    throw CapabilityError("integrate: model does not expose a uniform one-dimensional hidden variable");
  }
}

template <LocalModel M>
SinglesProbabilities integrate_singles(const M& model, Arm arm, Angle setting,
                                       std::uint64_t points = kDefaultQuadraturePoints) {
  if constexpr (UniformScalarModel<M>) {
    if (points < 1) throw DomainError("integrate_singles: need at least one quadrature point");
    const HiddenInterval iv = model.hidden_interval();
    const double h = (iv.hi - iv.lo) / static_cast<double>(points);
    detail::CompensatedSum plus, minus;
    for (std::uint64_t i = 0; i < points; ++i) {
      const double lambda = iv.lo + (static_cast<double>(i) + 0.5) * h;
      const ChannelResponse r =
          arm == Arm::One ? model.respond_arm1(lambda, setting) : model.respond_arm2(lambda, setting);
      check_response(r, arm, setting, lambda);
      plus.add(r.plus);
      minus.add(r.minus);
    }
    const double w = 1.0 / static_cast<double>(points);
    return SinglesProbabilities(plus.value() * w, minus.value() * w);
  } else {
    throw CapabilityError("integrate_singles: model does not expose a uniform one-dimensional hidden variable");
  }
}

inline JointProbabilities integrate(const BuiltinModel& model, Angle a, Angle b,
                                    std::uint64_t points = kDefaultQuadraturePoints) {
  return std::visit([&](const auto& m) { return integrate(m, a, b, points); }, model);
}

inline SinglesProbabilities integrate_singles(const BuiltinModel& model, Arm arm, Angle setting,
                                              std::uint64_t points = kDefaultQuadraturePoints) {
  return std::visit([&](const auto& m) { return integrate_singles(m, arm, setting, points); }, model);
}

// ── supplementary assumptions ──────────────────────────────────────────────

inline constexpr double kAssumptionTolerance = 1e-12;

struct Counterexample {
  std::string hidden_state;
  Arm arm;
  Angle setting;
  char channel;           ///< '+' or '-' ('=' for a channel-sum mismatch)
  double probability;     ///< q at the offending setting (or its sum)
  double reference_sum;   ///< q+(r) + q-(r)
};

struct AssumptionCheck {
  bool passed = true;
  std::uint64_t lambdas_checked = 0;
  std::optional<Counterexample> witness;
};

namespace detail {

template <LocalModel M, typename Predicate>
AssumptionCheck scan_hidden_states(const M& model, const std::vector<Angle>& settings, Angle r,
                                   std::uint64_t lambdas, std::uint64_t seed, Predicate&& violates) {
  if (settings.empty()) throw DomainError("assumption check: settings list is empty");
  Rng rng(seed);
  AssumptionCheck result;
  for (std::uint64_t i = 0; i < lambdas; ++i) {
    const typename M::hidden_state lambda = model.sample_hidden(rng);
    ++result.lambdas_checked;
    for (Arm arm : {Arm::One, Arm::Two}) {
      auto respond = [&](Angle s) {
        const ChannelResponse q = arm == Arm::One ? model.respond_arm1(lambda, s) : model.respond_arm2(lambda, s);
        check_response(q, arm, s, lambda);
        return q;
      };
      const ChannelResponse ref = respond(r);
      for (Angle s : settings) {
        if (auto bad = violates(respond(s), ref)) {
          result.passed = false;
          result.witness = Counterexample{describe_hidden(lambda), arm, s, bad->first, bad->second, ref.total()};
          return result;
        }
      }
    }
  }
  return result;
}

}  // namespace detail

/// For sampled λ, checks q±(s|λ) <= q+(r|λ) + q-(r|λ) on both arms for every
/// s in `settings`. Stops at the first counterexample.
template <LocalModel M>
AssumptionCheck check_supplementary(const M& model, const std::vector<Angle>& settings, Angle r,
                                    std::uint64_t lambdas, std::uint64_t seed) {
  return detail::scan_hidden_states(
      model, settings, r, lambdas, seed,
      [](const ChannelResponse& q, const ChannelResponse& ref) -> std::optional<std::pair<char, double>> {
        if (q.plus > ref.total() + kAssumptionTolerance) return std::pair{'+', q.plus};
        if (q.minus > ref.total() + kAssumptionTolerance) return std::pair{'-', q.minus};
        return std::nullopt;
      });
}

/// For sampled λ, checks q+(s|λ) + q-(s|λ) == q+(r|λ) + q-(r|λ) within
/// kAssumptionTolerance on both arms.
template <LocalModel M>
AssumptionCheck check_gr(const M& model, const std::vector<Angle>& settings, Angle r, std::uint64_t lambdas,
                         std::uint64_t seed) {
  return detail::scan_hidden_states(
      model, settings, r, lambdas, seed,
      [](const ChannelResponse& q, const ChannelResponse& ref) -> std::optional<std::pair<char, double>> {
        if (std::abs(q.total() - ref.total()) > kAssumptionTolerance) return std::pair{'=', q.total()};
        return std::nullopt;
      });
}

inline AssumptionCheck check_supplementary(const BuiltinModel& model, const std::vector<Angle>& settings, Angle r,
                                           std::uint64_t lambdas, std::uint64_t seed) {
  return std::visit([&](const auto& m) { return check_supplementary(m, settings, r, lambdas, seed); }, model);
}

inline AssumptionCheck check_gr(const BuiltinModel& model, const std::vector<Angle>& settings, Angle r,
                                std::uint64_t lambdas, std::uint64_t seed) {
  return std::visit([&](const auto& m) { return check_gr(m, settings, r, lambdas, seed); }, model);
}

// ── strong inequality experiment ───────────────────────────────────────────

/// The seven setting pairs of the strong inequality, in StrongInputs order:
/// (a,b), (a,b'), (a',b), (a',b'), (a',r), (r,b'), (r,r).
inline std::array<std::pair<Angle, Angle>, 7> strong_setting_pairs(const SettingSet& s) {
  return {{{s.a, s.b},
           {s.a, s.b_prime},
           {s.a_prime, s.b},
           {s.a_prime, s.b_prime},
           {s.a_prime, s.r},
           {s.r, s.b_prime},
           {s.r, s.r}}};
}

struct StrongExperiment {
  InequalityReport report;
  /// One-σ statistical error of report.lhs.
  double sigma;
  std::vector<Estimate> runs;
};

namespace detail {

// Coefficients of (pp, pm, mp, mm) in the strong numerator, per pair.
inline constexpr std::array<std::array<double, 4>, 6> kNumeratorWeights{{
    {1, -1, -1, 1},
    {1, -1, -1, 1},
    {-1, 1, 1, -1},
    {2, 0, 0, 2},
    {-1, -1, -1, -1},
    {-1, -1, -1, -1},
}};

// Variance of the sample mean of Σ w_k 1[cell k] over n multinomial draws.
inline double weighted_mean_variance(const JointProbabilities& j, const std::array<double, 4>& w, double n) {
  const std::array<double, 4> p{j.pp(), j.pm(), j.mp(), j.mm()};
  double mean = 0, second = 0;
  for (int k = 0; k < 4; ++k) {
    mean += w[k] * p[k];
    second += w[k] * w[k] * p[k];
  }
  return (second - mean * mean) / n;
}

}  // namespace detail

/// Runs the seven setting pairs as independent experiments of `shots`
/// emissions each (pair k seeded with derive_seed(seed, k)) and evaluates
/// the strong inequality. σ is propagated to first order through the ratio.
template <typename M>
  requires LocalModel<M> || std::same_as<M, BuiltinModel>
StrongExperiment strong_experiment(const M& model, const SettingSet& settings, std::uint64_t shots,
                                   std::uint64_t seed, unsigned threads = 1) {
  const auto pairs = strong_setting_pairs(settings);
  std::vector<Estimate> runs;
  runs.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    runs.push_back(estimate(model, pairs[k].first, pairs[k].second, shots, derive_seed(seed, k), threads));
  }
  const StrongInputs in{runs[0].joint, runs[1].joint, runs[2].joint, runs[3].joint,
                        runs[4].joint, runs[5].joint, runs[6].joint};
  InequalityReport report = two_channel_strong(in, settings.labeled());

  const double n = static_cast<double>(shots);
  double var_numerator = 0;
  for (std::size_t k = 0; k < 6; ++k) {
    var_numerator += detail::weighted_mean_variance(runs[k].joint, detail::kNumeratorWeights[k], n);
  }
  const double var_denominator = detail::weighted_mean_variance(runs[6].joint, {1, 1, 1, 1}, n);
  const double num = strong_numerator(in);
  const double den = in.rr.total();
  const double var_ratio = var_numerator / (den * den) + num * num * var_denominator / (den * den * den * den);
  return {std::move(report), std::sqrt(var_ratio), std::move(runs)};
}

}  // namespace bellreal::lhv
