/**
 * theorem.hpp — numerical verification of the algebraic bound Z <= 0.
 *
 * For x1±, x2± ∈ [0, U] and y1±, y2± ∈ [0, V]:
 *
 *   Z = x1+y1+ + x1-y1- - x1+y1- - x1-y1+ + y2+x1+ + y2-x1- - y2+x1- - y2-x1+
 *     - y1+x2+ - y1-x2- + y1+x2- + y1-x2+ + 2x2+y2+ + 2x2-y2-
 *     - Vx2+ - Vx2- - Uy2+ - Uy2- - UV  <=  0
 *
 * Z is affine in each of the eight variables separately, so its maximum over
 * the box is attained at one of the 2⁸ vertices. verify_vertices() is exact;
 * verify_random() is statistical corroboration.
 */

#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "bellreal/core.hpp"
#include "bellreal/random.hpp"

namespace bellreal::theorem {

/// Absolute tolerance on Z comparisons for U, V of order one.
inline constexpr double kTolerance = 1e-12;

struct ZInputs {
  double x1p = 0, x1m = 0, x2p = 0, x2m = 0;
  double y1p = 0, y1m = 0, y2p = 0, y2m = 0;
  double u = 1, v = 1;

  /// Throws DomainError unless U, V > 0 and every variable sits in its box.
  void validate() const {
    if (!(u > 0.0) || !(v > 0.0)) {
      throw DomainError(detail::concat("theorem: caps must be positive (U = ", u, ", V = ", v, ")"));
    }
    const std::array<std::pair<double, const char*>, 4> xs{
        {{x1p, "x1+"}, {x1m, "x1-"}, {x2p, "x2+"}, {x2m, "x2-"}}};
    const std::array<std::pair<double, const char*>, 4> ys{
        {{y1p, "y1+"}, {y1m, "y1-"}, {y2p, "y2+"}, {y2m, "y2-"}}};
    for (auto [value, name] : xs) {
      if (!(value >= 0.0 && value <= u)) {
        throw DomainError(detail::concat("theorem: ", name, " = ", value, " is outside [0, U = ", u, "]"));
      }
    }
    for (auto [value, name] : ys) {
      if (!(value >= 0.0 && value <= v)) {
        throw DomainError(detail::concat("theorem: ", name, " = ", value, " is outside [0, V = ", v, "]"));
      }
    }
  }

  friend bool operator==(const ZInputs&, const ZInputs&) = default;
};

/// Z term by term, without validation.
inline double z_unchecked(const ZInputs& p) {
  return p.x1p * p.y1p + p.x1m * p.y1m - p.x1p * p.y1m - p.x1m * p.y1p + p.y2p * p.x1p + p.y2m * p.x1m -
         p.y2p * p.x1m - p.y2m * p.x1p - p.y1p * p.x2p - p.y1m * p.x2m + p.y1p * p.x2m + p.y1m * p.x2p +
         2.0 * p.x2p * p.y2p + 2.0 * p.x2m * p.y2m - p.v * p.x2p - p.v * p.x2m - p.u * p.y2p - p.u * p.y2m -
         p.u * p.v;
}

inline double z_value(const ZInputs& p) {
  p.validate();
  return z_unchecked(p);
}

struct BoxMaximum {
  double max_z;
  ZInputs argmax;
};

/// Vertex `mask` of the box: bit i set puts variable i at its cap
/// (order x1+, x1-, x2+, x2-, y1+, y1-, y2+, y2-).
inline ZInputs vertex(double u, double v, unsigned mask) {
  auto at = [mask](unsigned bit, double cap) { return (mask >> bit) & 1u ? cap : 0.0; };
  return {at(0, u), at(1, u), at(2, u), at(3, u), at(4, v), at(5, v), at(6, v), at(7, v), u, v};
}

/// Exact box maximum by enumerating all 256 vertices. Ties resolve to the
/// lowest vertex mask.
inline BoxMaximum verify_vertices(double u, double v) {
  ZInputs{0, 0, 0, 0, 0, 0, 0, 0, u, v}.validate();
  BoxMaximum best{-std::numeric_limits<double>::infinity(), {}};
  for (unsigned mask = 0; mask < 256; ++mask) {
    const ZInputs p = vertex(u, v, mask);
    const double z = z_unchecked(p);
    if (z > best.max_z) best = {z, p};
  }
  return best;
}

/// Samples drawn per shard in verify_random.
inline constexpr std::uint64_t kRandomShardSize = 1u << 16;

/// Uniform point in the box from one generator; the draw order is fixed.
inline ZInputs random_point(Rng& rng, double u, double v) {
  ZInputs p{};
  p.x1p = rng.uniform(0, u);
  p.x1m = rng.uniform(0, u);
  p.x2p = rng.uniform(0, u);
  p.x2m = rng.uniform(0, u);
  p.y1p = rng.uniform(0, v);
  p.y1m = rng.uniform(0, v);
  p.y2p = rng.uniform(0, v);
  p.y2m = rng.uniform(0, v);
  p.u = u;
  p.v = v;
  return p;
}

/// Largest Z over n seeded uniform samples from the box. Sample i belongs to
/// shard i / kRandomShardSize, whose generator is seeded with
/// derive_seed(seed, shard).
inline BoxMaximum verify_random(double u, double v, std::uint64_t n, std::uint64_t seed,
                                unsigned threads = 1) {
  if (n < 1) throw DomainError("verify_random: n must be at least 1");
  ZInputs{0, 0, 0, 0, 0, 0, 0, 0, u, v}.validate();
  auto shards = run_sharded(n, kRandomShardSize, threads,
                            [&](std::uint64_t shard, std::uint64_t begin, std::uint64_t end) {
                              Rng rng(derive_seed(seed, shard));
                              BoxMaximum best{-std::numeric_limits<double>::infinity(), {}};
                              for (std::uint64_t i = begin; i < end; ++i) {
                                const ZInputs p = random_point(rng, u, v);
                                const double z = z_unchecked(p);
                                if (z > best.max_z) best = {z, p};
                              }
                              return best;
                            });
  BoxMaximum best = shards.front();
  for (const auto& s : shards) {
    if (s.max_z > best.max_z) best = s;
  }
  return best;
}

}  // namespace bellreal::theorem
