#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sundman/config.hpp"
#include "sundman/symcore.hpp"

namespace sundman {

enum class ZeroTag : std::uint8_t { ProvedZero, NumericallyZero, NonZero, Indeterminate };

const char* zero_tag_name(ZeroTag t);

struct ZeroVerdict {
  ZeroTag tag = ZeroTag::Indeterminate;
  int samples_used = 0;
  double max_abs = 0.0;
  std::uint64_t seed = 0;
  // Populated for NonZero: the offending point and the value there.
  std::optional<Binding> witness;
  double witness_value = 0.0;

  bool zeroish() const { return tag == ZeroTag::ProvedZero || tag == ZeroTag::NumericallyZero; }
};

// Decides whether e vanishes identically on the sampling box.
//   - canonical Number 0            -> ProvedZero
//   - canonical nonzero Number      -> NonZero (constant witness)
//   - otherwise sample cfg.samples valid points, seeded by cfg.seed:
//     all |value| <= eps_abs + eps_rel*scale -> NumericallyZero,
//     any |value| > reject_threshold        -> NonZero with witness,
//     fewer than cfg.min_samples valid points, or values stuck between the
//     accept band and the rejection threshold -> Indeterminate.
// The relative scale is the sum of |term| over the top-level terms of the
// canonical numerator, i.e. the size of the cancellation being claimed.
ZeroVerdict is_zero(const Expr& e, const Config& cfg);

struct ConstVerdict {
  bool constant = false;
  ZeroTag tag = ZeroTag::Indeterminate;  // weakest of the per-variable verdicts
  // The constant's value. exact is set when the canonical form is a Number.
  bool exact = false;
  Rat exact_value;
  double value = 0.0;
  std::optional<Binding> witness;  // a point where some derivative is nonzero
  double witness_value = 0.0;
};

// True when every partial derivative with respect to the free symbols of e
// vanishes on the box.
ConstVerdict is_constant(const Expr& e, const Config& cfg);

}  // namespace sundman
