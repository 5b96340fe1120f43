#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sundman/config.hpp"
#include "sundman/parser.hpp"
#include "sundman/zerotest.hpp"

namespace sundman {

// The four derived coefficient functions driving the classification.
//
//   lambda3 = l1_y - 2 l2_x
//   lambda4 = 2 l0_yy - 2 l1_xy + 2 l0 l2_y - l1_y l1 + 2 l0_y l2 + 2 l2_xx
//   lambda5 = l2_xx + l2_x l1 + l3_x + l1 l3
//   lambda6 = l0_x + 2 l0 l1
struct Invariants {
  Expr lambda3, lambda4, lambda5, lambda6;
};

Invariants derived_invariants(const QuadraticOde& ode);

enum class Verdict : std::uint8_t { Linearizable, NotLinearizable, Indeterminate };

const char* verdict_name(Verdict v);

// One tested compatibility condition. `raw_text` states the condition in its
// solved form (possibly dividing by a classified-nonzero function); `cleared`
// is the denominator-free residual that actually went to is_zero.
struct ConditionResult {
  std::string id;
  std::string raw_text;
  Expr cleared;
  ZeroVerdict verdict;
};

struct CheckReport {
  Verdict verdict = Verdict::Indeterminate;
  std::string case_label;   // A1, A2, A3, B, C, DMS0 (empty if unclassified)
  std::string case_detail;  // e.g. "lambda3 != 0, lambda5 != 0"
  std::vector<ConditionResult> conditions;
  std::vector<std::string> notes;
  std::uint64_t seed = 0;
};

// Decides linearizability by a generalized Sundman transformation with
// F_x = 0 to u'' + beta u' + alpha u = gamma with constant coefficients.
// Case tree: lambda3 != 0 branches on lambda5 (A1) and, when lambda5 = 0,
// on lambda0 (A2 vs A3); lambda3 = 0 branches on lambda4 (DMS0 when it
// vanishes) and then on lambda6 (B vs C). Every condition is formed as a
// residual and zero-tested on the sampling box.
CheckReport check_sundman(const QuadraticOde& ode, const Config& cfg);

// Decides linearizability to the target u'' = 0 specifically: lambda3 = 0
// requires lambda4 = 0; lambda3 != 0 requires lambda4 != 0 plus two residual
// conditions in lambda3, lambda4 and their derivatives.
CheckReport check_dms(const QuadraticOde& ode, const Config& cfg);

// Classical point-transformation test: the two fourth-order residuals in the
// cubic-in-y' coefficients (a, b, c, d) = (0, lambda2, lambda1, lambda0).
CheckReport check_lie(const QuadraticOde& ode, const Config& cfg);

}  // namespace sundman
