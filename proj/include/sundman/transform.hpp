#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sundman/invariants.hpp"

namespace sundman {

// u = F(x,y), dt = G(x,y) dx with K = G F_y != 0 on the box. Everything this
// artifact derives has F_x = 0; user-supplied F may carry x and is verified
// under the same relations.
struct SundmanTransform {
  Expr F, G;
  std::string provenance;  // derived-symbolic | derived-ansatz | user-supplied
};

// Constant coefficients of the target u'' + beta u' + alpha u = gamma,
// kept both as simplified expressions and as is_constant evidence.
struct LinearTarget {
  Expr alpha, beta, gamma;
  ConstVerdict alpha_c, beta_c, gamma_c;
};

// Attempts a closed-form G for a case reported Linearizable.
// Strategy order:
//   (i)  integrate the first-order log-derivative system G_x/G = p,
//        G_y/G = q when the case determines both (A1, B): check the
//        cross-compatibility p_y = q_x, take G = exp(int p dx + int q~ dy);
//   (ii) ansatz G = exp(int p dx) * H(y), H in {1, y^m, exp(a y)}, with the
//        parameter snapped to a rational from sampled roots of the remaining
//        G-equation and accepted only if the full compatibility system
//        back-substitutes to zero exactly;
//   (iii) none -- callers fall back to numeric-only verification.
std::optional<Expr> derive_g(const QuadraticOde& ode, const Invariants& inv,
                             const std::string& case_label, const Config& cfg);

// F from F_yy = (G_y F_y + F_y G lambda2)/G with F_x = 0: requires
// G_y/G + lambda2 to be x-free, then F_y(y) = G(x0, y) exp(int lambda2(x0, y) dy)
// at the reference abscissa x0 (box center), F = int F_y dy, rational content
// cleared. Returns nothing when an antiderivative is unavailable or the
// a-posteriori residual check fails.
std::optional<Expr> derive_f(const QuadraticOde& ode, const Expr& g, const Config& cfg);

// derive_g + derive_f for the report's case; nothing if either half fails.
std::optional<SundmanTransform> derive_transform(const QuadraticOde& ode,
                                                 const CheckReport& rep,
                                                 const Config& cfg);

// alpha = (-G_y lambda0 + G (lambda_0y + lambda0 lambda2))/G^3
// beta  = (G_x + G lambda1)/G^2
// gamma = (-F_y lambda0 + alpha F G^2)/G^2   (alpha first: gamma depends on it)
// Each must pass is_constant; throws NonConstantTarget otherwise.
LinearTarget target_coeffs(const QuadraticOde& ode, const SundmanTransform& t,
                           const Config& cfg);

struct CandidateReport {
  // Residuals of the three defining relations, in lambda2, lambda1, lambda0
  // order; lambda1/lambda0 entries exist only when the target is available.
  std::vector<ConditionResult> residuals;
  ZeroVerdict k_nonzero;              // K = G F_y must be NonZero
  bool point_transformation = false;  // G_y == 0: degenerates to a point map
  std::optional<LinearTarget> target;
  std::vector<std::string> notes;
  bool ok = false;
  std::uint64_t seed = 0;
};

CandidateReport verify_candidate(const QuadraticOde& ode, const SundmanTransform& t,
                                 const Config& cfg);

struct LinearSolution {
  enum class Roots { RealDistinct, RealDouble, ComplexPair };
  Roots kind = Roots::RealDistinct;
  Expr u;           // general solution in t with constants c1, c2
  Expr particular;  // inhomogeneous part included in u
  Expr residual;    // u'' + beta u' + alpha u - gamma after substitution
};

// Closed form for the constant-coefficient target; the back-substitution
// residual simplifies to zero identically.
LinearSolution linear_general_solution(const LinearTarget& target);

}  // namespace sundman
