#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sundman/errors.hpp"
#include "sundman/expr.hpp"

namespace sundman {

// Variable assignment for evaluation. Small and copyable; later set() wins.
struct Binding {
  std::vector<std::pair<std::string, double>> vals;

  void set(std::string name, double v);
  std::optional<double> get(std::string_view name) const;
  static Binding xy(double x, double y);
};

// Canonicalizes through the rational-normal-form layer. Deterministic and
// idempotent; structurally equal results for semantically equal inputs
// within the supported rational/exponential fragment.
Expr simplify(const Expr& e);

// Partial derivative; result canonical.
Expr diff(const Expr& e, std::string_view var);

// Throws DomainError at invalid points, std::logic_error for unbound
// symbols (a programming error, not a data condition).
double eval(const Expr& e, const Binding& b);

// DomainError and non-finite results map to nullopt.
std::optional<double> try_eval(const Expr& e, const Binding& b);

// Replaces every occurrence of the symbol, then canonicalizes.
Expr substitute(const Expr& e, std::string_view var, const Expr& replacement);

// Canonical (numerator, denominator) with denominator 1 for polynomials.
// Both parts are division-free.
std::pair<Expr, Expr> as_fraction(const Expr& e);

// Rule-based antiderivative over sums of terms:
//   c                 -> c*v          (c free of v)
//   c*v^k, k != -1    -> c*v^(k+1)/(k+1)
//   c*v^-1            -> c*ln(v)
//   c*exp(a*v)        -> (c/a)*exp(a*v)
//   c*v^k*exp(a*v^(k+1)) -> c/(a*(k+1)) * exp(a*v^(k+1))
// Every result is checked by differentiation before being returned; nullopt
// when a term matches no rule.
std::optional<Expr> antiderivative(const Expr& e, std::string_view var);

}  // namespace sundman
