#pragma once

#include <string>
#include <vector>

#include "sundman/config.hpp"
#include "sundman/expr.hpp"

namespace sundman {

// y'' + lambda2(x,y) y'^2 + lambda1(x,y) y' + lambda0(x,y) = 0
struct QuadraticOde {
  Expr lambda2, lambda1, lambda0;
  std::string source;
};

// y'' + a y'^3 + b y'^2 + c y' + d = 0 with coefficients in (x, y).
struct LieForm {
  Expr a, b, c, d;
};

LieForm lie_form(const QuadraticOde& ode);

// Expression grammar:
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := ('-'|'+') factor | postfix
//   postfix := primary ('^' factor)?
//   primary := NUMBER | IDENT | FNAME '(' expr ')' | '(' expr ')'
// NUMBER is an integer or decimal literal (parsed exactly); rationals are
// written with '/'. FNAME is one of exp, ln, sin, cos, sqrt. No implicit
// multiplication. Throws SyntaxError with a byte offset and the expected
// token set.
Expr parse_expr(const std::string& text, const std::vector<std::string>& symbols = {"x", "y"});

// Parses "lhs = rhs" with y' / y'' derivative tokens, normalizes to the
// quadratic form above by dividing through the y'' coefficient. Throws
// SyntaxError, NotSecondOrder, or NotQuadraticInDerivative. The config
// drives the vanishing check on the leading coefficient.
QuadraticOde parse_ode(const std::string& text, const Config& cfg);

// Canonical printing; parse_expr(format_expr(e)) reproduces e structurally.
std::string format_expr(const Expr& e);

}  // namespace sundman
